//! Singular sets, fold/cusp classification and injectivity on the singular set.
//!
//! For a generic rank-two spec the singular set `det J = 0` is the equilateral
//! hyperbola `y = y_c + k / (x - x_c)` with axis-parallel asymptotes. Points
//! on it are classified with Whitney's criteria: along a local parametrization
//! `γ` of the critical curve, `(f∘γ)' ≠ 0` means fold, while `(f∘γ)' = 0` with
//! `(f∘γ)'' ≠ 0` means cusp.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Mat2, Point};
use crate::mapping::{MappingSpec, PlaneMap, Rank};
use crate::oracle;

/// `y = y_c + k / (x - x_c)`; the asymptotes are `x = x_c` and `y = y_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperbola {
    pub x_c: f64,
    pub y_c: f64,
    pub k: f64,
}

impl Hyperbola {
    pub fn new(x_c: f64, y_c: f64, k: f64) -> Self {
        Self { x_c, y_c, k }
    }

    pub fn center(&self) -> Point {
        [self.x_c, self.y_c]
    }

    pub fn phi(&self, x: f64) -> f64 {
        self.y_c + self.k / (x - self.x_c)
    }

    pub fn phi_prime(&self, x: f64) -> f64 {
        let u = x - self.x_c;
        -self.k / (u * u)
    }

    pub fn phi_second(&self, x: f64) -> f64 {
        let u = x - self.x_c;
        2.0 * self.k / (u * u * u)
    }

    /// Half-width of the vertex region, `sqrt|k|`.
    pub fn vertex_scale(&self) -> f64 {
        self.k.abs().sqrt()
    }
}

/// Closed-form singular set of a generic spec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SingularCurve {
    Line { point: Point, direction: Point },
    Hyperbola(Hyperbola),
}

/// One connected piece of a singular set with a regular parametrization.
///
/// A hyperbola arm is parametrized so that `t ≥ 0` runs along the arm
/// asymptotic to `y = y_c` with `|x - x_c| = s + t`, and `t < 0` along the arm
/// asymptotic to `x = x_c` with `|y - y_c| = s - t`, where `s = sqrt|k|`. The
/// two pieces join with matching velocity at the vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branch {
    HyperbolaArm { curve: Hyperbola, side: f64 },
    Line { point: Point, direction: Point },
}

impl Branch {
    pub fn point(&self, t: f64) -> Point {
        match *self {
            Branch::HyperbolaArm { curve, side } => {
                let (u, v) = arm_offsets(&curve, side, t);
                [curve.x_c + u, curve.y_c + v]
            }
            Branch::Line { point, direction } => geom::add(point, geom::scale(direction, t)),
        }
    }

    pub fn velocity(&self, t: f64) -> Point {
        match *self {
            Branch::HyperbolaArm { curve, side } => {
                let k = curve.k;
                let (u, v) = arm_offsets(&curve, side, t);
                if t >= 0.0 {
                    [side, -k * side / (u * u)]
                } else {
                    [k.abs() * side / (v * v), -k.signum() * side]
                }
            }
            Branch::Line { direction, .. } => direction,
        }
    }

    /// Parameter of a point lying on this branch.
    pub fn param_of(&self, p: Point) -> f64 {
        match *self {
            Branch::HyperbolaArm { curve, .. } => {
                let s = curve.vertex_scale();
                let u = (p[0] - curve.x_c).abs();
                if u >= s {
                    u - s
                } else {
                    s - (curve.k / u).abs()
                }
            }
            Branch::Line { point, direction } => geom::dot(geom::sub(p, point), direction),
        }
    }

    /// Whether `p` sits on the side of the asymptote this arm covers.
    fn owns(&self, p: Point) -> bool {
        match *self {
            Branch::HyperbolaArm { curve, side } => (p[0] - curve.x_c) * side > 0.0,
            Branch::Line { .. } => true,
        }
    }
}

fn arm_offsets(curve: &Hyperbola, side: f64, t: f64) -> (f64, f64) {
    let (k, s) = (curve.k, curve.vertex_scale());
    if t >= 0.0 {
        let u = side * (s + t);
        (u, k / u)
    } else {
        let v = k.signum() * side * (s - t);
        (k / v, v)
    }
}

/// A branch with a finite parameter window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchWindow {
    pub branch: Branch,
    pub t_min: f64,
    pub t_max: f64,
}

impl BranchWindow {
    /// `n` uniformly spaced parameters including both ends.
    pub fn params(&self, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![0.5 * (self.t_min + self.t_max)];
        }
        (0..n)
            .map(|i| self.t_min + (self.t_max - self.t_min) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Classification of a point of a plane-to-plane map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SingularityClass {
    Regular,
    Fold,
    Cusp,
    Degenerate,
}

/// Thresholds for [`classify_point`], all relative to local scales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Distance to the critical curve, `|det J| / |∇ det J|`, relative to `1 + |p|`.
    pub singular: f64,
    /// `|(f∘γ)'|` relative to `|J| |γ'|`.
    pub fold: f64,
    /// `|(f∘γ)''|` relative to `|D²f| |γ'|² + |J| |γ''|`.
    pub cusp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { singular: 1e-9, fold: 1e-8, cusp: 1e-6 }
    }
}

/// First and second derivatives of `f` along the critical curve through a
/// singular point, from the implicit function theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub tangent: Point,
    pub curvature_term: Point,
    pub first: Point,
    pub second: Point,
    pub jacobian: Mat2,
    pub hessians: [Mat2; 2],
}

/// `(det J, ∇ det J, D² det J)` from the map's partials up to order three.
fn det_jet(map: &dyn PlaneMap, p: Point) -> (f64, Point, Mat2) {
    let j = map.jacobian(p);
    let [h1, h2] = map.hessians(p);
    let [t1, t2] = map.third_partials(p);
    let (f1x, f1y, f2x, f2y) = (j[0][0], j[0][1], j[1][0], j[1][1]);
    let (f1xx, f1xy, f1yy) = (h1[0][0], h1[0][1], h1[1][1]);
    let (f2xx, f2xy, f2yy) = (h2[0][0], h2[0][1], h2[1][1]);
    let [f1xxx, f1xxy, f1xyy, f1yyy] = t1;
    let [f2xxx, f2xxy, f2xyy, f2yyy] = t2;

    let d = f1x * f2y - f1y * f2x;
    let dx = f1xx * f2y + f1x * f2xy - f1xy * f2x - f1y * f2xx;
    let dy = f1xy * f2y + f1x * f2yy - f1yy * f2x - f1y * f2xy;
    let dxx = f1xxx * f2y + 2.0 * f1xx * f2xy + f1x * f2xxy - f1xxy * f2x - 2.0 * f1xy * f2xx - f1y * f2xxx;
    let dxy = f1xxy * f2y + f1xx * f2yy + f1x * f2xyy - f1xyy * f2x - f1yy * f2xx - f1y * f2xxy;
    let dyy = f1xyy * f2y + 2.0 * f1xy * f2yy + f1x * f2yyy - f1yyy * f2x - 2.0 * f1yy * f2xy - f1y * f2xyy;
    (d, [dx, dy], [[dxx, dxy], [dxy, dyy]])
}

/// Derivatives of `f` along the critical curve at a point where
/// `∇ det J ≠ 0`. The curve is parametrized by `x` when `|∂y det J|` dominates,
/// by `y` otherwise.
pub fn curve_jet(map: &dyn PlaneMap, p: Point) -> Result<(CurveJet, f64, Point)> {
    let (d, grad, hess) = det_jet(map, p);
    let [dx, dy] = grad;
    if !(dx != 0.0 || dy != 0.0) {
        return Err(Error::CriticalGradientZero { p });
    }
    let (tangent, curvature_term) = if dy.abs() >= dx.abs() {
        let s = -dx / dy;
        let s2 = -(hess[0][0] + 2.0 * hess[0][1] * s + hess[1][1] * s * s) / dy;
        ([1.0, s], [0.0, s2])
    } else {
        let s = -dy / dx;
        let s2 = -(hess[1][1] + 2.0 * hess[0][1] * s + hess[0][0] * s * s) / dx;
        ([s, 1.0], [s2, 0.0])
    };
    let jacobian = map.jacobian(p);
    let hessians = map.hessians(p);
    let first = geom::mat_vec(&jacobian, tangent);
    let jg = geom::mat_vec(&jacobian, curvature_term);
    let second = [
        geom::quad_form(&hessians[0], tangent) + jg[0],
        geom::quad_form(&hessians[1], tangent) + jg[1],
    ];
    Ok((CurveJet { tangent, curvature_term, first, second, jacobian, hessians }, d, grad))
}

/// Whitney classification of a singular point of any plane map.
pub fn classify_point(map: &dyn PlaneMap, p: Point, tol: &Tolerances) -> Result<SingularityClass> {
    let (d, grad, _) = det_jet(map, p);
    let gnorm = geom::norm(grad);
    if gnorm == 0.0 || !gnorm.is_finite() {
        return if d == 0.0 {
            Err(Error::CriticalGradientZero { p })
        } else {
            Err(Error::NotSingular { p, residual: d.abs() })
        };
    }
    let residual = d.abs() / gnorm;
    if residual > tol.singular * (1.0 + geom::norm(p)) {
        return Err(Error::NotSingular { p, residual });
    }
    let (jet, _, _) = curve_jet(map, p)?;
    Ok(classify_jet(&jet, tol))
}

/// Like [`classify_point`] but reports non-singular points as `Regular`.
pub fn classify_any(map: &dyn PlaneMap, p: Point, tol: &Tolerances) -> Result<SingularityClass> {
    match classify_point(map, p, tol) {
        Err(Error::NotSingular { .. }) => Ok(SingularityClass::Regular),
        other => other,
    }
}

fn classify_jet(jet: &CurveJet, tol: &Tolerances) -> SingularityClass {
    let jnorm = geom::frobenius(&jet.jacobian);
    let tnorm = geom::norm(jet.tangent);
    let first_scale = jnorm * tnorm;
    if first_scale == 0.0 {
        return SingularityClass::Degenerate;
    }
    if geom::norm(jet.first) > tol.fold * first_scale {
        return SingularityClass::Fold;
    }
    let hnorm = geom::frobenius(&jet.hessians[0]).hypot(geom::frobenius(&jet.hessians[1]));
    let second_scale = hnorm * tnorm * tnorm + jnorm * geom::norm(jet.curvature_term);
    if second_scale > 0.0 && geom::norm(jet.second) >= tol.cusp * second_scale {
        SingularityClass::Cusp
    } else {
        SingularityClass::Degenerate
    }
}

/// Closed-form singular set of a generic spec.
pub fn singular_set(spec: &MappingSpec) -> Result<SingularCurve> {
    if !spec.is_generic() {
        return Err(Error::NonGenericSpec);
    }
    match spec.rank() {
        Rank::Two => Ok(SingularCurve::Hyperbola(hyperbola_of(spec))),
        Rank::One => {
            let (point, direction) = line_of(spec).ok_or(Error::NonGenericSpec)?;
            Ok(SingularCurve::Line { point, direction })
        }
    }
}

/// Center and branch constant of the singular hyperbola of a rank-two spec.
fn hyperbola_of(spec: &MappingSpec) -> Hyperbola {
    let [[a00, a01], [a10, a11]] = spec.matrix();
    let ([p00, p01], [p10, p11]) = (spec.p0(), spec.p1());
    let det_a = spec.det_a();
    let x_c = (a00 * a11 * p00 - a01 * a10 * p10) / det_a;
    let y_c = (a00 * a11 * p11 - a01 * a10 * p01) / det_a;
    let k = -a00 * a01 * a10 * a11 * (p00 - p10) * (p01 - p11) / (det_a * det_a);
    Hyperbola { x_c, y_c, k }
}

/// The affine singular set `c_x x + c_y y + c_0 = 0` of a rank-one spec.
fn line_of(spec: &MappingSpec) -> Option<(Point, Point)> {
    let c = spec.det_coefficients();
    let n2 = c.c_x * c.c_x + c.c_y * c.c_y;
    if n2 == 0.0 {
        return None;
    }
    let n = n2.sqrt();
    let point = [-c.c_0 * c.c_x / n2 + 0.0, -c.c_0 * c.c_y / n2 + 0.0];
    let direction = [-c.c_y / n, c.c_x / n];
    Some((point, direction))
}

/// Pieces of the singular set of any spec, including the crossing lines of a
/// non-generic rank-two spec. Returns `None` when the whole plane is singular.
fn branches_of(spec: &MappingSpec) -> Option<Vec<Branch>> {
    match spec.rank() {
        Rank::Two => {
            let h = hyperbola_of(spec);
            if h.k == 0.0 {
                Some(vec![
                    Branch::Line { point: [h.x_c, h.y_c], direction: [0.0, 1.0] },
                    Branch::Line { point: [h.x_c, h.y_c], direction: [1.0, 0.0] },
                ])
            } else {
                Some(vec![
                    Branch::HyperbolaArm { curve: h, side: -1.0 },
                    Branch::HyperbolaArm { curve: h, side: 1.0 },
                ])
            }
        }
        Rank::One => line_of(spec).map(|(point, direction)| vec![Branch::Line { point, direction }]),
    }
}

/// The branches of the singular set of a spec whose singular set is a curve.
pub fn branches(spec: &MappingSpec) -> Result<Vec<Branch>> {
    branches_of(spec).ok_or(Error::NonGenericSpec)
}

/// Parameter windows covering the base points and the cusp of `spec` with
/// room to spare.
pub fn sampling_windows(spec: &MappingSpec) -> Result<Vec<BranchWindow>> {
    let branches = branches_of(spec).ok_or(Error::NonGenericSpec)?;
    let mut features = vec![spec.p0(), spec.p1()];
    if spec.rank() == Rank::Two && spec.is_generic() {
        features.push(cusp_location(spec));
    }
    Ok(windows_for(&branches, &features))
}

/// Windows spanning `[-T, T]` with `T` three times the largest feature
/// parameter (at least three vertex scales and at least 1).
pub fn windows_for(branches: &[Branch], features: &[Point]) -> Vec<BranchWindow> {
    branches
        .iter()
        .map(|b| {
            let base = match b {
                Branch::HyperbolaArm { curve, .. } => curve.vertex_scale(),
                Branch::Line { .. } => 0.0,
            };
            let reach = features
                .iter()
                .filter(|p| b.owns(**p))
                .map(|p| b.param_of(*p).abs())
                .fold(base, f64::max);
            let t = (3.0 * reach).max(1.0);
            BranchWindow { branch: *b, t_min: -t, t_max: t }
        })
        .collect()
}

/// Image direction of a rank-one Jacobian: its larger column, normalized.
fn image_direction(j: &Mat2) -> Point {
    let (c0, c1) = ([j[0][0], j[1][0]], [j[0][1], j[1][1]]);
    let c = if geom::norm(c0) >= geom::norm(c1) { c0 } else { c1 };
    let n = geom::norm(c);
    if n == 0.0 {
        [0.0, 0.0]
    } else {
        geom::scale(c, 1.0 / n)
    }
}

fn oriented(w: Point, reference: Point) -> Point {
    if geom::dot(w, reference) < 0.0 {
        geom::scale(w, -1.0)
    } else {
        w
    }
}

/// Parameters of cusps of `map` along `branch`, found as sign changes of the
/// signed speed `(f∘γ)'·w` (with `w` the continuously oriented image direction
/// of `J`) followed by bisection. Roots are kept only when `|(f∘γ)'|` vanishes
/// relative to `|J| |γ'|`.
pub fn locate_cusps(map: &dyn PlaneMap, window: &BranchWindow, n: usize) -> Vec<f64> {
    let b = window.branch;
    let ts = window.params(n.max(2));
    let speed = |t: f64, w: Point| {
        let j = map.jacobian(b.point(t));
        let g = geom::mat_vec(&j, b.velocity(t));
        geom::dot(g, oriented(image_direction(&j), w))
    };
    let mut roots = Vec::new();
    let mut w = image_direction(&map.jacobian(b.point(ts[0])));
    let mut prev = (ts[0], speed(ts[0], w));
    for &t in &ts[1..] {
        let w_next = oriented(image_direction(&map.jacobian(b.point(t))), w);
        let s = speed(t, w_next);
        if prev.1 == 0.0 || prev.1.signum() != s.signum() {
            let w_ref = w;
            if let Ok(root) = oracle::root_find(|x| speed(x, w_ref), prev.0, t, oracle::DEFAULT_ROOT_TOL) {
                let j = map.jacobian(b.point(root));
                let v = b.velocity(root);
                let g = geom::norm(geom::mat_vec(&j, v));
                if g <= 1e-8 * geom::frobenius(&j) * geom::norm(v) && roots.last() != Some(&root) {
                    roots.push(root);
                }
            }
        }
        w = w_next;
        prev = (t, s);
    }
    roots
}

/// The unique cusp of a generic rank-two spec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspReport {
    /// `(x̃, φ(x̃))`.
    pub point: Point,
    pub image: Point,
    /// The independent closed form of `φ(x̃)`.
    pub y_closed_form: f64,
    /// `|g'(x̃)|` for `g(x) = G(x, φ(x))`.
    pub first_derivative_residual: f64,
    /// `|g''(x̃)|`.
    pub second_derivative_norm: f64,
}

/// `x̃` from the signed cube root closed form.
fn cusp_location(spec: &MappingSpec) -> Point {
    let [[a00, a01], [a10, a11]] = spec.matrix();
    let ([p00, p01], [p10, p11]) = (spec.p0(), spec.p1());
    let det_a = spec.det_a();
    let radicand = a00 * a01 * a01 * a10 * a11 * a11 * (p00 - p10) * (p01 - p11) * (p01 - p11);
    let x = (geom::signed_cbrt(radicand) + (a00 * a11 * p00 - a01 * a10 * p10)) / det_a;
    [x, hyperbola_of(spec).phi(x)]
}

/// `g'(x)` and `g''(x)` for `g(x) = G(x, φ(x))`.
pub fn graph_derivatives(spec: &MappingSpec, x: f64) -> (Point, Point) {
    let h = hyperbola_of(spec);
    let p = [x, h.phi(x)];
    let (d1, d2) = (h.phi_prime(x), h.phi_second(x));
    let j = spec.jacobian(p);
    let [[a00, a01], [a10, a11]] = spec.matrix();
    let first = geom::mat_vec(&j, [1.0, d1]);
    let second = [
        2.0 * a00 + 2.0 * a01 * d1 * d1 + j[0][1] * d2,
        2.0 * a10 + 2.0 * a11 * d1 * d1 + j[1][1] * d2,
    ];
    (first, second)
}

pub fn cusp_point(spec: &MappingSpec) -> Result<CuspReport> {
    if spec.rank() == Rank::One {
        return Err(Error::RankOneSpec);
    }
    if !spec.is_generic() {
        return Err(Error::NonGenericSpec);
    }
    let [[a00, a01], [a10, a11]] = spec.matrix();
    let ([p00, p01], [p10, p11]) = (spec.p0(), spec.p1());
    let point = cusp_location(spec);
    let radicand = a00 * a00 * a01 * a10 * a10 * a11 * (p00 - p10) * (p00 - p10) * (p01 - p11);
    let y_closed_form = (-geom::signed_cbrt(radicand) + (a00 * a11 * p11 - a01 * a10 * p01)) / spec.det_a();
    let (first, second) = graph_derivatives(spec, point[0]);
    Ok(CuspReport {
        point,
        image: spec.evaluate(point),
        y_closed_form,
        first_derivative_residual: geom::norm(first),
        second_derivative_norm: geom::norm(second),
    })
}

/// A classified sample of the singular set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedPoint {
    pub branch: usize,
    pub param: f64,
    pub point: Point,
    pub class: SingularityClass,
}

/// Cusp roots closer than this in parameter are one cluster, and samples this
/// close to a root are replaced by it.
pub const CUSP_MERGE: f64 = 1e-6;

/// Classifies `n_samples` points per branch of the singular set of a generic
/// spec. Cusps located along each branch are inserted as samples.
pub fn classify_singular_set(spec: &MappingSpec, n_samples: usize) -> Result<Vec<ClassifiedPoint>> {
    if !spec.is_generic() {
        return Err(Error::NonGenericSpec);
    }
    classify_on_windows(spec, &sampling_windows(spec)?, n_samples, &Tolerances::default())
}

/// Classification of samples on explicit branch windows of any map.
pub fn classify_on_windows(
    map: &dyn PlaneMap,
    windows: &[BranchWindow],
    n_samples: usize,
    tol: &Tolerances,
) -> Result<Vec<ClassifiedPoint>> {
    let mut out = Vec::new();
    for (bi, w) in windows.iter().enumerate() {
        let cusps = locate_cusps(map, w, n_samples);
        let mut params: Vec<f64> = w
            .params(n_samples)
            .into_iter()
            .filter(|t| cusps.iter().all(|c| (t - c).abs() > CUSP_MERGE))
            .filter(|t| !near_asymptote(&w.branch, *t))
            .collect();
        params.extend(&cusps);
        params.sort_by(f64::total_cmp);
        for t in params {
            let point = w.branch.point(t);
            let class = classify_point(map, point, tol)?;
            out.push(ClassifiedPoint { branch: bi, param: t, point, class });
        }
    }
    Ok(out)
}

fn near_asymptote(branch: &Branch, t: f64) -> bool {
    match branch {
        Branch::HyperbolaArm { curve, .. } => {
            let p = branch.point(t);
            (p[0] - curve.x_c).abs() < 1e-4 * (1.0 + curve.x_c.abs())
        }
        Branch::Line { .. } => false,
    }
}

/// Number of maximal runs of consecutive `Cusp` samples on the same branch.
pub fn cusp_clusters(points: &[ClassifiedPoint]) -> usize {
    let mut clusters = 0;
    let mut prev: Option<&ClassifiedPoint> = None;
    for p in points {
        if p.class == SingularityClass::Cusp {
            let continues = prev.is_some_and(|q| {
                q.class == SingularityClass::Cusp && q.branch == p.branch
            });
            if !continues {
                clusters += 1;
            }
        }
        prev = Some(p);
    }
    clusters
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InjectivityVerdict {
    Injective,
    NonInjective,
    Inconclusive,
}

/// Two distinct singular points with (numerically) equal images.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub first: Point,
    pub second: Point,
    pub first_image: Point,
    pub second_image: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InjectivitySampling {
    pub samples_per_branch: usize,
    /// Images closer than `image_tol · (1 + |image|)` count as equal.
    pub image_tol: f64,
    /// Samples within this many steps of a cusp are treated as one cusp germ
    /// and not compared with each other. The germ is widened further while
    /// its two arms stay on opposite sides of the cusp tangent.
    pub cusp_window: usize,
}

impl Default for InjectivitySampling {
    fn default() -> Self {
        Self { samples_per_branch: 2000, image_tol: 1e-9, cusp_window: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectivityCertificate {
    pub verdict: InjectivityVerdict,
    pub witness: Option<WitnessPair>,
    pub sampling: InjectivitySampling,
    pub branches: usize,
    /// Smallest ratio of segment separation to the combined chord-deviation
    /// bound over all non-local segment pairs that were compared; `None` when
    /// no two segments came close enough to be compared.
    pub min_margin: Option<f64>,
    pub note: Option<String>,
}

struct Sample {
    branch: usize,
    index: usize,
    t: f64,
    point: Point,
    image: Point,
}

struct Segment {
    branch: usize,
    index: usize,
    span: [f64; 2],
    a: Point,
    b: Point,
    slack: f64,
    bbox: [f64; 4],
}

/// Samples the singular set densely and checks that distinct samples never
/// share an image and that the sampled image curve has no self-contact beyond
/// its chord-deviation bound. Local injectivity near folds and cusps is not
/// re-checked.
pub fn restricted_injectivity(spec: &MappingSpec, sampling: &InjectivitySampling) -> InjectivityCertificate {
    let mut cert = InjectivityCertificate {
        verdict: InjectivityVerdict::Inconclusive,
        witness: None,
        sampling: *sampling,
        branches: 0,
        min_margin: None,
        note: None,
    };
    let windows = match sampling_windows(spec) {
        Ok(w) => w,
        Err(_) => {
            cert.note = Some("singular set is not a curve".into());
            return cert;
        }
    };
    cert.branches = windows.len();
    let n = sampling.samples_per_branch.max(3);

    let mut samples = Vec::new();
    let mut zones = Vec::new();
    for (bi, w) in windows.iter().enumerate() {
        let step = (w.t_max - w.t_min) / (n - 1) as f64;
        let first = samples.len();
        for (i, t) in w.params(n).into_iter().enumerate() {
            let point = w.branch.point(t);
            samples.push(Sample { branch: bi, index: i, t, point, image: spec.evaluate(point) });
        }
        for c in locate_cusps(spec, w, n) {
            zones.push(CuspZone::grow(spec, w, bi, c, step, sampling.cusp_window as f64 * step, &samples[first..]));
        }
    }
    let locality = Locality { zones };

    let is_local = |s: &Sample, r: &Sample| {
        s.branch == r.branch && (s.index.abs_diff(r.index) <= 1 || locality.local(s.branch, [s.t, s.t], [r.t, r.t]))
    };

    if let Some(w) = exact_collision(&samples, sampling.image_tol, &is_local) {
        cert.verdict = InjectivityVerdict::NonInjective;
        cert.witness = Some(w);
        return cert;
    }

    let segments: Vec<Segment> = samples
        .windows(2)
        .filter(|p| p[0].branch == p[1].branch)
        .map(|p| {
            let (s, e) = (&p[0], &p[1]);
            let mid = spec.evaluate(windows[s.branch].branch.point(0.5 * (s.t + e.t)));
            let chord_mid = geom::scale(geom::add(s.image, e.image), 0.5);
            let slack = 2.0 * geom::dist(mid, chord_mid) + sampling.image_tol * (1.0 + geom::norm(mid));
            let bbox = [
                s.image[0].min(e.image[0]).min(mid[0]) - slack,
                s.image[0].max(e.image[0]).max(mid[0]) + slack,
                s.image[1].min(e.image[1]).min(mid[1]) - slack,
                s.image[1].max(e.image[1]).max(mid[1]) + slack,
            ];
            Segment { branch: s.branch, index: s.index, span: [s.t, e.t], a: s.image, b: e.image, slack, bbox }
        })
        .collect();

    let mut order: Vec<usize> = (0..segments.len()).collect();
    order.sort_by(|&i, &j| segments[i].bbox[0].total_cmp(&segments[j].bbox[0]));
    let mut active: Vec<usize> = Vec::new();
    let mut suspects = Vec::new();
    for &i in &order {
        let s = &segments[i];
        active.retain(|&j| segments[j].bbox[1] >= s.bbox[0]);
        for &j in &active {
            let r = &segments[j];
            if r.bbox[3] < s.bbox[2] || r.bbox[2] > s.bbox[3] || (s.branch == r.branch
                    && (s.index.abs_diff(r.index) <= 1 || locality.local(s.branch, s.span, r.span)))
            {
                continue;
            }
            let d = segment_distance(s.a, s.b, r.a, r.b);
            let margin = d / (s.slack + r.slack);
            cert.min_margin = Some(cert.min_margin.map_or(margin, |m| m.min(margin)));
            if margin <= 1.0 {
                suspects.push((i, j));
            }
        }
        active.push(i);
    }

    if suspects.is_empty() {
        cert.verdict = InjectivityVerdict::Injective;
        return cert;
    }
    let ctx = Refiner {
        spec,
        windows: &windows,
        locality: &locality,
        tol: sampling.image_tol,
    };
    let mut budget = REFINE_BUDGET;
    let mut unresolved = 0usize;
    for (i, j) in suspects {
        let (s, r) = (&segments[i], &segments[j]);
        let span = |seg: &Segment| Span { branch: seg.branch, t0: seg.span[0], t1: seg.span[1] };
        match ctx.refine(span(s), span(r), 0, &mut budget) {
            Refined::Separated => {}
            Refined::Double(w) => {
                cert.verdict = InjectivityVerdict::NonInjective;
                cert.witness = Some(w);
                return cert;
            }
            Refined::Unresolved => unresolved += 1,
        }
    }
    if unresolved == 0 {
        cert.verdict = InjectivityVerdict::Injective;
        cert.note = Some("near-contacts of the sampled image curve were separated after refinement".into());
        return cert;
    }
    cert.note = Some(format!(
        "{unresolved} segment pair(s) stay within their sampling error of each other after refinement"
    ));
    cert
}

/// Parameter neighbourhood of a cusp in which the singular curve is a single
/// cusp germ. Within `core` of the cusp everything counts as local; beyond it
/// the zone extends as long as the two arms stay in opposite open half-planes
/// of the image tangent line at the cusp, which keeps them disjoint.
struct CuspZone {
    branch: usize,
    cusp: f64,
    core: f64,
    lo: f64,
    hi: f64,
}

impl CuspZone {
    fn grow(spec: &MappingSpec, w: &BranchWindow, branch: usize, cusp: f64, step: f64, core: f64, samples: &[Sample]) -> Self {
        let mut zone = Self { branch, cusp, core, lo: cusp - core, hi: cusp + core };
        let image = |t: f64| spec.evaluate(w.branch.point(t));
        let gc = image(cusp);
        let bend = geom::sub(geom::add(image(cusp + step), image(cusp - step)), geom::scale(gc, 2.0));
        if geom::norm(bend) == 0.0 {
            return zone;
        }
        let normal = geom::perp(bend);
        let side = |s: &Sample| geom::dot(normal, geom::sub(s.image, gc)).signum();
        let left: Vec<&Sample> = samples.iter().rev().filter(|s| s.t < cusp - core).collect();
        let right: Vec<&Sample> = samples.iter().filter(|s| s.t > cusp + core).collect();
        let (Some(l0), Some(r0)) = (left.first(), right.first()) else { return zone };
        let (sl, sr) = (side(l0), side(r0));
        if sl * sr >= 0.0 {
            return zone;
        }
        let reach = |arm: &[&Sample], sign: f64| arm.iter().take_while(|s| side(s) == sign).last().map(|s| s.t);
        zone.lo = reach(&left, sl).unwrap_or(zone.lo);
        zone.hi = reach(&right, sr).unwrap_or(zone.hi);
        zone
    }

    fn side(&self, span: [f64; 2]) -> Option<i8> {
        if span[0] < self.lo || span[1] > self.hi {
            None
        } else if span[1] <= self.cusp {
            Some(-1)
        } else if span[0] >= self.cusp {
            Some(1)
        } else {
            Some(0)
        }
    }
}

struct Locality {
    zones: Vec<CuspZone>,
}

impl Locality {
    /// Whether two parameter spans on `branch` belong to one cusp germ and
    /// cannot share an image there.
    fn local(&self, branch: usize, s: [f64; 2], r: [f64; 2]) -> bool {
        self.zones.iter().filter(|z| z.branch == branch).any(|z| {
            let in_core = |x: [f64; 2]| (x[0] - z.cusp).abs() <= z.core && (x[1] - z.cusp).abs() <= z.core;
            if in_core(s) && in_core(r) {
                return true;
            }
            matches!((z.side(s), z.side(r)), (Some(a), Some(b)) if a * b < 0)
        })
    }
}

/// Total number of sub-segment pairs the refinement may examine.
const REFINE_BUDGET: usize = 200_000;
const REFINE_DEPTH: usize = 16;

#[derive(Clone, Copy)]
struct Span {
    branch: usize,
    t0: f64,
    t1: f64,
}

enum Refined {
    Separated,
    Double(WitnessPair),
    Unresolved,
}

struct Refiner<'a> {
    spec: &'a MappingSpec,
    windows: &'a [BranchWindow],
    locality: &'a Locality,
    tol: f64,
}

impl Refiner<'_> {
    /// Image chord of a parameter span and its deviation bound.
    fn chord(&self, s: Span) -> (Point, Point, f64) {
        let b = &self.windows[s.branch].branch;
        let (a, e) = (self.spec.evaluate(b.point(s.t0)), self.spec.evaluate(b.point(s.t1)));
        let mid = self.spec.evaluate(b.point(0.5 * (s.t0 + s.t1)));
        let chord_mid = geom::scale(geom::add(a, e), 0.5);
        (a, e, 2.0 * geom::dist(mid, chord_mid) + self.tol * (1.0 + geom::norm(mid)))
    }

    fn is_local(&self, s: Span, r: Span) -> bool {
        s.branch == r.branch && self.locality.local(s.branch, [s.t0, s.t1], [r.t0, r.t1])
    }

    fn refine(&self, s: Span, r: Span, depth: usize, budget: &mut usize) -> Refined {
        if *budget == 0 {
            return Refined::Unresolved;
        }
        *budget -= 1;
        let (a1, e1, slack1) = self.chord(s);
        let (a2, e2, slack2) = self.chord(r);
        if segment_distance(a1, e1, a2, e2) > slack1 + slack2 || self.is_local(s, r) {
            return Refined::Separated;
        }
        if depth == REFINE_DEPTH {
            let (b1, b2) = (&self.windows[s.branch].branch, &self.windows[r.branch].branch);
            let (m1, m2) = (0.5 * (s.t0 + s.t1), 0.5 * (r.t0 + r.t1));
            return match polish_double_point(self.spec, b1, b2, m1, m2, self.tol) {
                Some((w, u1, u2))
                    if !(s.branch == r.branch && self.locality.local(s.branch, [u1, u1], [u2, u2])) =>
                {
                    Refined::Double(w)
                }
                _ => Refined::Unresolved,
            };
        }
        let halves = |x: Span| {
            let m = 0.5 * (x.t0 + x.t1);
            [Span { t1: m, ..x }, Span { t0: m, ..x }]
        };
        let mut outcome = Refined::Separated;
        for hs in halves(s) {
            for hr in halves(r) {
                match self.refine(hs, hr, depth + 1, budget) {
                    Refined::Separated => {}
                    Refined::Double(w) => return Refined::Double(w),
                    Refined::Unresolved => outcome = Refined::Unresolved,
                }
            }
        }
        outcome
    }
}

fn exact_collision(
    samples: &[Sample],
    tol: f64,
    is_local: &dyn Fn(&Sample, &Sample) -> bool,
) -> Option<WitnessPair> {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&i, &j| samples[i].image[0].total_cmp(&samples[j].image[0]));
    for (k, &i) in order.iter().enumerate() {
        let s = &samples[i];
        for &j in &order[k + 1..] {
            let r = &samples[j];
            let scale = 1.0 + geom::norm(s.image).max(geom::norm(r.image));
            if r.image[0] - s.image[0] > tol * scale {
                break;
            }
            let separated = geom::dist(s.point, r.point) > 1e-6 * (1.0 + geom::norm(s.point))
                && !is_local(s, r);
            if separated && geom::dist(s.image, r.image) <= tol * scale {
                let (a, b) = if (s.branch, s.index) <= (r.branch, r.index) { (s, r) } else { (r, s) };
                return Some(WitnessPair {
                    first: a.point,
                    second: b.point,
                    first_image: a.image,
                    second_image: b.image,
                });
            }
        }
    }
    None
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = geom::sub(b, a);
    let len2 = geom::dot(ab, ab);
    if len2 == 0.0 {
        return geom::dist(p, a);
    }
    let t = (geom::dot(geom::sub(p, a), ab) / len2).clamp(0.0, 1.0);
    geom::dist(p, geom::add(a, geom::scale(ab, t)))
}

fn segment_distance(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let o1 = geom::cross(geom::sub(b, a), geom::sub(c, a));
    let o2 = geom::cross(geom::sub(b, a), geom::sub(d, a));
    let o3 = geom::cross(geom::sub(d, c), geom::sub(a, c));
    let o4 = geom::cross(geom::sub(d, c), geom::sub(b, c));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Newton iteration on `G(γ1(t1)) - G(γ2(t2)) = 0`. Succeeds only for two
/// well-separated source points.
fn polish_double_point(
    spec: &MappingSpec,
    b1: &Branch,
    b2: &Branch,
    mut t1: f64,
    mut t2: f64,
    tol: f64,
) -> Option<(WitnessPair, f64, f64)> {
    for _ in 0..60 {
        let (p, q) = (b1.point(t1), b2.point(t2));
        let (gp, gq) = (spec.evaluate(p), spec.evaluate(q));
        let f = geom::sub(gp, gq);
        let scale = 1.0 + geom::norm(gp);
        if geom::norm(f) <= tol * scale {
            if geom::dist(p, q) > 1e-6 * (1.0 + geom::norm(p)) {
                return Some((WitnessPair { first: p, second: q, first_image: gp, second_image: gq }, t1, t2));
            }
            return None;
        }
        let c1 = geom::mat_vec(&spec.jacobian(p), b1.velocity(t1));
        let c2 = geom::scale(geom::mat_vec(&spec.jacobian(q), b2.velocity(t2)), -1.0);
        let m = [[c1[0], c2[0]], [c1[1], c2[1]]];
        let inv = geom::inverse(&m)?;
        let step = geom::mat_vec(&inv, f);
        t1 -= step[0];
        t2 -= step[1];
        if !(t1.is_finite() && t2.is_finite()) {
            return None;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::{CuspMap, FoldMap};

    fn spec(p0: Point, p1: Point, a: Mat2) -> MappingSpec {
        MappingSpec::new(p0, p1, a).unwrap()
    }

    fn e1() -> MappingSpec {
        spec([0.0, 0.0], [1.0, 1.0], [[1.0, 1.0], [1.0, 2.0]])
    }

    fn e2() -> MappingSpec {
        spec([0.0, 0.0], [1.0, 1.0], [[1.0, 1.0], [1.0, 3.0]])
    }

    fn r1() -> MappingSpec {
        spec([0.0, 0.0], [1.0, 1.0], [[1.0, 1.0], [1.0, 1.0]])
    }

    #[test]
    fn e1_singular_hyperbola() {
        let SingularCurve::Hyperbola(h) = singular_set(&e1()).unwrap() else { panic!() };
        assert_eq!(h.center(), [-1.0, 2.0]);
        for i in 0..100 {
            let x = -5.0 + 0.1 * i as f64 + 0.013;
            assert!((h.phi(x) - 2.0 * x / (x + 1.0)).abs() < 1e-12);
            assert!(e1().det_jacobian([x, h.phi(x)]).abs() < 1e-10);
        }
    }

    #[test]
    fn e2_singular_hyperbola() {
        let SingularCurve::Hyperbola(h) = singular_set(&e2()).unwrap() else { panic!() };
        assert_eq!(h.center(), [-0.5, 1.5]);
        for x in [-3.0, -1.0, 0.0, 0.7, 2.5] {
            assert!((h.phi(x) - 3.0 * x / (2.0 * x + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_singular_line() {
        let SingularCurve::Line { point, direction } = singular_set(&r1()).unwrap() else { panic!() };
        for t in [-2.0, 0.5, 3.0] {
            let p = geom::add(point, geom::scale(direction, t));
            assert!((p[0] - p[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn non_generic_rejected() {
        let s = spec([0.0, 0.0], [0.0, 1.0], [[1.0, 1.0], [1.0, 2.0]]);
        assert_eq!(singular_set(&s), Err(Error::NonGenericSpec));
        assert_eq!(cusp_point(&s).unwrap_err(), Error::NonGenericSpec);
        assert_eq!(classify_singular_set(&s, 10).unwrap_err(), Error::NonGenericSpec);
    }

    #[test]
    fn hyperbola_constant_matches_det_coefficients() {
        let s = spec([0.3, -1.2], [1.7, 0.4], [[2.0, -0.5], [1.5, 0.8]]);
        let h = hyperbola_of(&s);
        let c = s.det_coefficients();
        let k = (c.c_x * c.c_y - c.c_0 * c.c_xy) / (c.c_xy * c.c_xy);
        assert!((h.k - k).abs() < 1e-12 * (1.0 + k.abs()));
    }

    #[test]
    fn normal_forms_classify() {
        let tol = Tolerances::default();
        assert_eq!(classify_point(&FoldMap, [0.0, 0.0], &tol), Ok(SingularityClass::Fold));
        assert_eq!(classify_point(&CuspMap, [0.0, 0.0], &tol), Ok(SingularityClass::Cusp));
        assert_eq!(classify_point(&e1(), [0.0, 0.0], &tol), Ok(SingularityClass::Fold));
        assert!(matches!(classify_point(&FoldMap, [0.0, 1.0], &tol), Err(Error::NotSingular { .. })));
        assert_eq!(classify_any(&FoldMap, [0.0, 1.0], &tol), Ok(SingularityClass::Regular));
    }

    #[test]
    fn e1_origin_fold_by_finite_differences() {
        let h = hyperbola_of(&e1());
        let g = |x: f64| e1().evaluate([x, h.phi(x)]);
        let d = oracle::fd_derivative_vec(g, 0.0, 1, 1e-5);
        assert!(geom::norm(d) > 1.0);
    }

    #[test]
    fn critical_gradient_zero() {
        struct Flat;
        impl PlaneMap for Flat {
            fn value(&self, p: Point) -> Point {
                [p[0] * p[0], p[1] * p[1]]
            }
            fn jacobian(&self, p: Point) -> Mat2 {
                [[2.0 * p[0], 0.0], [0.0, 2.0 * p[1]]]
            }
            fn hessians(&self, _: Point) -> [Mat2; 2] {
                [geom::diag(2.0, 0.0), geom::diag(0.0, 2.0)]
            }
            fn third_partials(&self, _: Point) -> [[f64; 4]; 2] {
                [[0.0; 4]; 2]
            }
        }
        assert_eq!(
            classify_point(&Flat, [0.0, 0.0], &Tolerances::default()),
            Err(Error::CriticalGradientZero { p: [0.0, 0.0] })
        );
    }

    #[test]
    fn e1_cusp_closed_form() {
        let c = cusp_point(&e1()).unwrap();
        let x = -1.0 - 4f64.cbrt();
        let y = 2.0 + 2f64.cbrt();
        assert!((c.point[0] - x).abs() < 1e-12);
        assert!((c.point[1] - y).abs() < 1e-12);
        assert!((c.y_closed_form - y).abs() < 1e-12);
        assert!((c.point[1] - 2.0 * c.point[0] / (c.point[0] + 1.0)).abs() < 1e-12);
        assert!(c.first_derivative_residual <= 1e-8);
        assert!(c.second_derivative_norm >= 1e-6);
    }

    #[test]
    fn e2_cusp_closed_form() {
        let c = cusp_point(&e2()).unwrap();
        let x = (-(9f64.cbrt()) - 1.0) / 2.0;
        let y = (3f64.cbrt() + 3.0) / 2.0;
        assert!((c.point[0] - x).abs() < 1e-12);
        assert!((c.point[1] - y).abs() < 1e-12);
        assert!((c.point[0] + 1.540042).abs() < 1e-6);
        assert!((c.point[1] - 2.221125).abs() < 1e-6);
    }

    #[test]
    fn cusp_requires_rank_two() {
        assert_eq!(cusp_point(&r1()).unwrap_err(), Error::RankOneSpec);
    }

    #[test]
    fn cusp_oracle_by_bisection() {
        // g'(x) along φ, projected onto the first Jacobian column.
        let s = e1();
        let sigma = |x: f64| {
            let (g, _) = graph_derivatives(&s, x);
            let j = s.jacobian([x, hyperbola_of(&s).phi(x)]);
            g[0] * j[0][0] + g[1] * j[1][0]
        };
        let root = oracle::root_find(sigma, -4.0, -1.1, 1e-12).unwrap();
        assert!((root - (-1.0 - 4f64.cbrt())).abs() < 1e-9);
    }

    #[test]
    fn e1_classification_has_one_cusp() {
        let pts = classify_singular_set(&e1(), 200).unwrap();
        assert_eq!(cusp_clusters(&pts), 1);
        let cusp = pts.iter().find(|p| p.class == SingularityClass::Cusp).unwrap();
        assert!((cusp.point[0] + 2.587401).abs() < 1e-6);
        assert!((cusp.point[1] - 3.259921).abs() < 1e-6);
        let folds = pts.iter().filter(|p| p.class == SingularityClass::Fold).count();
        assert_eq!(folds + 1, pts.len());
    }

    #[test]
    fn e2_classification_has_one_cusp() {
        let pts = classify_singular_set(&e2(), 200).unwrap();
        assert_eq!(cusp_clusters(&pts), 1);
    }

    #[test]
    fn rank_one_all_folds() {
        let pts = classify_singular_set(&r1(), 100).unwrap();
        assert_eq!(pts.len(), 100);
        assert!(pts.iter().all(|p| p.class == SingularityClass::Fold));
    }

    #[test]
    fn base_points_on_singular_set() {
        let s = spec([0.4, -0.3], [-1.1, 1.9], [[1.3, -0.7], [0.9, 2.2]]);
        let SingularCurve::Hyperbola(h) = singular_set(&s).unwrap() else { panic!() };
        for p in [s.p0(), s.p1()] {
            assert!((h.phi(p[0]) - p[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn asymptotic_limit() {
        let SingularCurve::Hyperbola(h) = singular_set(&e1()).unwrap() else { panic!() };
        for x in [h.x_c + 1e6, h.x_c - 1e6] {
            assert!((h.phi(x) - h.y_c).abs() < 1e-3);
        }
    }

    #[test]
    fn branch_parametrization_is_c1() {
        let h = Hyperbola::new(-1.0, 2.0, -2.0);
        for side in [-1.0, 1.0] {
            let b = Branch::HyperbolaArm { curve: h, side };
            for t in [-3.0, -0.5, 0.0, 0.5, 3.0] {
                let p = b.point(t);
                assert!((h.phi(p[0]) - p[1]).abs() < 1e-12);
                assert!((b.param_of(p) - t).abs() < 1e-12);
                let fd = oracle::fd_derivative_vec(|s| b.point(s), t + 1e-3, 1, 1e-5);
                let v = b.velocity(t + 1e-3);
                assert!(geom::dist(fd, v) < 1e-6);
            }
            let (l, r) = (b.velocity(-1e-12), b.velocity(0.0));
            assert!(geom::dist(l, r) < 1e-9);
        }
    }

    #[test]
    fn injectivity_examples() {
        let sampling = InjectivitySampling { samples_per_branch: 800, ..Default::default() };
        let e1_cert = restricted_injectivity(&e1(), &sampling);
        assert_eq!(e1_cert.verdict, InjectivityVerdict::Injective, "{e1_cert:?}");
        assert_eq!(restricted_injectivity(&r1(), &sampling).verdict, InjectivityVerdict::Injective);

        let fq = MappingSpec::f_q([0.5, 0.0], 1.0, 2.0).unwrap();
        let cert = restricted_injectivity(&fq, &sampling);
        assert_eq!(cert.verdict, InjectivityVerdict::NonInjective);
        let w = cert.witness.unwrap();
        assert!((w.first[0] - w.second[0]).abs() < 1e-12);
        assert!((w.first[1] + w.second[1]).abs() < 1e-9);
        assert!(geom::dist(fq.evaluate(w.first), fq.evaluate(w.second)) < 1e-9);
    }
}
