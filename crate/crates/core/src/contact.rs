//! Contact between the two conic foliations of `F_q`.
//!
//! The first component of `F_q = (|x - q|², a x² + b y²)` foliates the plane
//! by circles centred at `q`, the second by ellipses centred at the origin.
//! A point is singular for `F_q` exactly when the two leaves through it are
//! tangent, and it is a cusp exactly when the circle is moreover the
//! osculating circle of the ellipse.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::mapping::MappingSpec;
use crate::oracle;
use crate::singular;

/// The ellipses `a x² + b y² = c`, `c > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseFamily {
    pub a: f64,
    pub b: f64,
}

impl EllipseFamily {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::BadTargets { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn level(&self, p: Point) -> f64 {
        self.a * p[0] * p[0] + self.b * p[1] * p[1]
    }

    /// The member through `p`.
    pub fn member_through(&self, p: Point) -> Result<EllipseMember> {
        if p == [0.0, 0.0] {
            return Err(Error::OriginPoint);
        }
        let c = self.level(p);
        Ok(EllipseMember::new((c / self.a).sqrt(), (c / self.b).sqrt()))
    }
}

/// The circles `|x - center|² = c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleFamily {
    pub center: Point,
}

impl CircleFamily {
    pub fn level(&self, p: Point) -> f64 {
        let d = geom::sub(p, self.center);
        geom::dot(d, d)
    }
}

/// Frenet data at one point of a plane curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePointData {
    pub point: Point,
    pub tangent: Point,
    /// The tangent rotated by +90 degrees.
    pub normal: Point,
    /// Signed curvature with respect to `normal`.
    pub curvature: f64,
    /// Derivative of the curvature with respect to arc length.
    pub curvature_derivative: f64,
    /// `point + normal / curvature`; `None` where the curvature vanishes.
    pub center: Option<Point>,
}

impl CurvePointData {
    fn from_frame(point: Point, tangent: Point, curvature: f64, curvature_derivative: f64) -> Self {
        let normal = geom::perp(tangent);
        let center = (curvature != 0.0).then(|| geom::add(point, geom::scale(normal, 1.0 / curvature)));
        Self { point, tangent, normal, curvature, curvature_derivative, center }
    }
}

/// A plane curve parametrized by arc length.
pub trait UnitSpeedCurve {
    fn frame(&self, s: f64) -> CurvePointData;

    fn point(&self, s: f64) -> Point {
        self.frame(s).point
    }
}

/// The ellipse `(A cos θ, B sin θ)`, traversed counterclockwise with arc
/// length measured from `(A, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseMember {
    pub semi_x: f64,
    pub semi_y: f64,
}

const ARC_TOL: f64 = 1e-14;

impl EllipseMember {
    pub fn new(semi_x: f64, semi_y: f64) -> Self {
        Self { semi_x, semi_y }
    }

    fn speed(&self, theta: f64) -> f64 {
        (self.semi_x * theta.sin()).hypot(self.semi_y * theta.cos())
    }

    pub fn angle_of(&self, p: Point) -> f64 {
        (p[1] / self.semi_y).atan2(p[0] / self.semi_x)
    }

    pub fn arc_length(&self, theta: f64) -> f64 {
        oracle::integrate(|t| self.speed(t), 0.0, theta, ARC_TOL * (1.0 + theta.abs()))
    }

    /// Inverse of [`arc_length`](Self::arc_length) by Newton's method.
    pub fn angle_at(&self, s: f64) -> f64 {
        let mean = 0.5 * (self.semi_x + self.semi_y);
        let mut theta = s / mean;
        for _ in 0..50 {
            let step = (self.arc_length(theta) - s) / self.speed(theta);
            theta -= step;
            if step.abs() <= 1e-15 * (1.0 + theta.abs()) {
                break;
            }
        }
        theta
    }

    pub fn frame_at_angle(&self, theta: f64) -> CurvePointData {
        let (a, b) = (self.semi_x, self.semi_y);
        let (s, c) = theta.sin_cos();
        let v = self.speed(theta);
        let point = [a * c, b * s];
        let tangent = [-a * s / v, b * c / v];
        let k = a * b / v.powi(3);
        let dk = -3.0 * a * b * (a * a - b * b) * s * c / v.powi(6);
        CurvePointData::from_frame(point, tangent, k, dk)
    }
}

impl UnitSpeedCurve for EllipseMember {
    fn frame(&self, s: f64) -> CurvePointData {
        self.frame_at_angle(self.angle_at(s))
    }
}

/// Circle of radius `radius` about `center`, counterclockwise from the
/// rightmost point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl UnitSpeedCurve for Circle {
    fn frame(&self, s: f64) -> CurvePointData {
        let (sn, cs) = (s / self.radius).sin_cos();
        let point = geom::add(self.center, [self.radius * cs, self.radius * sn]);
        CurvePointData::from_frame(point, [-sn, cs], 1.0 / self.radius, 0.0)
    }
}

/// Frenet data of the member of `fam` through `p`.
pub fn ellipse_point_data(fam: &EllipseFamily, p: Point) -> Result<CurvePointData> {
    let member = fam.member_through(p)?;
    let mut data = member.frame_at_angle(member.angle_of(p));
    data.point = p;
    if let Some(c) = data.center.as_mut() {
        *c = geom::add(p, geom::scale(data.normal, 1.0 / data.curvature));
    }
    Ok(data)
}

/// First three arc-length derivatives of `s ↦ |α(s) - q|²`.
pub fn distance_function_derivatives(curve: &dyn UnitSpeedCurve, q: Point, s: f64) -> [f64; 3] {
    derivatives_from_frame(&curve.frame(s), q)
}

fn derivatives_from_frame(d: &CurvePointData, q: Point) -> [f64; 3] {
    let r = geom::sub(d.point, q);
    let (rt, rn) = (geom::dot(r, d.tangent), geom::dot(r, d.normal));
    let k = d.curvature;
    [2.0 * rt, 2.0 * (1.0 + k * rn), 2.0 * (d.curvature_derivative * rn - k * k * rt)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContactClass {
    Transverse,
    FoldContact,
    CuspContact,
    /// The ellipse member is a circle centred at `q`: the leaves coincide.
    DegenerateContact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactTolerances {
    /// `|(p - q) · t|` relative to `|p - q|`.
    pub tangency: f64,
    /// `|center - q|` relative to `1 + |p| + |q|`.
    pub center: f64,
}

impl Default for ContactTolerances {
    fn default() -> Self {
        Self { tangency: 1e-8, center: 1e-8 }
    }
}

pub fn classify_by_contact(q: Point, fam: &EllipseFamily, p: Point) -> Result<ContactClass> {
    classify_by_contact_with(q, fam, p, &ContactTolerances::default())
}

pub fn classify_by_contact_with(
    q: Point,
    fam: &EllipseFamily,
    p: Point,
    tol: &ContactTolerances,
) -> Result<ContactClass> {
    let data = ellipse_point_data(fam, p)?;
    let r = geom::sub(p, q);
    let len = geom::norm(r);
    if len == 0.0 {
        return Err(Error::CoincidentPoint);
    }
    if geom::dot(r, data.tangent).abs() > tol.tangency * len {
        return Ok(ContactClass::Transverse);
    }
    let scale = 1.0 + geom::norm(p) + geom::norm(q);
    match data.center {
        Some(c) if geom::dist(c, q) <= tol.center * scale => {
            if fam.a == fam.b {
                Ok(ContactClass::DegenerateContact)
            } else {
                Ok(ContactClass::CuspContact)
            }
        }
        _ => Ok(ContactClass::FoldContact),
    }
}

const SCAN: usize = 4000;

/// The unique point where the circle about `q` osculates the ellipse of
/// `fam` through it, located on the tangency locus of the two foliations.
pub fn coinciding_osculating_point(q: Point, fam: &EllipseFamily) -> Result<Point> {
    if fam.a == fam.b {
        return Err(Error::BadTargets { a: fam.a, b: fam.b });
    }
    if q[0] == 0.0 || q[1] == 0.0 {
        return Err(Error::DegenerateQ { q });
    }
    let fq = MappingSpec::f_q(q, fam.a, fam.b)?;
    let scale = 1.0 + geom::norm(q);

    // signed distance from q to the centre of curvature along the normal
    let residual = |branch: &singular::Branch, t: f64| -> Option<f64> {
        let p = branch.point(t);
        if geom::norm(p) <= 1e-9 * scale {
            return None;
        }
        let d = ellipse_point_data(fam, p).ok()?;
        Some(geom::dot(geom::sub(d.center?, q), d.normal))
    };

    let mut roots: Vec<Point> = Vec::new();
    for w in singular::sampling_windows(&fq)? {
        let ts = w.params(SCAN);
        for pair in ts.windows(2) {
            let (Some(r0), Some(r1)) = (residual(&w.branch, pair[0]), residual(&w.branch, pair[1])) else {
                continue;
            };
            if r0.signum() == r1.signum() {
                continue;
            }
            let f = |t: f64| residual(&w.branch, t).unwrap_or(f64::NAN);
            let t = oracle::root_find(f, pair[0], pair[1], oracle::DEFAULT_ROOT_TOL)?;
            let p = w.branch.point(t);
            let genuine = residual(&w.branch, t).is_some_and(|r| r.abs() <= 1e-6 * scale)
                && classify_by_contact_with(q, fam, p, &ContactTolerances { tangency: 1e-8, center: 1e-6 })
                    == Ok(ContactClass::CuspContact);
            if genuine && roots.iter().all(|r| geom::dist(*r, p) > 1e-7 * scale) {
                roots.push(p);
            }
        }
    }
    match roots.as_slice() {
        [p] => Ok(*p),
        _ => Err(Error::NoUniqueRoot { found: roots.len() }),
    }
}
