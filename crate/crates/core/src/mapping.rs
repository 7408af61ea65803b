//! Mapping configurations and their exact evaluation.
//!
//! A [`MappingSpec`] is the plane-to-plane generalized distance-squared
//! mapping
//!
//! ```text
//! G(x, y) = (a00 (x - p00)² + a01 (y - p01)²,  a10 (x - p10)² + a11 (y - p11)²)
//! ```
//!
//! Everything that needs derivatives goes through the [`PlaneMap`] trait so the
//! same classification code runs on `G`, on the normal forms and on maps
//! produced by replaying a coordinate-change transcript.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Mat2, Point};

/// Third partials of one component, ordered `[fxxx, fxxy, fxyy, fyyy]`.
pub type ThirdPartials = [f64; 4];

const FD_STEP: f64 = 1e-5;

/// A smooth mapping of the plane into the plane.
///
/// Only `value` is required. The derivative methods fall back to centered
/// finite differences; every map in this crate overrides them with closed
/// forms.
pub trait PlaneMap: Send + Sync {
    fn value(&self, p: Point) -> Point;

    /// Row `i` holds the gradient of component `i`.
    fn jacobian(&self, p: Point) -> Mat2 {
        let h = FD_STEP * (1.0 + geom::norm(p));
        let mut j = [[0.0; 2]; 2];
        for axis in 0..2 {
            let mut fwd = p;
            let mut bwd = p;
            fwd[axis] += h;
            bwd[axis] -= h;
            let (f, b) = (self.value(fwd), self.value(bwd));
            for comp in 0..2 {
                j[comp][axis] = (f[comp] - b[comp]) / (2.0 * h);
            }
        }
        j
    }

    /// Hessian of each component.
    fn hessians(&self, p: Point) -> [Mat2; 2] {
        let h = FD_STEP * (1.0 + geom::norm(p));
        let mut out = [[[0.0; 2]; 2]; 2];
        for axis in 0..2 {
            let mut fwd = p;
            let mut bwd = p;
            fwd[axis] += h;
            bwd[axis] -= h;
            let (f, b) = (self.jacobian(fwd), self.jacobian(bwd));
            for comp in 0..2 {
                for k in 0..2 {
                    out[comp][k][axis] = (f[comp][k] - b[comp][k]) / (2.0 * h);
                }
            }
        }
        out
    }

    fn third_partials(&self, p: Point) -> [ThirdPartials; 2] {
        let h = FD_STEP * (1.0 + geom::norm(p));
        let hx = |s: f64| self.hessians([p[0] + s, p[1]]);
        let hy = |s: f64| self.hessians([p[0], p[1] + s]);
        let (xf, xb, yf, yb) = (hx(h), hx(-h), hy(h), hy(-h));
        let mut out = [[0.0; 4]; 2];
        for comp in 0..2 {
            let dx = |i: usize, k: usize| (xf[comp][i][k] - xb[comp][i][k]) / (2.0 * h);
            let dy = |i: usize, k: usize| (yf[comp][i][k] - yb[comp][i][k]) / (2.0 * h);
            out[comp] = [dx(0, 0), dy(0, 0), dx(1, 1), dy(1, 1)];
        }
        out
    }

    fn det_jacobian(&self, p: Point) -> f64 {
        geom::det(&self.jacobian(p))
    }
}

impl<M: PlaneMap + ?Sized> PlaneMap for &M {
    fn value(&self, p: Point) -> Point {
        (**self).value(p)
    }
    fn jacobian(&self, p: Point) -> Mat2 {
        (**self).jacobian(p)
    }
    fn hessians(&self, p: Point) -> [Mat2; 2] {
        (**self).hessians(p)
    }
    fn third_partials(&self, p: Point) -> [ThirdPartials; 2] {
        (**self).third_partials(p)
    }
    fn det_jacobian(&self, p: Point) -> f64 {
        (**self).det_jacobian(p)
    }
}

impl<M: PlaneMap + ?Sized> PlaneMap for Box<M> {
    fn value(&self, p: Point) -> Point {
        (**self).value(p)
    }
    fn jacobian(&self, p: Point) -> Mat2 {
        (**self).jacobian(p)
    }
    fn hessians(&self, p: Point) -> [Mat2; 2] {
        (**self).hessians(p)
    }
    fn third_partials(&self, p: Point) -> [ThirdPartials; 2] {
        (**self).third_partials(p)
    }
    fn det_jacobian(&self, p: Point) -> f64 {
        (**self).det_jacobian(p)
    }
}

/// Rank of the coefficient matrix, decided exactly on the input values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rank {
    One,
    Two,
}

impl Rank {
    pub fn as_usize(self) -> usize {
        match self {
            Rank::One => 1,
            Rank::Two => 2,
        }
    }
}

/// Base points `p0`, `p1` and the coefficient matrix `A` of a plane-to-plane
/// generalized distance-squared mapping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MappingSpec {
    p0: Point,
    p1: Point,
    a: Mat2,
}

/// Coefficients of `det J / 4 = c_xy·xy + c_y·y + c_x·x + c_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetCoefficients {
    pub c_xy: f64,
    pub c_y: f64,
    pub c_x: f64,
    pub c_0: f64,
}

impl MappingSpec {
    pub fn new(p0: Point, p1: Point, a: Mat2) -> Result<Self> {
        let all = p0.iter().chain(p1.iter()).chain(a.iter().flatten());
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        for (row, r) in a.iter().enumerate() {
            for (col, v) in r.iter().enumerate() {
                if *v == 0.0 {
                    return Err(Error::ZeroEntry { row, col });
                }
            }
        }
        Ok(Self { p0, p1, a })
    }

    /// The rank-two normal form `F_q = (|x - q|², a x² + b y²)`, i.e. the
    /// spec with `p0 = q`, `p1 = 0` and `A = [[1, 1], [a, b]]`.
    pub fn f_q(q: Point, a: f64, b: f64) -> Result<Self> {
        Self::new(q, [0.0, 0.0], [[1.0, 1.0], [a, b]])
    }

    /// Distance-squared model `D` with base points `p0`, `p1`.
    pub fn distance_squared(p0: Point, p1: Point) -> Result<Self> {
        Self::new(p0, p1, [[1.0, 1.0], [1.0, 1.0]])
    }

    /// Lorentzian model `L` with base points `p0`, `p1`.
    pub fn lorentzian(p0: Point, p1: Point) -> Result<Self> {
        Self::new(p0, p1, [[-1.0, 1.0], [-1.0, 1.0]])
    }

    pub fn p0(&self) -> Point {
        self.p0
    }

    pub fn p1(&self) -> Point {
        self.p1
    }

    pub fn matrix(&self) -> Mat2 {
        self.a
    }

    pub fn det_a(&self) -> f64 {
        geom::det(&self.a)
    }

    pub fn rank(&self) -> Rank {
        if self.det_a() != 0.0 {
            Rank::Two
        } else {
            Rank::One
        }
    }

    /// True off the hypersurface `(p00 - p10)(p01 - p11) = 0`.
    pub fn is_generic(&self) -> bool {
        self.p0[0] != self.p1[0] && self.p0[1] != self.p1[1]
    }

    pub fn evaluate(&self, p: Point) -> Point {
        let [[a00, a01], [a10, a11]] = self.a;
        let (dx0, dy0) = (p[0] - self.p0[0], p[1] - self.p0[1]);
        let (dx1, dy1) = (p[0] - self.p1[0], p[1] - self.p1[1]);
        [a00 * dx0 * dx0 + a01 * dy0 * dy0, a10 * dx1 * dx1 + a11 * dy1 * dy1]
    }

    /// Entry `(i, j)` is `2 a_ij (coordinate_j - p_ij)`.
    pub fn jacobian(&self, p: Point) -> Mat2 {
        let [[a00, a01], [a10, a11]] = self.a;
        [
            [2.0 * a00 * (p[0] - self.p0[0]), 2.0 * a01 * (p[1] - self.p0[1])],
            [2.0 * a10 * (p[0] - self.p1[0]), 2.0 * a11 * (p[1] - self.p1[1])],
        ]
    }

    pub fn det_coefficients(&self) -> DetCoefficients {
        let [[a00, a01], [a10, a11]] = self.a;
        let (m, n) = (a00 * a11, a01 * a10);
        let ([p00, p01], [p10, p11]) = (self.p0, self.p1);
        DetCoefficients {
            c_xy: m - n,
            c_y: -m * p00 + n * p10,
            c_x: -m * p11 + n * p01,
            c_0: m * p00 * p11 - n * p01 * p10,
        }
    }

    /// Expanded closed form of the Jacobian determinant.
    pub fn det_jacobian(&self, p: Point) -> f64 {
        let c = self.det_coefficients();
        let [x, y] = p;
        4.0 * ((c.c_xy * x + c.c_y) * y + c.c_x * x + c.c_0)
    }

    /// Gradient of the Jacobian determinant.
    pub fn det_gradient(&self, p: Point) -> Point {
        let c = self.det_coefficients();
        [4.0 * (c.c_xy * p[1] + c.c_x), 4.0 * (c.c_xy * p[0] + c.c_y)]
    }

    pub fn to_general(&self) -> GeneralMappingSpec {
        GeneralMappingSpec {
            points: vec![self.p0.to_vec(), self.p1.to_vec()],
            matrix: self.a.iter().map(|r| r.to_vec()).collect(),
        }
    }
}

impl PlaneMap for MappingSpec {
    fn value(&self, p: Point) -> Point {
        self.evaluate(p)
    }

    fn jacobian(&self, p: Point) -> Mat2 {
        MappingSpec::jacobian(self, p)
    }

    fn hessians(&self, _p: Point) -> [Mat2; 2] {
        let [[a00, a01], [a10, a11]] = self.a;
        [geom::diag(2.0 * a00, 2.0 * a01), geom::diag(2.0 * a10, 2.0 * a11)]
    }

    fn third_partials(&self, _p: Point) -> [ThirdPartials; 2] {
        [[0.0; 4]; 2]
    }

    fn det_jacobian(&self, p: Point) -> f64 {
        MappingSpec::det_jacobian(self, p)
    }
}

/// `G : R^(n+1) → R^(k+1)` with base points `p_0..p_k` and a `(k+1)×(n+1)`
/// coefficient matrix. Only pointwise evaluation is provided.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralMappingSpec {
    points: Vec<Vec<f64>>,
    matrix: Vec<Vec<f64>>,
}

impl GeneralMappingSpec {
    pub fn new(points: Vec<Vec<f64>>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        let rows = points.len();
        if rows == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if matrix.len() != rows {
            return Err(Error::DimensionMismatch { expected: rows, got: matrix.len() });
        }
        let dim = points[0].len();
        for v in points.iter().chain(matrix.iter()) {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        for (row, r) in matrix.iter().enumerate() {
            if let Some(col) = r.iter().position(|v| *v == 0.0) {
                return Err(Error::ZeroEntry { row, col });
            }
        }
        Ok(Self { points, matrix })
    }

    /// Dimension `n + 1` of the source.
    pub fn source_dim(&self) -> usize {
        self.points[0].len()
    }

    /// Dimension `k + 1` of the target.
    pub fn target_dim(&self) -> usize {
        self.points.len()
    }

    /// Component `i` is `Σ_j a_ij (x_j - p_ij)²`.
    pub fn evaluate(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.source_dim() {
            return Err(Error::DimensionMismatch { expected: self.source_dim(), got: p.len() });
        }
        Ok(self
            .points
            .iter()
            .zip(&self.matrix)
            .map(|(base, row)| {
                row.iter()
                    .zip(base)
                    .zip(p)
                    .map(|((a, b), x)| a * (x - b) * (x - b))
                    .sum()
            })
            .collect())
    }
}

/// The fold normal form `Φ2(x, y) = (x, y²)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FoldMap;

impl PlaneMap for FoldMap {
    fn value(&self, p: Point) -> Point {
        [p[0], p[1] * p[1]]
    }
    fn jacobian(&self, p: Point) -> Mat2 {
        [[1.0, 0.0], [0.0, 2.0 * p[1]]]
    }
    fn hessians(&self, _p: Point) -> [Mat2; 2] {
        [[[0.0; 2]; 2], geom::diag(0.0, 2.0)]
    }
    fn third_partials(&self, _p: Point) -> [ThirdPartials; 2] {
        [[0.0; 4]; 2]
    }
}

/// The cusp normal form `Γ2(x, y) = (x, y³ + xy)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CuspMap;

impl PlaneMap for CuspMap {
    fn value(&self, p: Point) -> Point {
        let [x, y] = p;
        [x, y * y * y + x * y]
    }
    fn jacobian(&self, p: Point) -> Mat2 {
        let [x, y] = p;
        [[1.0, 0.0], [y, 3.0 * y * y + x]]
    }
    fn hessians(&self, p: Point) -> [Mat2; 2] {
        [[[0.0; 2]; 2], [[0.0, 1.0], [1.0, 6.0 * p[1]]]]
    }
    fn third_partials(&self, _p: Point) -> [ThirdPartials; 2] {
        [[0.0; 4], [0.0, 0.0, 0.0, 6.0]]
    }
}

/// `Δ4+(x, y, u, v) = (x² + u y, y² + v x, u, v)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct D4PlusMap;

impl D4PlusMap {
    pub fn evaluate(&self, p: [f64; 4]) -> [f64; 4] {
        let [x, y, u, v] = p;
        [x * x + u * y, y * y + v * x, u, v]
    }

    /// The planar slice at fixed unfolding parameters `(u, v)`.
    pub fn slice(&self, u: f64, v: f64) -> CanonicalQuadraticMap {
        CanonicalQuadraticMap { coefficients: [0.0, u, v, 0.0] }
    }
}

/// `(x² + b00 x + b01 y, y² + b10 x + b11 y)`; coefficients may be zero here,
/// unlike the validated `CanonicalQuadratic` in `normal_forms`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalQuadraticMap {
    pub coefficients: [f64; 4],
}

impl PlaneMap for CanonicalQuadraticMap {
    fn value(&self, p: Point) -> Point {
        let [b00, b01, b10, b11] = self.coefficients;
        let [x, y] = p;
        [x * x + b00 * x + b01 * y, y * y + b10 * x + b11 * y]
    }
    fn jacobian(&self, p: Point) -> Mat2 {
        let [b00, b01, b10, b11] = self.coefficients;
        [[2.0 * p[0] + b00, b01], [b10, 2.0 * p[1] + b11]]
    }
    fn hessians(&self, _p: Point) -> [Mat2; 2] {
        [geom::diag(2.0, 0.0), geom::diag(0.0, 2.0)]
    }
    fn third_partials(&self, _p: Point) -> [ThirdPartials; 2] {
        [[0.0; 4]; 2]
    }
}

/// The model maps a classification can land on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalFormModel {
    /// `Φ2`
    Fold,
    /// `Γ2`
    Cusp,
    /// `Δ4+`, a map of 4-space.
    D4Plus,
    /// `D`
    DistanceSquared,
    /// `L`
    Lorentzian,
}

impl NormalFormModel {
    pub fn formula(self) -> &'static str {
        match self {
            NormalFormModel::Fold => "(x, y^2)",
            NormalFormModel::Cusp => "(x, y^3 + x y)",
            NormalFormModel::D4Plus => "(x^2 + u y, y^2 + v x, u, v)",
            NormalFormModel::DistanceSquared => "((x - p00)^2 + (y - p01)^2, (x - p10)^2 + (y - p11)^2)",
            NormalFormModel::Lorentzian => "(-(x - p00)^2 + (y - p01)^2, -(x - p10)^2 + (y - p11)^2)",
        }
    }

    /// Evaluatable plane map for the model. `D` and `L` need base points;
    /// `Δ4+` is not a plane map and yields `None` (use [`D4PlusMap`]).
    pub fn plane_map(self, base: Option<(Point, Point)>) -> Option<Box<dyn PlaneMap>> {
        match self {
            NormalFormModel::Fold => Some(Box::new(FoldMap)),
            NormalFormModel::Cusp => Some(Box::new(CuspMap)),
            NormalFormModel::D4Plus => None,
            NormalFormModel::DistanceSquared => {
                let (p0, p1) = base?;
                MappingSpec::distance_squared(p0, p1).ok().map(|m| Box::new(m) as Box<dyn PlaneMap>)
            }
            NormalFormModel::Lorentzian => {
                let (p0, p1) = base?;
                MappingSpec::lorentzian(p0, p1).ok().map(|m| Box::new(m) as Box<dyn PlaneMap>)
            }
        }
    }
}
