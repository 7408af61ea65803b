use thiserror::Error;

use crate::geom::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix entry ({row}, {col}) is zero")]
    ZeroEntry { row: usize, col: usize },
    #[error("input contains a non-finite value")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("base points lie on the non-generic set (p00 - p10)(p01 - p11) = 0")]
    NonGenericSpec,
    #[error("coefficient matrix has rank one")]
    RankOneSpec,
    #[error("coefficient matrix has rank two")]
    RankTwoSpec,
    #[error("target coefficients must be positive and distinct, got a = {a}, b = {b}")]
    BadTargets { a: f64, b: f64 },
    #[error("normal-form center has a zero coordinate: {q:?}")]
    DegenerateQ { q: Point },
    #[error("canonical coefficient {index} is zero")]
    ZeroCoefficient { index: usize },
    #[error("transcript step {index} has a singular linear part")]
    SingularStep { index: usize },
    #[error("point {p:?} is not a singular point (residual {residual:e})")]
    NotSingular { p: Point, residual: f64 },
    #[error("gradient of the Jacobian determinant vanishes at {p:?}")]
    CriticalGradientZero { p: Point },
    #[error("the point coincides with the origin")]
    OriginPoint,
    #[error("the point coincides with the circle center")]
    CoincidentPoint,
    #[error("function has no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("expected exactly one root, found {found}")]
    NoUniqueRoot { found: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
