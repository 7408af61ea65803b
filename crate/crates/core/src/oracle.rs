//! Independent numerical machinery used to check closed forms: centered
//! finite differences, bisection, grid comparison of plane maps and
//! Gauss-Legendre quadrature.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::mapping::PlaneMap;

pub const DEFAULT_STEP: f64 = 1e-5;
pub const DEFAULT_STEP_THIRD: f64 = 1e-3;
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
pub const DEFAULT_GRID: usize = 41;

/// Default step for a derivative of the given order.
pub fn default_step(order: u8) -> f64 {
    if order >= 3 {
        DEFAULT_STEP_THIRD
    } else {
        DEFAULT_STEP
    }
}

fn stencil(order: u8) -> &'static [(f64, f64)] {
    // (offset in steps, weight); the divisor is h^order (times 2 for odd orders)
    match order {
        1 => &[(1.0, 0.5), (-1.0, -0.5)],
        2 => &[(1.0, 1.0), (0.0, -2.0), (-1.0, 1.0)],
        3 => &[(2.0, 0.5), (1.0, -1.0), (-1.0, 1.0), (-2.0, -0.5)],
        _ => panic!("finite-difference order must be 1, 2 or 3, got {order}"),
    }
}

/// Centered finite-difference derivative of order 1, 2 or 3 with O(h²) error.
pub fn fd_derivative(f: impl Fn(f64) -> f64, x: f64, order: u8, h: f64) -> f64 {
    let sum: f64 = stencil(order).iter().map(|&(k, w)| w * f(x + k * h)).sum();
    sum / h.powi(order as i32)
}

/// Componentwise [`fd_derivative`] of a plane-valued function.
pub fn fd_derivative_vec(f: impl Fn(f64) -> Point, x: f64, order: u8, h: f64) -> Point {
    let mut acc = [0.0; 2];
    for &(k, w) in stencil(order) {
        let v = f(x + k * h);
        acc[0] += w * v[0];
        acc[1] += w * v[1];
    }
    let d = h.powi(order as i32);
    [acc[0] / d, acc[1] / d]
}

/// Bisection on a sign-changing bracket until its width is at most `tol`.
pub fn root_find(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.signum() != fhi.signum()) || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NoBracket { lo, hi });
    }
    let mut best = if flo.abs() < fhi.abs() { (lo, flo.abs()) } else { (hi, fhi.abs()) };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm.abs() < best.1 {
            best = (mid, fm.abs());
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid).abs();
    Ok(if fm <= best.1 { mid } else { best.0 })
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Region {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self { x_min, x_max, y_min, y_max }
    }

    pub fn square(half: f64) -> Self {
        Self::new(-half, half, -half, half)
    }

    pub fn contains(&self, p: Point) -> bool {
        (self.x_min..=self.x_max).contains(&p[0]) && (self.y_min..=self.y_max).contains(&p[1])
    }

    /// The `n × n` uniform grid, row by row, including the boundary.
    pub fn grid(&self, n: usize) -> impl Iterator<Item = Point> + '_ {
        let step = move |lo: f64, hi: f64, i: usize| {
            if n <= 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        (0..n).flat_map(move |j| {
            (0..n).map(move |i| [step(self.x_min, self.x_max, i), step(self.y_min, self.y_max, j)])
        })
    }
}

impl Default for Region {
    fn default() -> Self {
        Self::square(3.0)
    }
}

/// Sup-norm comparison of two plane maps on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub region: Region,
    pub resolution: usize,
    pub sup: f64,
    pub argmax: Point,
}

pub fn grid_sup_distance(f: &dyn PlaneMap, g: &dyn PlaneMap, region: Region, n: usize) -> GridReport {
    let mut sup = 0.0;
    let mut argmax = [region.x_min, region.y_min];
    for p in region.grid(n) {
        let d = geom::dist(f.value(p), g.value(p));
        if d > sup || d.is_nan() {
            sup = if d.is_nan() { f64::INFINITY } else { d };
            argmax = p;
        }
    }
    GridReport { region, resolution: n, sup, argmax }
}

const GL_ORDER: usize = 12;

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre polynomial.
fn gauss_legendre() -> &'static [(f64, f64); GL_ORDER] {
    static NODES: OnceLock<[(f64, f64); GL_ORDER]> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = GL_ORDER;
        let mut out = [(0.0, 0.0); GL_ORDER];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

fn gl_panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * gauss_legendre().iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>()
}

/// Adaptive Gauss-Legendre quadrature: panels are halved until the two halves
/// agree with the whole to within `tol` (scaled by the panel's share).
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (gl_panel(f, a, m), gl_panel(f, m, b));
        if depth == 0 || (l + r - whole).abs() <= tol {
            l + r
        } else {
            recurse(f, a, m, l, 0.5 * tol, depth - 1) + recurse(f, m, b, r, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    recurse(&f, a, b, gl_panel(&f, a, b), tol, 30)
}
