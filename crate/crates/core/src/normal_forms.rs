//! Constructive reductions of a mapping to its normal forms.
//!
//! Every reduction records its coordinate changes as a [`DiffeoTranscript`];
//! replaying the transcript on the input reproduces the normal form, which is
//! how all of these are verified.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Mat2, Point};
use crate::mapping::{CanonicalQuadraticMap, MappingSpec, NormalFormModel, PlaneMap, Rank};
use crate::oracle::{self, GridReport, Region};
use crate::transcript::{apply_transcript, DiffeoTranscript, Step};

/// Targets used by [`full_reduction`].
pub const CANONICAL_TARGETS: (f64, f64) = (1.0, 2.0);

/// The fixed representative `(x² + y, y² + x)` of the generic rank-two class.
pub const CANONICAL_REPRESENTATIVE: [f64; 4] = [0.0, 1.0, 1.0, 0.0];

fn check_targets(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) || a == b {
        return Err(Error::BadTargets { a, b });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTwoNormalForm {
    pub q: Point,
    pub a: f64,
    pub b: f64,
    pub transcript: DiffeoTranscript,
}

impl RankTwoNormalForm {
    /// The target map `F_q`.
    pub fn model(&self) -> MappingSpec {
        MappingSpec::f_q(self.q, self.a, self.b).expect("F_q has no zero entries for valid targets")
    }

    /// Grid distance between the replayed transcript and `F_q`.
    pub fn replay_residual(&self, spec: &MappingSpec, region: Region, n: usize) -> Result<GridReport> {
        let replayed = apply_transcript(&self.transcript, *spec)?;
        Ok(oracle::grid_sup_distance(&replayed, &self.model(), region, n))
    }
}

/// Reduces a generic rank-two mapping to `F_q = (|x - q|², a x² + b y²)`.
pub fn reduce_rank2(spec: &MappingSpec, a: f64, b: f64) -> Result<RankTwoNormalForm> {
    if spec.rank() == Rank::One {
        return Err(Error::RankOneSpec);
    }
    if !spec.is_generic() {
        return Err(Error::NonGenericSpec);
    }
    check_targets(a, b)?;

    let m_a = spec.matrix();
    let (p0, p1) = (spec.p0(), spec.p1());
    let pt = geom::sub(p1, p0);
    let [[a00, a01], [a10, a11]] = m_a;
    let at = [[a00, a10], [a01, a11]];
    let m = geom::mul(&geom::inverse(&at).ok_or(Error::RankOneSpec)?, &[[1.0, a], [1.0, b]]);
    let (beta0, beta1) = (m[1][0], m[1][1]);

    let c = [beta0 * a10 * pt[0], beta0 * a11 * pt[1]];
    let d = [beta1 * a10 * pt[0] / a, beta1 * a11 * pt[1] / b];
    let q = geom::sub(c, d);

    let mut transcript = DiffeoTranscript::new();
    transcript
        .push(Step::SourceTranslation { vector: p0 })
        .push(Step::TargetTranslation { vector: [0.0, -a10 * pt[0] * pt[0] - a11 * pt[1] * pt[1]] })
        .push(Step::TargetLinear { matrix: m })
        .push(Step::SourceTranslation { vector: d })
        .push(Step::TargetTranslation { vector: [geom::dot(c, c), a * d[0] * d[0] + b * d[1] * d[1]] });

    Ok(RankTwoNormalForm { q, a, b, transcript })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOneNormalForm {
    pub model: NormalFormModel,
    pub p0: Point,
    pub p1: Point,
    pub r: f64,
    pub transcript: DiffeoTranscript,
}

impl RankOneNormalForm {
    pub fn model_map(&self) -> MappingSpec {
        let build = match self.model {
            NormalFormModel::Lorentzian => MappingSpec::lorentzian,
            _ => MappingSpec::distance_squared,
        };
        build(self.p0, self.p1).expect("model maps have non-zero entries")
    }
}

/// Reduces a generic rank-one mapping to the distance-squared map `D` or the
/// Lorentzian distance-squared map `L`.
pub fn reduce_rank1(spec: &MappingSpec) -> Result<RankOneNormalForm> {
    if spec.rank() == Rank::Two {
        return Err(Error::RankTwoSpec);
    }
    if !spec.is_generic() {
        return Err(Error::NonGenericSpec);
    }
    let [[a00, a01], [_, a11]] = spec.matrix();
    let r = a00 / a01;
    let s = r.abs().sqrt();
    let model = if r > 0.0 { NormalFormModel::DistanceSquared } else { NormalFormModel::Lorentzian };
    let (p0, p1) = (spec.p0(), spec.p1());
    let mut transcript = DiffeoTranscript::new();
    transcript
        .push(Step::TargetLinear { matrix: geom::diag(1.0 / a01, 1.0 / a11) })
        .push(Step::SourceScale { factors: [1.0 / s, 1.0] });
    Ok(RankOneNormalForm { model, p0: [s * p0[0], p0[1]], p1: [s * p1[0], p1[1]], r, transcript })
}

/// `(x² + b00 x + b01 y, y² + b10 x + b11 y)` with `b01` and `b10` non-zero.
///
/// Those two coefficients are what the equivalence witness divides by; the
/// diagonal ones may vanish, as they do for the representative `(x² + y, y² + x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalQuadratic {
    pub b00: f64,
    pub b01: f64,
    pub b10: f64,
    pub b11: f64,
}

impl CanonicalQuadratic {
    pub fn new(b00: f64, b01: f64, b10: f64, b11: f64) -> Result<Self> {
        let c = Self { b00, b01, b10, b11 };
        if let Some(index) = zero_cross_coefficient(&c) {
            return Err(Error::ZeroCoefficient { index });
        }
        if c.coefficients().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(c)
    }

    pub fn representative() -> Self {
        let [b00, b01, b10, b11] = CANONICAL_REPRESENTATIVE;
        Self { b00, b01, b10, b11 }
    }

    pub fn coefficients(&self) -> [f64; 4] {
        [self.b00, self.b01, self.b10, self.b11]
    }

    pub fn map(&self) -> CanonicalQuadraticMap {
        CanonicalQuadraticMap { coefficients: self.coefficients() }
    }
}

/// Result of [`canonical_quadratic`]: the coefficients plus the transcript
/// from the original input, extended by the two canonicalising steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub quadratic: CanonicalQuadratic,
    pub transcript: DiffeoTranscript,
}

pub fn canonical_quadratic(nf: &RankTwoNormalForm) -> Result<CanonicalForm> {
    let (q, a, b) = (nf.q, nf.a, nf.b);
    check_targets(a, b)?;
    if q[0] == 0.0 || q[1] == 0.0 {
        return Err(Error::DegenerateQ { q });
    }
    let ab = a - b;
    let quadratic = CanonicalQuadratic {
        b00: 2.0 * b * q[0] / ab,
        b01: 2.0 * b * q[1] / ab,
        b10: -2.0 * a * q[0] / ab,
        b11: -2.0 * a * q[1] / ab,
    };
    let q2 = geom::dot(q, q);
    let mut transcript = nf.transcript.clone();
    transcript
        .push(Step::TargetLinear { matrix: [[-b / ab, a / ab], [1.0 / ab, -1.0 / ab]] })
        .push(Step::TargetTranslation { vector: [b * q2 / ab, -a * q2 / ab] });
    Ok(CanonicalForm { quadratic, transcript })
}

fn zero_cross_coefficient(c: &CanonicalQuadratic) -> Option<usize> {
    [(1, c.b01), (2, c.b10)].into_iter().find(|&(_, v)| v == 0.0).map(|(i, _)| i)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceWitness {
    /// `(β00, β01, β10, β11)`.
    pub beta: [f64; 4],
    pub transcript: DiffeoTranscript,
}

/// Finds the source affine change and target scaling carrying `src` onto
/// `dst`.
pub fn equivalence_witness(src: &CanonicalQuadratic, dst: &CanonicalQuadratic) -> Result<EquivalenceWitness> {
    for (offset, c) in [src, dst].into_iter().enumerate() {
        if let Some(i) = zero_cross_coefficient(c) {
            return Err(Error::ZeroCoefficient { index: 4 * offset + i });
        }
    }
    let [b00, b01, b10, b11] = src.coefficients();
    let [d00, d01, d10, d11] = dst.coefficients();
    let beta00 = geom::signed_cbrt(b10 * b01 * b01 / (d10 * d01 * d01));
    let beta10 = geom::signed_cbrt(b01 * b10 * b10 / (d01 * d10 * d10));
    let beta01 = (d00 * beta00 - b00) / 2.0;
    let beta11 = (d11 * beta10 - b11) / 2.0;

    let k0 = (beta01 * beta01 + b00 * beta01 + b01 * beta11) / (beta00 * beta00);
    let k1 = (beta11 * beta11 + b10 * beta01 + b11 * beta11) / (beta10 * beta10);
    let mut transcript = DiffeoTranscript::new();
    transcript
        .push(Step::SourceAffine { matrix: geom::diag(beta00, beta10), vector: [beta01, beta11] })
        .push(Step::TargetLinear { matrix: geom::diag(1.0 / (beta00 * beta00), 1.0 / (beta10 * beta10)) })
        .push(Step::TargetTranslation { vector: [-k0, -k1] });
    Ok(EquivalenceWitness { beta: [beta00, beta01, beta10, beta11], transcript })
}

/// Reads the coefficients of a map of the form
/// `(x² + b00 x + b01 y + c0, y² + b10 x + b11 y + c1)` from values at four
/// points. Used to check that a replayed transcript lands on a canonical form.
pub fn read_canonical_coefficients(map: &dyn PlaneMap) -> ([f64; 4], Point) {
    let c = map.value([0.0, 0.0]);
    let ex = map.value([1.0, 0.0]);
    let ey = map.value([0.0, 1.0]);
    ([ex[0] - c[0] - 1.0, ey[0] - c[0], ex[1] - c[1], ey[1] - c[1] - 1.0], c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullReduction {
    pub canonical: CanonicalQuadratic,
    pub transcript: DiffeoTranscript,
    /// Intermediate rank-two normal form with the fixed targets.
    pub q: Point,
}

impl FullReduction {
    pub fn replay_residual(&self, spec: &MappingSpec, region: Region, n: usize) -> Result<GridReport> {
        let replayed = apply_transcript(&self.transcript, *spec)?;
        Ok(oracle::grid_sup_distance(&replayed, &self.canonical.map(), region, n))
    }
}

/// Reduces a generic rank-two mapping all the way to `(x² + y, y² + x)`.
pub fn full_reduction(spec: &MappingSpec) -> Result<FullReduction> {
    let (a, b) = CANONICAL_TARGETS;
    let nf = reduce_rank2(spec, a, b)?;
    let cf = canonical_quadratic(&nf)?;
    let target = CanonicalQuadratic::representative();
    let w = equivalence_witness(&cf.quadratic, &target)?;
    let mut transcript = cf.transcript;
    transcript.extend(&w.transcript);
    Ok(FullReduction { canonical: target, transcript, q: nf.q })
}

/// The linear change of unfolding parameters `(p̃0, p̃1) ↦ (c1, c2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnfoldingCoefficients {
    pub base_point: Point,
    pub a: f64,
    pub b: f64,
    /// Anti-diagonal matrix acting on column vectors `p̃`.
    pub matrix: Mat2,
    pub determinant: f64,
}

impl UnfoldingCoefficients {
    /// Coefficients `(c1, c2)` for an offset `p̃ = p1 - p0`.
    pub fn at_offset(&self, pt: Point) -> Point {
        geom::mat_vec(&self.matrix, pt)
    }

    /// Coefficients for a second base point `p1`.
    pub fn at(&self, p1: Point) -> Point {
        self.at_offset(geom::sub(p1, self.base_point))
    }
}

pub fn unfolding_coefficients(p0: Point, matrix: Mat2, a: f64, b: f64) -> Result<UnfoldingCoefficients> {
    check_targets(a, b)?;
    if geom::det(&matrix) == 0.0 {
        return Err(Error::RankOneSpec);
    }
    let ab = a - b;
    let m = [[0.0, 2.0 * b / ab], [-2.0 * a / ab, 0.0]];
    Ok(UnfoldingCoefficients { base_point: p0, a, b, matrix: m, determinant: geom::det(&m) })
}
