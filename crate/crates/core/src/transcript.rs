//! Replayable coordinate changes.
//!
//! A transcript is an ordered list of steps, each of which transforms the
//! current map `g`:
//!
//! | step                       | new map                 |
//! |----------------------------|-------------------------|
//! | `SourceTranslation(v)`     | `x ↦ g(x + v)`          |
//! | `SourceAffine(L, v)`       | `x ↦ g(L x + v)`        |
//! | `SourceScale(s)`           | `x ↦ g(diag(s) x)`      |
//! | `TargetTranslation(w)`     | `x ↦ g(x) + w`          |
//! | `TargetLinear(M)`          | `x ↦ g(x) · M` (row)    |
//!
//! Replaying collapses the steps into one source affine map `S` and one
//! target affine map `T`, so the result is `T ∘ f ∘ S` with exact
//! derivatives inherited from `f`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Mat2, Point, IDENTITY};
use crate::mapping::{PlaneMap, ThirdPartials};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    SourceTranslation { vector: Point },
    TargetTranslation { vector: Point },
    TargetLinear { matrix: Mat2 },
    SourceAffine { matrix: Mat2, vector: Point },
    SourceScale { factors: Point },
}

impl Step {
    /// Determinant of the linear part, `1` for translations.
    pub fn determinant(&self) -> f64 {
        match self {
            Step::SourceTranslation { .. } | Step::TargetTranslation { .. } => 1.0,
            Step::TargetLinear { matrix } | Step::SourceAffine { matrix, .. } => geom::det(matrix),
            Step::SourceScale { factors } => factors[0] * factors[1],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiffeoTranscript {
    pub steps: Vec<Step>,
}

impl DiffeoTranscript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, step: Step) -> &mut Self {
        self.steps.push(step);
        self
    }

    pub fn extend(&mut self, other: &DiffeoTranscript) -> &mut Self {
        self.steps.extend(other.steps.iter().cloned());
        self
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Checks that every linear part is invertible.
    pub fn validate(&self) -> Result<()> {
        for (index, step) in self.steps.iter().enumerate() {
            let d = step.determinant();
            if d == 0.0 || !d.is_finite() {
                return Err(Error::SingularStep { index });
            }
        }
        Ok(())
    }

    /// The collapsed source and target affine maps.
    pub fn compose(&self) -> Result<Composite> {
        self.validate()?;
        let mut c = Composite::identity();
        for step in &self.steps {
            c.push(step);
        }
        Ok(c)
    }

    /// Pushes a source point of the original map forward to the coordinates
    /// of the transformed map, i.e. returns `S⁻¹(p)`.
    pub fn pull_source(&self, p: Point) -> Result<Point> {
        self.compose()?.source_preimage(p)
    }
}

/// `x ↦ T(f(S(x)))` with `S(x) = L x + v` and `T(y) = y · M + w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Composite {
    pub source_linear: Mat2,
    pub source_shift: Point,
    pub target_linear: Mat2,
    pub target_shift: Point,
}

impl Composite {
    pub fn identity() -> Self {
        Self { source_linear: IDENTITY, source_shift: [0.0; 2], target_linear: IDENTITY, target_shift: [0.0; 2] }
    }

    fn push(&mut self, step: &Step) {
        match *step {
            Step::SourceTranslation { vector } => self.push_source(IDENTITY, vector),
            Step::SourceAffine { matrix, vector } => self.push_source(matrix, vector),
            Step::SourceScale { factors } => self.push_source(geom::diag(factors[0], factors[1]), [0.0; 2]),
            Step::TargetTranslation { vector } => self.target_shift = geom::add(self.target_shift, vector),
            Step::TargetLinear { matrix } => {
                self.target_linear = geom::mul(&self.target_linear, &matrix);
                self.target_shift = geom::vec_mat(self.target_shift, &matrix);
            }
        }
    }

    fn push_source(&mut self, l: Mat2, v: Point) {
        self.source_shift = geom::add(geom::mat_vec(&self.source_linear, v), self.source_shift);
        self.source_linear = geom::mul(&self.source_linear, &l);
    }

    pub fn source(&self, x: Point) -> Point {
        geom::add(geom::mat_vec(&self.source_linear, x), self.source_shift)
    }

    pub fn target(&self, y: Point) -> Point {
        geom::add(geom::vec_mat(y, &self.target_linear), self.target_shift)
    }

    pub fn source_preimage(&self, p: Point) -> Result<Point> {
        let inv = geom::inverse(&self.source_linear).ok_or(Error::SingularStep { index: 0 })?;
        Ok(geom::mat_vec(&inv, geom::sub(p, self.source_shift)))
    }
}

/// The result of replaying a transcript on a map.
#[derive(Debug, Clone)]
pub struct TransformedMap<M> {
    pub base: M,
    pub composite: Composite,
}

pub fn apply_transcript<M: PlaneMap>(t: &DiffeoTranscript, map: M) -> Result<TransformedMap<M>> {
    Ok(TransformedMap { base: map, composite: t.compose()? })
}

/// Step-by-step evaluation without collapsing; used to check that the
/// collapsed composite agrees with the literal sequence of steps.
pub fn replay_stepwise(t: &DiffeoTranscript, map: &dyn PlaneMap, p: Point) -> Result<Point> {
    t.validate()?;
    let mut current: Box<dyn Fn(Point) -> Point + '_> = Box::new(|x| map.value(x));
    for step in &t.steps {
        let prev = current;
        current = match step.clone() {
            Step::SourceTranslation { vector } => Box::new(move |x| prev(geom::add(x, vector))),
            Step::SourceAffine { matrix, vector } => {
                Box::new(move |x| prev(geom::add(geom::mat_vec(&matrix, x), vector)))
            }
            Step::SourceScale { factors } => Box::new(move |x| prev([factors[0] * x[0], factors[1] * x[1]])),
            Step::TargetTranslation { vector } => Box::new(move |x| geom::add(prev(x), vector)),
            Step::TargetLinear { matrix } => Box::new(move |x| geom::vec_mat(prev(x), &matrix)),
        };
    }
    Ok(current(p))
}

fn third_tensor(t: &ThirdPartials) -> [[[f64; 2]; 2]; 2] {
    // index count of y among (a, b, c) selects the entry
    let mut out = [[[0.0; 2]; 2]; 2];
    for (a, plane) in out.iter_mut().enumerate() {
        for (b, row) in plane.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = t[a + b + c];
            }
        }
    }
    out
}

impl<M: PlaneMap> PlaneMap for TransformedMap<M> {
    fn value(&self, p: Point) -> Point {
        self.composite.target(self.base.value(self.composite.source(p)))
    }

    fn jacobian(&self, p: Point) -> Mat2 {
        let c = &self.composite;
        let jf = self.base.jacobian(c.source(p));
        geom::mul(&geom::mul(&geom::transpose(&c.target_linear), &jf), &c.source_linear)
    }

    fn hessians(&self, p: Point) -> [Mat2; 2] {
        let c = &self.composite;
        let (l, m) = (c.source_linear, c.target_linear);
        let hf = self.base.hessians(c.source(p));
        let pulled = hf.map(|h| geom::mul(&geom::mul(&geom::transpose(&l), &h), &l));
        let mut out = [[[0.0; 2]; 2]; 2];
        for (k, hk) in out.iter_mut().enumerate() {
            for (i, h) in pulled.iter().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        hk[a][b] += m[i][k] * h[a][b];
                    }
                }
            }
        }
        out
    }

    fn third_partials(&self, p: Point) -> [ThirdPartials; 2] {
        let c = &self.composite;
        let (l, m) = (c.source_linear, c.target_linear);
        let tf = self.base.third_partials(c.source(p)).map(|t| third_tensor(&t));
        let pulled = |t: &[[[f64; 2]; 2]; 2], a: usize, b: usize, cc: usize| {
            let mut s = 0.0;
            for (i, plane) in t.iter().enumerate() {
                for (j, row) in plane.iter().enumerate() {
                    for (k, v) in row.iter().enumerate() {
                        s += l[i][a] * l[j][b] * l[k][cc] * v;
                    }
                }
            }
            s
        };
        let mut out = [[0.0; 4]; 2];
        for (k, ok) in out.iter_mut().enumerate() {
            for (slot, (a, b, cc)) in [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)].into_iter().enumerate() {
                ok[slot] = (0..2).map(|i| m[i][k] * pulled(&tf[i], a, b, cc)).sum();
            }
        }
        out
    }

    fn det_jacobian(&self, p: Point) -> f64 {
        geom::det(&self.jacobian(p))
    }
}
