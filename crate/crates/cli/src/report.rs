//! The `analyze` report.

use serde::Serialize;

use gdsm_core::contact::{self, EllipseFamily};
use gdsm_core::mapping::NormalFormModel;
use gdsm_core::normal_forms::{self, CanonicalQuadratic};
use gdsm_core::oracle::{Region, DEFAULT_GRID};
use gdsm_core::singular::{
    self, CuspReport, InjectivityCertificate, InjectivitySampling, SingularCurve, SingularityClass,
};
use gdsm_core::transcript::DiffeoTranscript;
use gdsm_core::{geom, Error, Mat2, MappingSpec, Point, Rank};

pub const SCHEMA: u32 = 1;

/// Agreement threshold for the contact cross-check, relative to `1 + |q|`.
const CONTACT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Serialize)]
pub struct SpecEcho {
    pub p0: Point,
    pub p1: Point,
    pub matrix: Mat2,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationSummary {
    pub samples_per_branch: usize,
    pub fold: usize,
    pub cusp: usize,
    pub degenerate: usize,
    pub regular: usize,
    pub cusp_clusters: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FullReductionReport {
    pub coefficients: [f64; 4],
    pub transcript: DiffeoTranscript,
    pub replay_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormalFormReport {
    RankTwo {
        q: Point,
        a: f64,
        b: f64,
        transcript: DiffeoTranscript,
        replay_residual: f64,
        canonical_coefficients: [f64; 4],
        canonical_transcript: DiffeoTranscript,
        full_reduction: FullReductionReport,
    },
    RankOne {
        model: NormalFormModel,
        r: f64,
        p0: Point,
        p1: Point,
        transcript: DiffeoTranscript,
        replay_residual: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ContactReport {
    pub q: Point,
    pub a: f64,
    pub b: f64,
    /// Point where the circle about `q` osculates the ellipse through it.
    pub osculating_point: Point,
    /// Whitney cusp of `F_q`.
    pub normal_form_cusp: Point,
    /// Cusp of the input carried into `F_q` coordinates by the transcript.
    pub transported_cusp: Point,
    pub max_discrepancy: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub spec: SpecEcho,
    pub rank: usize,
    pub genericity: bool,
    pub singular_curve: Option<SingularCurve>,
    pub cusp: Option<CuspReport>,
    pub classification: Option<ClassificationSummary>,
    pub normal_form: Option<NormalFormReport>,
    pub injectivity: Option<InjectivityCertificate>,
    pub contact: Option<ContactReport>,
}

impl AnalysisReport {
    /// Pretty JSON with keys sorted at every level.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report is serializable");
        let mut text = serde_json::to_string_pretty(&value).expect("value is serializable");
        text.push('\n');
        text
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let s = &self.spec;
        out.push_str(&format!("p0 = {:?}, p1 = {:?}, A = {:?}\n", s.p0, s.p1, s.matrix));
        out.push_str(&format!("rank {}, generic: {}\n", self.rank, self.genericity));
        match &self.singular_curve {
            Some(SingularCurve::Hyperbola(h)) => out.push_str(&format!(
                "singular set: hyperbola (x - x_c)(y - y_c) = k with center ({}, {}), k = {}\n",
                h.x_c, h.y_c, h.k
            )),
            Some(SingularCurve::Line { point, direction }) => {
                out.push_str(&format!("singular set: line through {point:?} along {direction:?}\n"))
            }
            None => {}
        }
        if let Some(c) = &self.cusp {
            out.push_str(&format!("cusp: {:?} -> {:?}\n", c.point, c.image));
        }
        if let Some(c) = &self.classification {
            out.push_str(&format!(
                "samples: {} fold, {} cusp, {} degenerate ({} cusp cluster(s))\n",
                c.fold, c.cusp, c.degenerate, c.cusp_clusters
            ));
        }
        match &self.normal_form {
            Some(NormalFormReport::RankTwo { q, a, b, full_reduction, .. }) => {
                out.push_str(&format!("normal form: F_q with q = {q:?}, (a, b) = ({a}, {b})\n"));
                out.push_str(&format!(
                    "canonical: {:?} (replay residual {:e})\n",
                    full_reduction.coefficients, full_reduction.replay_residual
                ));
            }
            Some(NormalFormReport::RankOne { model, r, .. }) => {
                out.push_str(&format!("normal form: {model:?} (r = {r})\n"));
            }
            None => {}
        }
        if let Some(i) = &self.injectivity {
            out.push_str(&format!("injective on singular set: {:?}\n", i.verdict));
        }
        if let Some(c) = &self.contact {
            out.push_str(&format!("contact cross-check: {} (discrepancy {:e})\n", c.agrees, c.max_discrepancy));
        }
        out
    }
}

pub fn analyze(spec: &MappingSpec, targets: (f64, f64), samples: usize) -> Result<AnalysisReport, Error> {
    let mut report = AnalysisReport {
        schema: SCHEMA,
        spec: SpecEcho { p0: spec.p0(), p1: spec.p1(), matrix: spec.matrix() },
        rank: spec.rank().as_usize(),
        genericity: spec.is_generic(),
        singular_curve: None,
        cusp: None,
        classification: None,
        normal_form: None,
        injectivity: None,
        contact: None,
    };
    if !report.genericity {
        return Ok(report);
    }
    let (a, b) = targets;
    if !(a > 0.0 && b > 0.0) || a == b {
        return Err(Error::BadTargets { a, b });
    }

    report.singular_curve = Some(singular::singular_set(spec)?);
    let points = singular::classify_singular_set(spec, samples)?;
    let count = |c: SingularityClass| points.iter().filter(|p| p.class == c).count();
    report.classification = Some(ClassificationSummary {
        samples_per_branch: samples,
        fold: count(SingularityClass::Fold),
        cusp: count(SingularityClass::Cusp),
        degenerate: count(SingularityClass::Degenerate),
        regular: count(SingularityClass::Regular),
        cusp_clusters: singular::cusp_clusters(&points),
    });
    report.injectivity = Some(singular::restricted_injectivity(spec, &InjectivitySampling::default()));

    let region = Region::default();
    match spec.rank() {
        Rank::One => {
            let nf = normal_forms::reduce_rank1(spec)?;
            let replayed = gdsm_core::transcript::apply_transcript(&nf.transcript, *spec)?;
            let residual = gdsm_core::oracle::grid_sup_distance(&replayed, &nf.model_map(), region, DEFAULT_GRID).sup;
            report.normal_form = Some(NormalFormReport::RankOne {
                model: nf.model,
                r: nf.r,
                p0: nf.p0,
                p1: nf.p1,
                transcript: nf.transcript,
                replay_residual: residual,
            });
        }
        Rank::Two => {
            let cusp = singular::cusp_point(spec)?;
            report.cusp = Some(cusp);
            let nf = normal_forms::reduce_rank2(spec, a, b)?;
            let nf_residual = nf.replay_residual(spec, region, DEFAULT_GRID)?.sup;
            let cf = normal_forms::canonical_quadratic(&nf)?;
            let fr = normal_forms::full_reduction(spec)?;
            let fr_residual = fr.replay_residual(spec, region, DEFAULT_GRID)?.sup;
            report.contact = Some(contact_check(&nf, cusp.point)?);
            report.normal_form = Some(NormalFormReport::RankTwo {
                q: nf.q,
                a,
                b,
                transcript: nf.transcript,
                replay_residual: nf_residual,
                canonical_coefficients: cf.quadratic.coefficients(),
                canonical_transcript: cf.transcript,
                full_reduction: FullReductionReport {
                    coefficients: CanonicalQuadratic::coefficients(&fr.canonical),
                    transcript: fr.transcript,
                    replay_residual: fr_residual,
                },
            });
        }
    }
    Ok(report)
}

fn contact_check(nf: &normal_forms::RankTwoNormalForm, cusp: Point) -> Result<ContactReport, Error> {
    let fam = EllipseFamily::new(nf.a, nf.b)?;
    let rho = contact::coinciding_osculating_point(nf.q, &fam)?;
    let fq_cusp = singular::cusp_point(&nf.model())?.point;
    let transported = nf.transcript.pull_source(cusp)?;
    let max_discrepancy = geom::dist(rho, fq_cusp).max(geom::dist(transported, fq_cusp));
    Ok(ContactReport {
        q: nf.q,
        a: nf.a,
        b: nf.b,
        osculating_point: rho,
        normal_form_cusp: fq_cusp,
        transported_cusp: transported,
        max_discrepancy,
        agrees: max_discrepancy <= CONTACT_TOL * (1.0 + geom::norm(nf.q)),
    })
}
