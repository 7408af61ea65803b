//! Two-panel SVG figures and CSV samples of the singular set and its image.

use std::fmt::Write as _;

use gdsm_core::oracle::Region;
use gdsm_core::singular::{self, Branch, BranchWindow};
use gdsm_core::{geom, Error, MappingSpec, Point, Rank};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub branch: usize,
    pub index: usize,
    pub param: f64,
    pub point: Point,
    pub image: Point,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub spec: MappingSpec,
    pub region: Region,
    pub samples: Vec<Sample>,
    /// Cusp and its image, when the cusp lies in the view.
    pub cusp: Option<(Point, Point)>,
}

/// Branch windows wide enough that every arm leaves `region` at both ends.
pub fn view_windows(spec: &MappingSpec, region: Region) -> Result<Vec<BranchWindow>, Error> {
    let base = singular::sampling_windows(spec)?;
    let corners = [
        [region.x_min, region.y_min],
        [region.x_min, region.y_max],
        [region.x_max, region.y_min],
        [region.x_max, region.y_max],
    ];
    Ok(base
        .into_iter()
        .map(|w| {
            let reach = match w.branch {
                Branch::HyperbolaArm { curve, .. } => {
                    let c = curve.center();
                    let far = corners
                        .iter()
                        .map(|p| (p[0] - c[0]).abs().max((p[1] - c[1]).abs()))
                        .fold(0.0, f64::max);
                    far + curve.vertex_scale() + 1.0
                }
                Branch::Line { point, direction } => {
                    let far = corners.iter().map(|p| geom::dist(*p, point)).fold(0.0, f64::max);
                    far / geom::norm(direction) + 1.0
                }
            };
            BranchWindow { branch: w.branch, t_min: w.t_min.min(-reach), t_max: w.t_max.max(reach) }
        })
        .collect())
}

pub fn build_figure(spec: &MappingSpec, region: Region, samples: usize) -> Result<Figure, Error> {
    if !spec.is_generic() {
        return Err(Error::NonGenericSpec);
    }
    let mut out = Vec::new();
    for (bi, w) in view_windows(spec, region)?.iter().enumerate() {
        for (i, t) in w.params(samples.max(2)).into_iter().enumerate() {
            let p = w.branch.point(t);
            if region.contains(p) {
                out.push(Sample { branch: bi, index: i, param: t, point: p, image: spec.evaluate(p) });
            }
        }
    }
    let cusp = match spec.rank() {
        Rank::Two => {
            let c = singular::cusp_point(spec)?;
            region.contains(c.point).then_some((c.point, c.image))
        }
        Rank::One => None,
    };
    Ok(Figure { spec: *spec, region, samples: out, cusp })
}

pub const CSV_HEADER: &str = "branch,param,x,y,u,v";

/// Shortest round-trip decimal rendering of every value, LF line endings.
pub fn to_csv(fig: &Figure) -> String {
    let mut s = String::with_capacity(64 * (fig.samples.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for p in &fig.samples {
        let _ = writeln!(s, "{},{},{},{},{},{}", p.branch, p.param, p.point[0], p.point[1], p.image[0], p.image[1]);
    }
    s
}

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 500.0;
const PANEL: f64 = 400.0;
const TOP: f64 = 60.0;
const LEFT: [f64; 2] = [40.0, 520.0];

struct Frame {
    region: Region,
    left: f64,
}

impl Frame {
    fn map(&self, p: Point) -> (f64, f64) {
        let r = &self.region;
        let x = self.left + (p[0] - r.x_min) / (r.x_max - r.x_min) * PANEL;
        let y = TOP + (r.y_max - p[1]) / (r.y_max - r.y_min) * PANEL;
        (x, y)
    }
}

/// Bounding box of the image samples padded by 10% on each side.
fn target_region(fig: &Figure) -> Region {
    let mut pts: Vec<Point> = fig.samples.iter().map(|s| s.image).collect();
    if let Some((_, img)) = fig.cusp {
        pts.push(img);
    }
    if pts.is_empty() {
        return Region::square(1.0);
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let pad = |lo: f64, hi: f64| {
        let w = if hi > lo { hi - lo } else { 1.0 };
        (lo - 0.1 * w, hi + 0.1 * w)
    };
    let ((x0, x1), (y0, y1)) = (pad(x0, x1), pad(y0, y1));
    Region::new(x0, x1, y0, y1)
}

/// Maximal runs of consecutive samples on one branch.
fn runs(samples: &[Sample]) -> Vec<&[Sample]> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=samples.len() {
        let split = i == samples.len()
            || samples[i].branch != samples[i - 1].branch
            || samples[i].index != samples[i - 1].index + 1;
        if split {
            if i - start >= 2 {
                out.push(&samples[start..i]);
            }
            start = i;
        }
    }
    out
}

fn polyline(s: &mut String, frame: &Frame, pts: impl Iterator<Item = Point>, class: &str) {
    let coords: Vec<String> = pts
        .map(|p| {
            let (x, y) = frame.map(p);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let _ = writeln!(s, r#"  <polyline class="{class}" points="{}"/>"#, coords.join(" "));
}

fn axes(s: &mut String, frame: &Frame) {
    let r = frame.region;
    let _ = writeln!(
        s,
        r##"  <rect class="panel" x="{:.3}" y="{TOP:.3}" width="{PANEL:.3}" height="{PANEL:.3}" fill="none" stroke="#444"/>"##,
        frame.left
    );
    if r.y_min < 0.0 && r.y_max > 0.0 {
        let (x0, y) = frame.map([r.x_min, 0.0]);
        let (x1, _) = frame.map([r.x_max, 0.0]);
        let _ = writeln!(s, r##"  <line class="axis" x1="{x0:.3}" y1="{y:.3}" x2="{x1:.3}" y2="{y:.3}" stroke="#bbb"/>"##);
    }
    if r.x_min < 0.0 && r.x_max > 0.0 {
        let (x, y0) = frame.map([0.0, r.y_min]);
        let (_, y1) = frame.map([0.0, r.y_max]);
        let _ = writeln!(s, r##"  <line class="axis" x1="{x:.3}" y1="{y0:.3}" x2="{x:.3}" y2="{y1:.3}" stroke="#bbb"/>"##);
    }
    let (lx, ly) = (frame.left, TOP + PANEL + 18.0);
    let _ = writeln!(
        s,
        r#"  <text class="range" x="{lx:.3}" y="{ly:.3}" font-size="12">[{}, {}] x [{}, {}]</text>"#,
        short(r.x_min),
        short(r.x_max),
        short(r.y_min),
        short(r.y_max)
    );
}

fn short(v: f64) -> String {
    format!("{v:.4}").trim_end_matches('0').trim_end_matches('.').to_string()
}

fn cusp_glyph(s: &mut String, frame: &Frame, p: Point, class: &str) {
    let (x, y) = frame.map(p);
    let _ = writeln!(
        s,
        r##"  <circle class="{class}" cx="{x:.3}" cy="{y:.3}" r="5" fill="none" stroke="#c0392b" stroke-width="2"/>"##
    );
}

pub fn to_svg(fig: &Figure) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        "  <style>.singular-set,.discriminant{{fill:none;stroke:#1f4e99;stroke-width:1.5}}</style>"
    );
    let spec = &fig.spec;
    let a = spec.matrix();
    let _ = writeln!(
        s,
        r#"  <text class="title" x="40" y="28" font-size="15">p0 = ({}, {}), p1 = ({}, {}), A = [[{}, {}], [{}, {}]]</text>"#,
        spec.p0()[0],
        spec.p0()[1],
        spec.p1()[0],
        spec.p1()[1],
        a[0][0],
        a[0][1],
        a[1][0],
        a[1][1]
    );
    let labels = ["singular set", "image of the singular set"];
    for (i, label) in labels.iter().enumerate() {
        let _ = writeln!(s, r#"  <text class="label" x="{:.3}" y="50" font-size="13">{label}</text>"#, LEFT[i]);
    }

    let source = Frame { region: fig.region, left: LEFT[0] };
    let target = Frame { region: target_region(fig), left: LEFT[1] };
    axes(&mut s, &source);
    axes(&mut s, &target);
    for run in runs(&fig.samples) {
        polyline(&mut s, &source, run.iter().map(|p| p.point), "singular-set");
        polyline(&mut s, &target, run.iter().map(|p| p.image), "discriminant");
    }
    if let Some((p, img)) = fig.cusp {
        cusp_glyph(&mut s, &source, p, "cusp-source");
        cusp_glyph(&mut s, &target, img, "cusp-image");
    }
    s.push_str("</svg>\n");
    s
}
