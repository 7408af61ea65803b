use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gdsm_core::oracle::Region;
use gdsm_core::{Mat2, Point};

#[derive(Debug, Parser)]
#[command(name = "gdsm", version, about = "Singular sets, normal forms and figures of plane distance-squared mappings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full analysis pipeline and print a report.
    Analyze(AnalyzeArgs),
    /// Draw the singular set and its image as SVG, optionally with a CSV of the samples.
    Render(RenderArgs),
    /// Render one figure per matrix with fixed base points.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// First base point `x,y`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub p0: Point,
    /// Second base point `x,y`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub p1: Point,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub points: PointArgs,
    /// Coefficient matrix `a00,a01,a10,a11`.
    #[arg(long, value_parser = parse_matrix, allow_hyphen_values = true)]
    pub matrix: Mat2,
    /// Normal-form targets `a,b` (positive, distinct).
    #[arg(long, value_parser = parse_pair, default_value = "1,2")]
    pub targets: (f64, f64),
    /// Samples per branch of the singular set.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Print the report as JSON instead of a text summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub points: PointArgs,
    #[arg(long, value_parser = parse_matrix, allow_hyphen_values = true)]
    pub matrix: Mat2,
    /// SVG output file.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional CSV of the samples.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Source view `xmin,xmax,ymin,ymax`.
    #[arg(long, value_parser = parse_region, allow_hyphen_values = true, default_value = "-6,6,-6,6")]
    pub range: Region,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub points: PointArgs,
    /// Semicolon-separated matrices, e.g. `1,1,1,1;1,1,1,2`.
    #[arg(long, conflicts_with = "matrix_list", required_unless_present = "matrix_list", allow_hyphen_values = true)]
    pub matrices: Option<String>,
    /// File with one matrix per line (blank lines and `#` comments ignored).
    #[arg(long)]
    pub matrix_list: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_parser = parse_region, allow_hyphen_values = true, default_value = "-6,6,-6,6")]
    pub range: Region,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
}

pub fn parse_numbers(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    if values.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", values.len()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err("values must be finite".into());
    }
    Ok(values)
}

fn parse_point(s: &str) -> Result<Point, String> {
    let v = parse_numbers(s, 2)?;
    Ok([v[0], v[1]])
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let v = parse_numbers(s, 2)?;
    Ok((v[0], v[1]))
}

pub fn parse_matrix(s: &str) -> Result<Mat2, String> {
    let v = parse_numbers(s, 4)?;
    Ok([[v[0], v[1]], [v[2], v[3]]])
}

fn parse_region(s: &str) -> Result<Region, String> {
    let v = parse_numbers(s, 4)?;
    if !(v[0] < v[1] && v[2] < v[3]) {
        return Err("range must satisfy xmin < xmax and ymin < ymax".into());
    }
    Ok(Region::new(v[0], v[1], v[2], v[3]))
}
