//! One figure per coefficient matrix, rendered concurrently.

use std::path::{Path, PathBuf};

use serde::Serialize;

use gdsm_core::oracle::Region;
use gdsm_core::{Mat2, MappingSpec, Point};

use crate::args::parse_matrix;
use crate::render;

#[derive(Debug, Clone, Serialize)]
pub struct SweepItem {
    pub index: usize,
    pub input: String,
    pub matrix: Option<Mat2>,
    pub status: &'static str,
    pub error: Option<String>,
    pub svg: Option<String>,
    pub csv: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub schema: u32,
    pub p0: Point,
    pub p1: Point,
    pub items: Vec<SweepItem>,
}

impl SweepSummary {
    pub fn failures(&self) -> usize {
        self.items.iter().filter(|i| i.error.is_some()).count()
    }
}

/// Splits an inline list on `;` or a file body on newlines, dropping blanks
/// and `#` comments.
pub fn split_matrices(text: &str) -> Vec<String> {
    text.split([';', '\n'])
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect()
}

pub fn file_names(index: usize) -> (String, String) {
    (format!("sweep_{index}.svg"), format!("sweep_{index}.csv"))
}

struct Rendered {
    matrix: Option<Mat2>,
    result: Result<(String, String), String>,
}

fn render_one(p0: Point, p1: Point, text: &str, region: Region, samples: usize) -> Rendered {
    let matrix = match parse_matrix(text) {
        Ok(m) => m,
        Err(e) => return Rendered { matrix: None, result: Err(format!("malformed matrix: {e}")) },
    };
    let result = MappingSpec::new(p0, p1, matrix)
        .and_then(|spec| render::build_figure(&spec, region, samples))
        .map(|fig| (render::to_svg(&fig), render::to_csv(&fig)))
        .map_err(|e| e.to_string());
    Rendered { matrix: Some(matrix), result }
}

/// Renders every matrix and writes `sweep_<index>.svg/.csv` plus
/// `summary.json` into `out_dir`. Only I/O failures abort the sweep.
pub fn run_sweep(
    p0: Point,
    p1: Point,
    matrices: &[String],
    region: Region,
    samples: usize,
    out_dir: &Path,
) -> Result<SweepSummary, (PathBuf, std::io::Error)> {
    let rendered: Vec<Rendered> = std::thread::scope(|scope| {
        let handles: Vec<_> = matrices
            .iter()
            .map(|m| scope.spawn(move || render_one(p0, p1, m, region, samples)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("render thread panicked")).collect()
    });

    std::fs::create_dir_all(out_dir).map_err(|e| (out_dir.to_path_buf(), e))?;
    let mut items = Vec::with_capacity(rendered.len());
    for (index, (r, input)) in rendered.into_iter().zip(matrices).enumerate() {
        let mut item = SweepItem {
            index,
            input: input.clone(),
            matrix: r.matrix,
            status: "ok",
            error: None,
            svg: None,
            csv: None,
        };
        match r.result {
            Ok((svg, csv)) => {
                let (svg_name, csv_name) = file_names(index);
                write(&out_dir.join(&svg_name), &svg)?;
                write(&out_dir.join(&csv_name), &csv)?;
                item.svg = Some(svg_name);
                item.csv = Some(csv_name);
            }
            Err(e) => {
                item.status = "error";
                item.error = Some(e);
            }
        }
        items.push(item);
    }
    let summary = SweepSummary { schema: crate::report::SCHEMA, p0, p1, items };
    let value = serde_json::to_value(&summary).expect("summary is serializable");
    let mut text = serde_json::to_string_pretty(&value).expect("value is serializable");
    text.push('\n');
    write(&out_dir.join("summary.json"), &text)?;
    Ok(summary)
}

fn write(path: &Path, contents: &str) -> Result<(), (PathBuf, std::io::Error)> {
    std::fs::write(path, contents).map_err(|e| (path.to_path_buf(), e))
}
