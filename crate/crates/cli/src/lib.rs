//! Library half of the `gdsm` command-line tool.
//!
//! [`run`] takes the argument list and output streams explicitly so the
//! commands can be exercised in-process.

pub mod args;
pub mod render;
pub mod report;
pub mod sweep;

use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use gdsm_core::{Error, MappingSpec};

use args::{AnalyzeArgs, Cli, Command, RenderArgs, SweepArgs};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Usage = 1,
    Spec = 2,
    Io = 3,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Spec(#[from] Error),
    /// The report was printed but describes an input on the non-generic set.
    #[error("base points lie on the non-generic set")]
    NonGeneric,
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Usage(_) | CliError::Spec(Error::BadTargets { .. }) => ExitStatus::Usage,
            CliError::Spec(_) | CliError::NonGeneric => ExitStatus::Spec,
            CliError::Io { .. } => ExitStatus::Io,
        }
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let help = matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion);
            let sink: &mut dyn Write = if help { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return if help { 0 } else { ExitStatus::Usage as i32 };
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(&a, out),
        Command::Render(r) => cmd_render(&r),
        Command::Sweep(s) => cmd_sweep(&s, out),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::NonGeneric) => ExitStatus::Spec as i32,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.status() as i32
        }
    }
}

fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}

pub fn cmd_analyze(a: &AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = MappingSpec::new(a.points.p0, a.points.p1, a.matrix)?;
    let report = report::analyze(&spec, a.targets, a.samples.max(2))?;
    let text = if a.json { report.to_json() } else { report.to_text() };
    out.write_all(text.as_bytes()).map_err(io_error("<stdout>"))?;
    if report.genericity {
        Ok(())
    } else {
        Err(CliError::NonGeneric)
    }
}

pub fn cmd_render(r: &RenderArgs) -> Result<(), CliError> {
    let spec = MappingSpec::new(r.points.p0, r.points.p1, r.matrix)?;
    let fig = render::build_figure(&spec, r.range, r.samples)?;
    std::fs::write(&r.out, render::to_svg(&fig)).map_err(io_error(&r.out))?;
    if let Some(csv) = &r.csv {
        std::fs::write(csv, render::to_csv(&fig)).map_err(io_error(csv))?;
    }
    Ok(())
}

pub fn cmd_sweep(s: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match (&s.matrices, &s.matrix_list) {
        (Some(inline), _) => inline.clone(),
        (None, Some(path)) => std::fs::read_to_string(path).map_err(io_error(path))?,
        (None, None) => return Err(CliError::Usage("one of --matrices or --matrix-list is required".into())),
    };
    let matrices = sweep::split_matrices(&text);
    if matrices.is_empty() {
        return Err(CliError::Usage("the matrix list is empty".into()));
    }
    let summary = sweep::run_sweep(s.points.p0, s.points.p1, &matrices, s.range, s.samples, &s.out_dir)
        .map_err(|(path, source)| CliError::Io { path, source })?;
    let _ = writeln!(
        out,
        "{} rendered, {} failed; summary in {}",
        summary.items.len() - summary.failures(),
        summary.failures(),
        s.out_dir.join("summary.json").display()
    );
    Ok(())
}
