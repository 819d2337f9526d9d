//! Command-line workflows for cumulative-difference analysis: CSV
//! ingestion, the analysis pipeline, JSON/SVG plot emission, and the
//! Monte-Carlo coverage harness. The `pairdiff` binary wires these up;
//! everything is also callable as a library.

pub mod error;
pub mod ingest;
pub mod json;
pub mod pipeline;
pub mod svg;

pub use error::CliError;
pub use ingest::{ingest_csv, ColumnMap, Ingested};
pub use pipeline::{analyze, coverage, coverage_seq, AnalyzeConfig, BinStrategy, PlotBundle};

use std::fs;
use std::path::{Path, PathBuf};

/// Output format selector for [`emit_plots`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Svg,
    Json,
    Both,
}

impl Format {
    fn wants_json(&self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    fn wants_svg(&self) -> bool {
        matches!(self, Format::Svg | Format::Both)
    }
}

/// Writes the analysis document and plots into `out_dir`, returning the
/// paths written. JSON carries every numeric series verbatim; SVG is
/// presentation only.
pub fn emit_plots(
    bundle: &PlotBundle,
    format: Format,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let mut write = |name: String, content: String| -> Result<(), CliError> {
        let path = out_dir.join(name);
        fs::write(&path, content)?;
        written.push(path);
        Ok(())
    };
    if format.wants_json() {
        write("analysis.json".into(), json::bundle_to_json(bundle))?;
    }
    if format.wants_svg() {
        write("cumulative.svg".into(), svg::cumulative_svg(bundle))?;
        for entry in &bundle.diagrams {
            write(
                format!("reliability_{}_{}.svg", entry.strategy, entry.bins_requested),
                svg::reliability_svg(entry),
            )?;
        }
        if let Some(scatter) = &bundle.scatter {
            write("covariates.svg".into(), svg::scatter_svg(scatter))?;
        }
    }
    Ok(written)
}
