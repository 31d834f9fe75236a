//! Scenario runner for the fockmarket models.
//!
//! A scenario file names a model, its configuration, a time grid and the
//! channels to record. Running it writes a CSV table, an optional SVG plot and
//! a conservation report.

pub mod engine;
pub mod error;
pub mod output;
pub mod scenario;

pub use engine::{run, verify, ConservationReport, RunOptions, RunOutput};
pub use error::{CliError, CliResult, EXIT_CONSERVATION, EXIT_INVALID};
pub use scenario::Scenario;

use std::path::{Path, PathBuf};

use fockmarket_core::fock::DEFAULT_MAX_DIM;

/// Environment variable overriding the sector-dimension cap.
pub const MAX_DIM_VAR: &str = "FOCKMARKET_MAX_DIM";

/// Sector cap from `FOCKMARKET_MAX_DIM`, else the library default.
pub fn max_dim_from_env() -> CliResult<usize> {
    match std::env::var(MAX_DIM_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| CliError::Invalid(format!("{MAX_DIM_VAR}='{v}' is not a positive integer"))),
        Err(_) => Ok(DEFAULT_MAX_DIM),
    }
}

/// Paths written by [`write_artifacts`].
#[derive(Clone, Debug, PartialEq)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
    pub report: PathBuf,
}

pub fn write_artifacts(out_dir: &Path, stem: &str, output: &RunOutput, svg: bool) -> CliResult<Artifacts> {
    std::fs::create_dir_all(out_dir)?;
    let csv = out_dir.join(format!("{stem}.csv"));
    std::fs::write(&csv, output.table.to_csv())?;
    let svg = if svg {
        let path = out_dir.join(format!("{stem}.svg"));
        std::fs::write(&path, output::svg_plot(stem, &output.table))?;
        Some(path)
    } else {
        None
    };
    let report = out_dir.join(format!("{stem}.conservation.txt"));
    std::fs::write(&report, output.report.render(stem))?;
    Ok(Artifacts { csv, svg, report })
}
