//! Batch commands behind the `memesim` binary.
//!
//! Exit codes: 0 success, 2 invalid configuration or arguments, 3 I/O
//! failure, 4 data error from fitting or log parsing. Failures print one line
//! `error: <reason>: <detail>` to stderr, where `<reason>` is a stable token
//! such as `degenerate-response`.

mod commands;
mod config_file;
pub mod svg;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::error::ConfigError;
use crate::logio::ParseError;
use crate::stats::StatsError;

pub use commands::{
    cmd_analyze, cmd_fit, cmd_simulate, cmd_sweep, load_config, SimulationSummary, SweepRow,
    BINS_HEADER, HITS_HEADER, SWEEP_FIXED_COLUMNS, TIMESERIES_HEADER,
};
pub use config_file::{RunConfigFile, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_DATA: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Stats(#[from] StatsError),
    #[error("{}: {source}", path.display())]
    Log { path: PathBuf, source: ParseError },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. }
            | CliError::Log {
                source: ParseError::Io(_),
                ..
            } => EXIT_IO,
            CliError::Stats(_) | CliError::Log { .. } => EXIT_DATA,
        }
    }

    /// Stable reason token for scripts.
    pub fn reason(&self) -> &'static str {
        match self {
            CliError::Config(_) => "invalid-config",
            CliError::Io { .. }
            | CliError::Log {
                source: ParseError::Io(_),
                ..
            } => "io-error",
            CliError::Stats(e) => e.code(),
            CliError::Log { .. } => "bad-log-line",
        }
    }

    /// The single stderr line for this error.
    pub fn report_line(&self) -> String {
        let detail = self.to_string().replace('\n', " ");
        format!("error: {}: {detail}", self.reason())
    }
}
