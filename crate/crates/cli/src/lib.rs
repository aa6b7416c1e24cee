//! Front end for the `coherence-orders` binary.
//!
//! Every subcommand writes plain tables (CSV or JSON) plus the resolved
//! configuration into an output directory. `reproduce-all` additionally
//! compares its tables against the checked-in goldens.

pub mod args;
pub mod commands;
pub mod config;
pub mod figures;
pub mod golden;
pub mod output;
pub mod plots;
pub mod state_file;

use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{col}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("config {path}: {msg}")]
    Config { path: PathBuf, msg: String },
    #[error("{path}: {msg}")]
    Input { path: PathBuf, msg: String },
    #[error(transparent)]
    Numeric(#[from] coherence_orders::Error),
    #[error("{} golden cell(s) drifted:\n  {}", .0.len(), .0.join("\n  "))]
    GoldenMismatch(Vec<String>),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Parse { .. } | CliError::Config { .. }
            | CliError::Input { .. } => 1,
            CliError::Numeric(_) => 2,
            CliError::GoldenMismatch(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub use args::Cli;
pub use commands::run;
