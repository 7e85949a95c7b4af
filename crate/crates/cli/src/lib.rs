//! Command-line driver: run files, CSV diagnostics, snapshots and the
//! verification experiments.

pub mod commands;
pub mod config_file;
pub mod csv;

use std::fmt;
use std::path::{Path, PathBuf};

pub use commands::{execute, Cli};
pub use config_file::{echo, parse_config, parse_config_str};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse { file: Option<PathBuf>, line: usize, field: Option<String>, message: String },
    Validation(String),
    Io(String),
    Solver(pnpcns_core::Error),
    /// The experiment ran but missed its threshold.
    Failed(String),
}

impl CliError {
    pub fn validation(e: pnpcns_core::Error) -> Self {
        match e.category() {
            "validation" => CliError::Validation(inner_message(&e)),
            _ => CliError::Solver(e),
        }
    }

    fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Parse { line, field, message, .. } => {
                CliError::Parse { file: Some(path.to_path_buf()), line, field, message }
            }
            other => other,
        }
    }

    /// Machine-readable category printed with every failure.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Parse { .. } => "parse",
            CliError::Validation(_) => "validation",
            CliError::Io(_) => "io",
            CliError::Solver(e) => e.category(),
            CliError::Failed(_) => "verification",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Parse { .. } => 3,
            CliError::Validation(_) => 4,
            CliError::Io(_) => 5,
            CliError::Solver(_) => 6,
        }
    }
}

fn inner_message(e: &pnpcns_core::Error) -> String {
    match e {
        pnpcns_core::Error::InvalidParameter(m) | pnpcns_core::Error::InvalidGrid(m) => m.clone(),
        other => other.to_string(),
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Io(m) | CliError::Failed(m) => f.write_str(m),
            CliError::Parse { file, line, field, message } => {
                if let Some(p) = file {
                    write!(f, "{}: ", p.display())?;
                }
                write!(f, "line {line}")?;
                if let Some(k) = field {
                    write!(f, ", field `{k}`")?;
                }
                write!(f, ": {message}")
            }
            CliError::Solver(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<pnpcns_core::Error> for CliError {
    fn from(e: pnpcns_core::Error) -> Self {
        CliError::validation(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
