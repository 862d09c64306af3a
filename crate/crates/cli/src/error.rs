use std::path::PathBuf;

use thiserror::Error;

/// Failure of a CLI command, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed input {path}: {message}")]
    Malformed { path: PathBuf, message: String },
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Malformed { .. } => 2,
            CliError::Io { .. } => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<mosoo_core::Error> for CliError {
    fn from(e: mosoo_core::Error) -> Self {
        use mosoo_core::Error as E;
        match e {
            E::NonFiniteObjective { .. } | E::NonFiniteValue { .. } => CliError::Numeric(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
