use std::path::PathBuf;

use anosov_zeta_core::Error;
use thiserror::Error;

/// Process exit status for a failed run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Config = 1,
    Validation = 2,
    Resource = 3,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{}: line {line}: {msg}", path.display())]
    Format { path: PathBuf, line: usize, msg: String },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::Json { .. } => ExitStatus::Config,
            CliError::Csv(_) => ExitStatus::Config,
            CliError::Format { .. } | CliError::Verify(_) => ExitStatus::Validation,
            CliError::Engine(e) => match e {
                Error::Input(_) | Error::Completeness { .. } => ExitStatus::Config,
                Error::Resource { .. } => ExitStatus::Resource,
                _ => ExitStatus::Validation,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
