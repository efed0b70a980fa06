use std::path::PathBuf;

use thiserror::Error;

/// Failures before or around a run. Config and I/O problems exit with code 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] jacobi_core::Error),
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> CliError {
        CliError::Config(msg.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;
