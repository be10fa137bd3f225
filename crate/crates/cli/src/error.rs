use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("ingestion error at line {line}: {message}")]
    Ingest { line: u64, message: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error(transparent)]
    Core(#[from] cinterf::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) | CliError::Core(_) => 2,
            CliError::Ingest { .. } => 3,
            CliError::Io(_) => 4,
            CliError::NonConvergence(_) => 5,
        })
    }

    pub(crate) fn config(key: &str, constraint: impl std::fmt::Display) -> Self {
        CliError::Config(format!("`{key}` {constraint}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
