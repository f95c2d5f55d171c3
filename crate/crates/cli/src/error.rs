use std::path::PathBuf;

use thiserror::Error;

/// Exit statuses. Clap's own usage errors also exit with 2.
pub const EXIT_BAD_INPUT: u8 = 2;
pub const EXIT_SINGULAR_ONLY: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write `{path}`: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    BadInput(String),
    #[error(transparent)]
    Core(#[from] finapprox::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn internal(e: impl std::fmt::Display) -> Self {
        CliError::Internal(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_BAD_INPUT,
        }
    }
}
