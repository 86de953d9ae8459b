use thiserror::Error;

use crate::linalg::LinalgError;

/// Crate-wide error.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("reflection violates {architecture} constraints: {detail}")]
    Constraint { architecture: &'static str, detail: String },
    #[error("undefined baseline: {0}")]
    UndefinedBaseline(String),
    #[error("trial {trial} failed: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}:{line}: {message}")]
    Config { path: String, line: usize, message: String },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
