use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// The variants are grouped by what the caller can do about them: domain
/// errors are bad inputs, resource errors are caps that can be raised,
/// consistency errors indicate a bug.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Domain(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("unsupported realization: {0}")]
    Unsupported(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("basis context mismatch: operands live over different balls")]
    ContextMismatch,

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("solver environment failure: {0}")]
    SolverEnvironment(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl ToString) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
