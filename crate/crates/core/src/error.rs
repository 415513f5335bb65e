use thiserror::Error;

use crate::hypergraphon::Violation;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported signature: {0}")]
    UnsupportedSignature(String),

    #[error("incomplete table: {0}")]
    IncompleteTable(String),

    #[error("hypergraphon fails Sym(k) coherence at {} cell vector(s)", .0.len())]
    Incoherent(Vec<Violation>),

    #[error("resource limit: {what} needs {required} elementary operations, limit is {limit}")]
    ResourceLimit {
        what: String,
        required: String,
        limit: u64,
    },

    #[error("insufficient gamma table: {0}")]
    InsufficientGamma(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
