use thiserror::Error;

/// Errors raised by table construction, evaluation and the explicit formulas.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("x = {x} lies outside the table (N = {n})")]
    OutOfTable { x: f64, n: usize },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("truncation insufficient: tail estimate {tail:e} exceeds tolerance {tol:e}")]
    TruncationInsufficient { tail: f64, tol: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
