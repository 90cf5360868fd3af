use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("indeterminate intersection for tuple {tuple:?}: {detail}")]
    IndeterminateIntersection { tuple: Vec<usize>, detail: String },

    #[error("invalid slope ({p}, {q}): gcd must be 1")]
    InvalidSlope { p: i64, q: i64 },

    #[error("dimension {0} out of supported range")]
    DimensionOutOfRange(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
