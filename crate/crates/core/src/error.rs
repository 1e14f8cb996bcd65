use thiserror::Error;

/// Errors raised by the coding primitives and file codecs.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),

    #[error("{erasures} erasures, decoder requires fewer than {limit}")]
    TooManyErasures { erasures: usize, limit: usize },

    #[error("{what} exceeds cap: {value} > {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch { expected: Vec<usize>, actual: Vec<usize> },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, CodeError>;
