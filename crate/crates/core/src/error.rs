use thiserror::Error;

/// Errors produced by the key-rate calculus, the planners and the reconciliation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A covariance matrix or symplectic eigenvalue that no physical state can have.
    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    /// The requested operating point cannot be reached (e.g. it would need a detector
    /// with higher efficiency than the installed one).
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("rate {0} is not on the code's rate grid")]
    RateNotOnGrid(f64),

    #[error("not monotone: {0}")]
    NotMonotone(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
