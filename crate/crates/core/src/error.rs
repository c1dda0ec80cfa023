use thiserror::Error;

/// Errors raised by the geometry, flow and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point or parameter lies outside the admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A weight preset was rejected by validation or could not be parsed.
    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    /// A shape lost (or never had) the convexity class an operation needs.
    #[error("convexity violation: {0}")]
    Convexity(String),

    /// A computation produced NaN or infinity.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// Two grids that must agree do not.
    #[error("grid mismatch: expected {expected} samples, got {got}")]
    GridMismatch { expected: usize, got: usize },

    /// A map expected to be strictly monotone is not.
    #[error("not monotone: {0}")]
    NotMonotone(String),

    /// Catch-all for solver failures (non-convergence, blow-up).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors that indicate a failed computation rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convexity(_) | Error::NonFinite(_) | Error::Numerical(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
