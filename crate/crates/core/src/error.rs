use thiserror::Error;

/// Errors raised by the bound, estimation and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("order {alpha} is outside the curve domain [{min}, {max}]")]
    OrderOutOfDomain { alpha: f64, min: f64, max: f64 },

    /// A sign or bracketing condition that must hold for consistent inputs did not.
    #[error("numeric assertion failed: {0}")]
    NumericAssertion(String),

    #[error("input error: {0}")]
    Input(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures that indicate inconsistent numbers rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NumericAssertion(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
