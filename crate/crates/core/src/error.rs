use crate::numerics::Layer;

/// Errors raised across the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The origin has no spherical angles.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("construction failed: {0}")]
    Construction(String),

    /// A Monte Carlo run would exceed the configured trial budget.
    #[error("budget exceeded: {what} requires {required} trials, budget is {budget}")]
    BudgetExceeded {
        what: String,
        required: u128,
        budget: u128,
    },

    /// Demoting a log-layered value would overflow `f64`.
    #[error("value not representable below the {0:?} layer")]
    Overflow(Layer),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
