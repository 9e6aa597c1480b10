use thiserror::Error;

/// Errors raised by the combinatorial and dynamical kernels.
#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a structural requirement (not a partition, mismatched
    /// ground sets, overlapping blocks, malformed observable, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A stated precondition of an operation does not hold for the given
    /// arguments (the operation itself is fine, the call site is not).
    #[error("precondition not met: {0}")]
    Precondition(String),

    /// The request exceeds a hard enumeration or expansion budget.
    #[error("capacity exceeded in {context}: required {required}, budget {budget}")]
    Capacity {
        context: String,
        required: u128,
        budget: u128,
    },

    /// A computation aborted with a diagnostic (e.g. an orbit sum that keeps
    /// finding low-frequency returns, which suggests a non-hyperbolic action).
    #[error("diagnostic: {0}")]
    Diagnostic(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn capacity(context: impl Into<String>, required: u128, budget: u128) -> Self {
        Error::Capacity {
            context: context.into(),
            required,
            budget,
        }
    }
}
