use thiserror::Error;

/// Errors raised by the estimation and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A distribution parameter triple or pair is invalid.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The requested moment is infinite for these parameters.
    #[error("moment of order {order} does not exist: {reason}")]
    MomentDoesNotExist { order: u32, reason: String },

    /// An estimator is undefined for the supplied sample.
    #[error("estimator undefined: {0}")]
    UndefinedEstimator(String),

    /// Fewer expert opinions than the estimator needs.
    #[error("need at least {needed} expert opinions, got {got}")]
    InsufficientExperts { needed: usize, got: usize },

    /// Sample with zero spread where a positive spread is required.
    #[error("degenerate sample: {0}")]
    Degenerate(String),

    /// No hyper-parameters satisfy the requested prior constraint.
    #[error("infeasible constraint: {0}")]
    Infeasible(String),

    /// VaR estimates computed at different confidence levels.
    #[error("level mismatch: expected {expected}, found {found}")]
    LevelMismatch { expected: f64, found: f64 },

    /// A numerical routine failed to converge.
    #[error("internal numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}
