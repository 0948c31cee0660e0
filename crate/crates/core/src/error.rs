use thiserror::Error;

/// Errors raised by the simulation and estimation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("resolvent solve did not converge within {max_iter} iterations (r = {r})")]
    IterationLimit { r: f64, max_iter: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("sigma is not symmetric positive definite: {0}")]
    InvalidSigma(String),

    #[error("sigma inverse could not be applied: {0}")]
    SingularSigma(String),

    #[error("default q-coefficients infeasible at index {index}: lambda = {lambda} <= i^(3/2) = {q}")]
    InfeasibleQ { index: usize, lambda: f64, q: f64 },

    #[error("non-finite state at step {step}")]
    NonFiniteState { step: usize },

    #[error("operation requires a linear model with zero drift and diagonal sigma")]
    NotLinearModel,

    #[error("tail integral of Phi diverges: {0}")]
    DivergentTail(String),

    #[error("inconsistent jump description at breakpoint {at}: {reason}")]
    InconsistentJump { at: f64, reason: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
