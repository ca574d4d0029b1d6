use thiserror::Error;

/// Failures raised by the numerical routines.
///
/// `Domain` means the caller violated a precondition; everything else is a
/// numerical breakdown that may go away with different tolerances.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge on [{lo}, {hi}] (estimate {estimate:e}, error {error:e})")]
    Quadrature {
        lo: f64,
        hi: f64,
        estimate: f64,
        error: f64,
    },

    #[error("no sign change: {0}")]
    NoSignChange(String),

    #[error("linear program unbounded: {0}")]
    Unbounded(String),

    #[error("root isolation failed: {0}")]
    RootIsolation(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
