use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative procedure hit its cap before meeting its tolerance.
    #[error("no convergence: {what} (achieved {achieved:e})")]
    NonConvergence { what: String, achieved: f64 },

    /// A finite prefix is too short to certify the requested property.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A mathematical identity that must hold failed numerically.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
