use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// Adaptive quadrature stopped before reaching the requested tolerance.
    #[error("quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64, value: f64 },

    /// A series or continued fraction hit its iteration cap.
    #[error("{func} did not converge after {iterations} iterations")]
    Convergence { func: &'static str, iterations: usize },

    /// Spectrum truncation cap reached before the tail became negligible.
    #[error("truncation cap {cap} reached with last eigenvalue {last:.3e}")]
    Truncation { cap: usize, last: f64, partial: Vec<f64> },

    /// A matrix that must be positive definite was not.
    #[error("matrix is not positive definite ({context})")]
    NotPositiveDefinite { context: &'static str },

    /// Invalid configuration of an ensemble or parameter set.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
