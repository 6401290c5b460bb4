use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A Cholesky pivot fell below the tolerance.
    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("matrix is not positive semidefinite (largest eigenvalue {0})")]
    NotPositiveSemidefinite(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not symmetric: entry ({row}, {col}) differs from its transpose by {diff}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    /// An argument lies outside the domain of the function.
    #[error("argument out of domain: {0}")]
    Domain(String),

    /// The theorem behind a method requires a precondition the input violates.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn ensure_finite(x: f64, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{what} must be finite, got {x}")))
    }
}

pub(crate) fn ensure_open_unit(beta: f64, what: &str) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("{what} must lie in (0, 1), got {beta}")))
    }
}
