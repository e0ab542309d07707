use thiserror::Error;

/// Unified error type for the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),
    #[error("eigendecomposition failed: {0}")]
    Eigendecomposition(String),
    #[error("eigenvalue too close to a spectral-projection boundary: {0}")]
    BoundaryEigenvalue(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("classification fit failed: {0}")]
    FitFailure(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
