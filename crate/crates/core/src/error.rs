use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input failed a structural check (empty factor list, bad label length, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Explicit enumeration or dense construction would exceed a size guard.
    #[error("size guard exceeded: {0}")]
    TooLarge(String),

    #[error("fixed-point iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("tensor is not injective: {0}")]
    NotInjective(String),

    #[error("ill-conditioned gauge transform (condition number {0:.3e})")]
    IllConditioned(f64),

    /// A numerical identity that must hold did not (sum rule, cocycle relation, ...).
    #[error("consistency check failed: {0}")]
    Inconsistent(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

pub type Result<T> = std::result::Result<T, Error>;
