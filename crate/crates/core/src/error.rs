//! Crate-wide error type.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Inconsistent physical configuration (flux, filling, signs).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Two fields were combined on incompatible grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Malformed potential specification.
    #[error("invalid potential: {0}")]
    Potential(String),

    /// A lattice-sum truncation could not certify the requested tolerance.
    #[error("truncation cannot certify tolerance: {0}")]
    Truncation(String),

    /// A validation contract failed (orthonormality, Hermiticity, ...).
    #[error("validation failed: {0}")]
    Validation(String),

    /// An iterative solver exhausted its budget without converging.
    #[error("solver did not converge: {0}")]
    NonConverged(String),

    /// A combinatorial dimension exceeded the configured budget.
    #[error("dimension budget exceeded: {0}")]
    Budget(String),

    /// A documented precondition was violated by the caller.
    #[error("precondition violated: {0}")]
    Precondition(String),
}
