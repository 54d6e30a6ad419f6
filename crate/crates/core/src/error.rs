use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NotConverged { sweeps: usize, residual: f64 },

    #[error("parameter `{name}` = {value} is out of range: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("not a density matrix: {reason}")]
    NotDensityMatrix { reason: String },

    #[error("reconstructed matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("state is not an X-state (largest off-pattern entry {max_entry:e}); use {suggestion}")]
    NotXState { max_entry: f64, suggestion: &'static str },

    #[error("steering party's marginal is pure (|Bloch vector| = {norm}); steering ellipsoid is undefined")]
    PureMarginal { norm: f64 },

    #[error("marginal is singular (minimum eigenvalue {min_eigenvalue:e}); local filter cannot be inverted")]
    SingularMarginal { min_eigenvalue: f64 },

    #[error("correlation matrix is singular or not diagonal: {reason}")]
    UnsupportedCorrelationMatrix { reason: String },

    #[error("steered marginal is degenerate and the ellipsoid has no symmetry axis through the origin; use the measurement-sweep oracle")]
    UnsupportedDegenerateMarginal,

    #[error("unknown subsystem `{0}` (expected `first` or `second`)")]
    UnknownSubsystem(String),
}
