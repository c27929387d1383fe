use thiserror::Error;

/// Errors raised by contract checks and resource guards.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("direction is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("direction must have at least 2 components, got {0}")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported dimension {0}; face complexes exist only for d = 2 or 3")]
    UnsupportedDimension(usize),
    #[error("radius must be nonnegative and finite, got {0}")]
    InvalidRadius(f64),
    #[error("invalid lattice spec: {0}")]
    InvalidSpec(String),
    #[error("invalid quadrature spec: {0}")]
    InvalidQuadrature(String),
    #[error("degenerate cell: {0}")]
    DegenerateCell(String),
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
