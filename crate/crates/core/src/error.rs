use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("frame is rank deficient (singular value ratio {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("frame is not isotropic (max |F^T J F| = {defect:e})")]
    NotIsotropic { defect: f64 },

    #[error("frame is ill-conditioned (condition number {cond:e})")]
    IllConditioned { cond: f64 },

    #[error("precondition failed: {0}")]
    NotTransversal(String),

    #[error("vector is not in the sum of the subspaces (residual {residual:e})")]
    DecompositionResidual { residual: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("matrix is not hyperbolic (min |Re mu| = {margin:e})")]
    NotHyperbolic { margin: f64 },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("mesh too coarse: {0}")]
    MeshTooCoarse(String),

    #[error("invalid boundary condition: {0}")]
    InvalidBoundary(String),

    #[error("spectral flow sweep failed: {0}")]
    Sweep(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
