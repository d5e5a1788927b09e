use thiserror::Error;

/// Errors surfaced by the numerical pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh parse error: {0}")]
    MeshParse(String),

    #[error("mesh validation error: {0}")]
    MeshValidation(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("coefficient evaluation failed: {0}")]
    CoefficientEval(String),

    #[error("single layer matrix not positive definite: smallest eigenvalue {min_eig:.3e}")]
    SingleLayerNotPositive { min_eig: f64 },

    #[error("matrix not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("eigenvalue solver failed to converge: {0}")]
    EigenSolver(String),

    #[error("spectral parameter {z} is within {distance:.3e} of eigenvalue {nearest}")]
    ResolventSingularity { z: f64, nearest: f64, distance: f64 },

    #[error("Laplace-transform tail diverges: lambda = {lambda} must stay below lambda_1 - {margin} = {threshold}")]
    DivergentTail { lambda: f64, threshold: f64, margin: f64 },

    #[error("metric constraint violated on cell {cell}: a-weighted |grad phi|^2 = {value:.6} > 1")]
    ConstraintViolation { cell: usize, value: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
