use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter vector: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("initial state has zero density (log density {log_density})")]
    ZeroDensityStart { log_density: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("covariance matrix is not positive definite after regularization: {matrix}")]
    NotPositiveDefinite { matrix: String },

    #[error("trajectory diverged at t = {time}")]
    Diverged { time: f64 },

    #[error("observation interval {delta_t} is not a multiple of step size {step}")]
    MisalignedObservation { delta_t: f64, step: f64 },

    #[error("degenerate series: {0}")]
    Degenerate(String),

    #[error("insufficient samples: need {needed}, have {available}")]
    InsufficientSamples { needed: usize, available: usize },
}
