use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty measure: at least one point is required")]
    EmptyMeasure,

    #[error("non-finite value {value} at row {row}, column {column}")]
    NonFinite { row: usize, column: usize, value: f64 },

    #[error("negative weight {value} at row {row}")]
    NegativeWeight { row: usize, value: f64 },

    #[error("weights sum to {sum}, expected 1")]
    WeightsNotNormalized { sum: f64 },

    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("gamma must lie in the open interval (0, 2), got {0}")]
    InvalidGamma(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("direction has norm {norm}; expected a unit vector")]
    NonUnitDirection { norm: f64 },

    #[error("instance has {size} points, above the exact-solver cap of {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {achieved:e})")]
    QuadratureFailed { tol: f64, achieved: f64 },

    #[error("loss became non-finite at step {step}")]
    Diverged { step: usize },

    #[error("parameter Jacobian disagrees with finite differences (relative error {rel_err:e})")]
    JacobianMismatch { rel_err: f64 },

    #[error("codebook construction failed: best minimum distance {achieved} < target {target}")]
    CodebookFailed { achieved: f64, target: f64 },

    #[error("construction density becomes negative (min {min_density:e}); epsilon {epsilon} is too large")]
    NegativeDensity { epsilon: f64, min_density: f64 },

    #[error("grid check failed: {0}")]
    GridResolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
