//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("CFL violation: dt = {dt:.3e} exceeds limit {limit:.3e}; suggested dt = {suggested:.3e}")]
    Cfl { dt: f64, limit: f64, suggested: f64 },

    #[error("admission rejected: {0}")]
    Admission(String),

    #[error("smallness regime lost: {0}")]
    SmallnessLost(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("did not converge after {iters} iterations (last residual {residual:.3e})")]
    NonConvergence { iters: usize, residual: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;
