use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The forward model is singular or unphysical at the requested point
    /// (e.g. a sphere depth that is not strictly positive).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("functional diverged to a non-finite value at iteration {iteration}")]
    Diverged { iteration: usize },

    #[error("gamma estimation impossible: every sampled pair was degenerate")]
    EstimationImpossible,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
