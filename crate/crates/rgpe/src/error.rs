//! Crate-wide error type.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter space: {0}")]
    InvalidSpace(String),

    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("empty observation set")]
    EmptyObservations,

    #[error("leave-one-out predictions undefined for fewer than 2 observations (got {0})")]
    LooUndefined(usize),

    #[error("ranking loss undefined for fewer than 2 target observations (got {0})")]
    LossUndefined(usize),

    #[error("kernel matrix not positive definite even at jitter {jitter:e}")]
    SingularKernel { jitter: f64 },

    #[error("covariance eigenvalue {eigenvalue:e} below the PSD repair threshold")]
    NotPositiveSemiDefinite { eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no unobserved candidates remain in the grid")]
    GridExhausted,

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { expected: u32, found: u32 },

    #[error("run file {path}: {message}")]
    RunFile { path: PathBuf, message: String },

    #[error("refusing to overwrite {0} without the overwrite flag")]
    WouldOverwrite(PathBuf),

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("objective value {value} below the declared known minimum {known_min}")]
    BelowKnownMin { value: f64, known_min: f64 },

    #[error("trace file error: {0}")]
    Trace(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
