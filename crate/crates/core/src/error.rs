use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("{path}, row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("class {label:+} has no samples")]
    EmptyClass { label: i8 },

    #[error("dataset is empty after filtering")]
    EmptyDataset,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("query point outside covariate support (kernel weight sum {weight_sum:e})")]
    OutsideSupport { weight_sum: f64 },

    #[error("objective increased from {previous} to {current} at DCA iteration {iteration}")]
    Divergence {
        iteration: usize,
        previous: f64,
        current: f64,
        trace: Vec<f64>,
    },

    #[error("no sign change of the density difference near z = {z:?}")]
    NoSignChange { z: Vec<f64> },

    #[error("gamma shape/scale non-positive after {attempts} covariate redraws")]
    ResampleCap { attempts: usize },

    #[error("all cross-validation folds were skipped")]
    AllFoldsSkipped,

    #[error("{failed} of {total} replications failed")]
    TooManyFailures { failed: usize, total: usize },
}
