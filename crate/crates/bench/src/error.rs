use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] wsn_compress::Error),

    #[error("unknown method {0:?}")]
    UnknownMethod(String),

    #[error("unknown hardware profile {0:?}")]
    UnknownProfile(String),

    #[error("{source_name}:{line}: {message}")]
    Config {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{method} exceeded the tolerance: max error {max_error} > epsilon {epsilon} (n* = {n_star}, run {run_id})")]
    ToleranceViolation {
        method: String,
        n_star: usize,
        run_id: usize,
        epsilon: f64,
        max_error: f64,
    },

    #[error("dataset has {len} samples, fewer than the block length {block}")]
    DatasetTooShort { len: usize, block: usize },

    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
