use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("singular system: pivot {pivot:e} below threshold {threshold:e}")]
    SingularSystem { pivot: f64, threshold: f64 },

    #[error("pole: denominator {0:e} vanishes at the requested point")]
    Pole(f64),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("{path}: row {row}: cannot parse {value:?} in column {column:?} as a finite number")]
    NonNumeric {
        path: PathBuf,
        row: usize,
        column: String,
        value: String,
    },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
