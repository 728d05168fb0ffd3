//! Experiment harness for the compression library: synthetic sweeps,
//! recorded datasets, tradeoff tables and formula refits, all as CSV.

pub mod config;
pub mod dataset;
pub mod error;
pub mod fit;
pub mod format;
pub mod methods;
pub mod sweep;
pub mod tradeoff;

pub use config::{ExperimentConfig, Hardware};
pub use error::BenchError;
pub use methods::Method;
pub use sweep::{run_sweep, ResultRow};
