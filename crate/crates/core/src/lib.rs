//! Lossy time-series compression for energy-constrained sensor nodes.
//!
//! Every compressor in this crate is instrumented: besides its compressed
//! representation it returns an [`OpCount`] tallying the floating point
//! additions, subtractions, multiplications, divisions and comparisons it
//! executed. The [`energy`] module turns those tallies and the payload size
//! of the representation into CPU and radio energy, and [`analysis`] holds
//! the closed-form compression/complexity fits used to decide whether
//! compressing pays off on a given device.
//!
//! Sample indices are zero-based throughout.

pub mod analysis;
pub mod energy;
pub mod error;
pub mod linalg;
pub mod model;
pub mod ops;
pub mod pla;
pub mod repr;
pub mod series;
pub mod signal;
pub mod spectral;
pub mod transform;

pub use error::{Error, Result};
pub use ops::OpCount;
pub use repr::CompressedRepresentation;
pub use series::{TimeSeries, Tolerance};
