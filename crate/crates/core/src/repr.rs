//! The compressed representations produced by the codecs.

use crate::model::{ArModelRecord, PolynomialPiece};
use crate::pla::SegmentList;
use crate::spectral::SpectralSelection;

/// Output of any compressor, sized by [`crate::energy::payload_bits`].
#[derive(Debug, Clone, PartialEq)]
pub enum CompressedRepresentation {
    /// Uncompressed passthrough of `samples` values.
    Raw { samples: usize },
    Segments(SegmentList),
    Polynomials(Vec<PolynomialPiece>),
    ArModels(Vec<ArModelRecord>),
    /// One selection per transformed window.
    Spectral(Vec<SpectralSelection>),
}

impl From<SegmentList> for CompressedRepresentation {
    fn from(s: SegmentList) -> Self {
        Self::Segments(s)
    }
}

impl From<Vec<PolynomialPiece>> for CompressedRepresentation {
    fn from(p: Vec<PolynomialPiece>) -> Self {
        Self::Polynomials(p)
    }
}

impl From<Vec<ArModelRecord>> for CompressedRepresentation {
    fn from(r: Vec<ArModelRecord>) -> Self {
        Self::ArModels(r)
    }
}

impl From<SpectralSelection> for CompressedRepresentation {
    fn from(s: SpectralSelection) -> Self {
        Self::Spectral(vec![s])
    }
}

impl From<Vec<SpectralSelection>> for CompressedRepresentation {
    fn from(s: Vec<SpectralSelection>) -> Self {
        Self::Spectral(s)
    }
}
