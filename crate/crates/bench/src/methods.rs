//! Named compressors runnable by the harness.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use wsn_compress::model::{self, AarmaParams, ModelPieces, MAX_AR_ORDER};
use wsn_compress::spectral::{self, WindowedVariant};
use wsn_compress::{pla, CompressedRepresentation, OpCount, TimeSeries, Tolerance};

use crate::error::BenchError;

/// Highest polynomial degree accepted for `pr<p>`.
pub const MAX_PR_ORDER: usize = 8;

/// Variant order is the row order of emitted CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Ltc,
    Plamlis,
    Eplamlis,
    Pr(usize),
    MaAr(usize),
    Aarma,
    Fft,
    FftLpf,
    FftWin,
    FftLpfWin,
    Dct,
    DctLpf,
}

impl Method {
    /// The default method set.
    pub fn all() -> Vec<Method> {
        let mut v = vec![Method::Ltc, Method::Plamlis, Method::Eplamlis];
        v.extend((2..=5).map(Method::Pr));
        v.extend((2..=5).map(Method::MaAr));
        v.extend([
            Method::Aarma,
            Method::Fft,
            Method::FftLpf,
            Method::FftWin,
            Method::FftLpfWin,
            Method::Dct,
            Method::DctLpf,
        ]);
        v
    }

    /// Whether the method transforms the core together with `W` flanking samples.
    pub fn is_windowed(self) -> bool {
        matches!(self, Method::FftWin | Method::FftLpfWin)
    }

    /// Compresses `input[core]`. Windowed methods also see the samples of
    /// `input` around the core; the others only the core.
    pub fn compress(self, input: &[f64], core: Range<usize>, tol: Tolerance) -> Result<Outcome, BenchError> {
        let n = core.len();
        let windowed = |variant| -> Result<Outcome, BenchError> {
            let (sel, ops) = spectral::compress_with_context(input, core.clone(), tol, variant)?;
            let reconstruction = spectral::spectral_decompress(&sel)?.into_samples();
            Ok(Outcome::new(sel.into(), ops, reconstruction))
        };
        if self.is_windowed() {
            return match self {
                Method::FftWin => windowed(WindowedVariant::Fft),
                _ => windowed(WindowedVariant::FftLpf),
            };
        }
        let ts = TimeSeries::new(input[core].to_vec())?;
        let outcome = match self {
            Method::Ltc => segments(pla::ltc_compress(&ts, tol)?, n)?,
            Method::Plamlis => segments(pla::plamlis_compress(&ts, tol)?, n)?,
            Method::Eplamlis => segments(pla::eplamlis_compress(&ts, tol)?, n)?,
            Method::Pr(p) => {
                let (pieces, ops) = model::pr_compress(&ts, tol, p)?;
                let rec = model::model_decompress(ModelPieces::Polynomials(&pieces), n)?;
                Outcome::new(pieces.into(), ops, rec.into_samples())
            }
            Method::MaAr(p) => ar(model::ma_ar_compress(&ts, tol, p)?, n)?,
            Method::Aarma => ar(model::aarma_compress(&ts, tol, AarmaParams::default())?, n)?,
            Method::Fft => selection(spectral::fft_compress(&ts, tol)?)?,
            Method::FftLpf => selection(spectral::fft_lpf_compress(&ts, tol)?)?,
            Method::Dct => selection(spectral::dct_compress(&ts, tol)?)?,
            Method::DctLpf => selection(spectral::dct_lpf_compress(&ts, tol)?)?,
            Method::FftWin | Method::FftLpfWin => unreachable!(),
        };
        Ok(outcome)
    }
}

fn segments((seg, ops): (pla::SegmentList, OpCount), n: usize) -> Result<Outcome, BenchError> {
    let rec = pla::pla_decompress(&seg, n)?;
    Ok(Outcome::new(seg.into(), ops, rec.into_samples()))
}

fn ar((records, ops): (Vec<model::ArModelRecord>, OpCount), n: usize) -> Result<Outcome, BenchError> {
    let rec = model::model_decompress(ModelPieces::Ar(&records), n)?;
    Ok(Outcome::new(records.into(), ops, rec.into_samples()))
}

fn selection((sel, ops): (spectral::SpectralSelection, OpCount)) -> Result<Outcome, BenchError> {
    let rec = spectral::spectral_decompress(&sel)?;
    Ok(Outcome::new(sel.into(), ops, rec.into_samples()))
}

/// A compressor's output together with what the decoder makes of it.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub representation: CompressedRepresentation,
    pub ops: OpCount,
    pub reconstruction: Vec<f64>,
}

impl Outcome {
    fn new(representation: CompressedRepresentation, ops: OpCount, reconstruction: Vec<f64>) -> Self {
        Self {
            representation,
            ops,
            reconstruction,
        }
    }

    pub fn max_error(&self, original: &[f64]) -> f64 {
        wsn_compress::series::max_abs_error(&self.reconstruction, original)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Ltc => write!(f, "ltc"),
            Method::Plamlis => write!(f, "plamlis"),
            Method::Eplamlis => write!(f, "eplamlis"),
            Method::Pr(p) => write!(f, "pr{p}"),
            Method::MaAr(p) => write!(f, "maar{p}"),
            Method::Aarma => write!(f, "aarma"),
            Method::Fft => write!(f, "fft"),
            Method::FftLpf => write!(f, "fft_lpf"),
            Method::FftWin => write!(f, "fft_win"),
            Method::FftLpfWin => write!(f, "fft_lpf_win"),
            Method::Dct => write!(f, "dct"),
            Method::DctLpf => write!(f, "dct_lpf"),
        }
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || BenchError::UnknownMethod(s.to_string());
        let order = |digits: &str, max: usize| -> Result<usize, BenchError> {
            match digits.parse::<usize>() {
                Ok(p) if (1..=max).contains(&p) => Ok(p),
                _ => Err(unknown()),
            }
        };
        Ok(match s.trim() {
            "ltc" => Method::Ltc,
            "plamlis" => Method::Plamlis,
            "eplamlis" => Method::Eplamlis,
            "aarma" => Method::Aarma,
            "fft" => Method::Fft,
            "fft_lpf" => Method::FftLpf,
            "fft_win" => Method::FftWin,
            "fft_lpf_win" => Method::FftLpfWin,
            "dct" => Method::Dct,
            "dct_lpf" => Method::DctLpf,
            other => {
                if let Some(p) = other.strip_prefix("maar") {
                    Method::MaAr(order(p, MAX_AR_ORDER)?)
                } else if let Some(p) = other.strip_prefix("pr") {
                    Method::Pr(order(p, MAX_PR_ORDER)?)
                } else {
                    return Err(unknown());
                }
            }
        })
    }
}
