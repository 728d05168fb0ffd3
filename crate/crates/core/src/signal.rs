//! Synthetic stationary signals, sample autocorrelation and CSV ingest.

use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::ops::OpCount;
use crate::series::TimeSeries;
use crate::transform::{Direction, Fft};

/// Gaussian autocorrelation `rho(n) = exp(-a n^2)` reaching `delta` at lag `n_star`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationSpec {
    n_star: usize,
    delta: f64,
    a: f64,
}

impl CorrelationSpec {
    pub fn new(n_star: usize, delta: f64) -> Result<Self> {
        if n_star == 0 {
            return Err(invalid("correlation length must be positive"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
        }
        let a = -delta.ln() / (n_star * n_star) as f64;
        Ok(Self { n_star, delta, a })
    }

    pub fn n_star(&self) -> usize {
        self.n_star
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Decay rate `a = -ln(delta) / n_star^2`.
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn rho(&self, lag: f64) -> f64 {
        (-self.a * lag * lag).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma_noise: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma_noise: f64, seed: u64) -> Result<Self> {
        if !sigma_noise.is_finite() || sigma_noise < 0.0 {
            return Err(invalid(format!("noise standard deviation must be finite and >= 0, got {sigma_noise}")));
        }
        Ok(Self { sigma_noise, seed })
    }
}

/// Length of the circular realization a window of `length` samples is cut from.
fn realization_len(spec: &CorrelationSpec, length: usize) -> usize {
    4 * length.max(2 * spec.n_star())
}

/// Generates a stationary Gaussian series with the autocorrelation of `spec`.
///
/// A Hermitian standard Gaussian spectrum (the DFT of white noise) is shaped
/// by the square root of the DFT of the circularly sampled correlation
/// (negative values clamped to zero) and transformed back. The realization
/// is at least four times longer than requested and the output is cut from
/// its middle, away from the circular wrap. The result is scaled to the
/// requested mean and variance, then white noise of `sigma_noise` is added.
/// Deterministic in `noise.seed`.
pub fn generate_correlated(
    spec: &CorrelationSpec,
    length: usize,
    mean: f64,
    variance: f64,
    noise: &NoiseSpec,
) -> Result<TimeSeries> {
    if length == 0 {
        return Err(invalid("length must be positive"));
    }
    if !mean.is_finite() || !variance.is_finite() {
        return Err(invalid("mean and variance must be finite"));
    }
    if variance <= 0.0 {
        return Err(invalid(format!("variance must be positive, got {variance}")));
    }
    if length < 2 * spec.n_star() {
        log::warn!(
            "series of {length} samples is shorter than twice the correlation length {}",
            spec.n_star()
        );
    }

    let total = realization_len(spec, length);
    let fft = Fft::new(total);
    let mut scratch = OpCount::ZERO;

    let mut rho: Vec<Complex64> = (0..total)
        .map(|k| {
            let lag = k.min(total - k) as f64;
            Complex64::new(spec.rho(lag), 0.0)
        })
        .collect();
    fft.process(&mut rho, Direction::Forward, &mut scratch);
    let shaping: Vec<f64> = rho.iter().map(|s| s.re.max(0.0).sqrt()).collect();

    let mut signal_rng = ChaCha8Rng::seed_from_u64(noise.seed);
    signal_rng.set_stream(1);
    let mut spectrum: Vec<Complex64> = (0..total)
        .map(|_| Complex64::new(StandardNormal.sample(&mut signal_rng), 0.0))
        .collect();
    fft.process(&mut spectrum, Direction::Forward, &mut scratch);
    for (x, s) in spectrum.iter_mut().zip(&shaping) {
        *x *= *s;
    }
    fft.process(&mut spectrum, Direction::Inverse, &mut scratch);

    let mut noise_rng = ChaCha8Rng::seed_from_u64(noise.seed);
    noise_rng.set_stream(2);
    let offset = (total - length) / 2;
    let sd = variance.sqrt();
    let samples = spectrum[offset..offset + length]
        .iter()
        .map(|c| {
            let w: f64 = StandardNormal.sample(&mut noise_rng);
            mean + sd * c.re + noise.sigma_noise * w
        })
        .collect();
    TimeSeries::with_meta(samples, 1.0, format!("gauss-corr n*={} seed={}", spec.n_star(), noise.seed))
}

fn centered(ts: &TimeSeries) -> Result<(Vec<f64>, f64)> {
    let mu = ts.mean();
    let dev: Vec<f64> = ts.samples().iter().map(|x| x - mu).collect();
    let var = dev.iter().map(|d| d * d).sum::<f64>() / dev.len() as f64;
    if var <= 0.0 {
        return Err(Error::DegenerateInput("constant series has no autocorrelation".into()));
    }
    Ok((dev, var))
}

fn lag_correlation(dev: &[f64], var: f64, lag: usize) -> f64 {
    let n = dev.len();
    let s: f64 = dev[..n - lag].iter().zip(&dev[lag..]).map(|(a, b)| a * b).sum();
    s / ((n - lag) as f64 * var)
}

/// Sample autocorrelation at lags `0..=max_lag`, each lag normalized by the
/// number of overlapping pairs and the sample variance.
pub fn autocorrelation(ts: &TimeSeries, max_lag: usize) -> Result<Vec<f64>> {
    if max_lag >= ts.len() {
        return Err(invalid(format!("max_lag {max_lag} must be below the length {}", ts.len())));
    }
    let (dev, var) = centered(ts)?;
    Ok((0..=max_lag).map(|lag| lag_correlation(&dev, var, lag)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrelationLength {
    pub lag: usize,
    /// No lag up to the search limit dropped below the threshold.
    pub saturated: bool,
}

/// Smallest lag whose sample autocorrelation drops to `delta`, searched
/// up to half the series length.
pub fn correlation_length(ts: &TimeSeries, delta: f64) -> Result<CorrelationLength> {
    correlation_length_with_limit(ts, delta, ts.len() / 2)
}

pub fn correlation_length_with_limit(ts: &TimeSeries, delta: f64, max_lag: usize) -> Result<CorrelationLength> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    if ts.len() < 2 {
        return Err(Error::DegenerateInput("need at least 2 samples".into()));
    }
    let max_lag = max_lag.clamp(1, ts.len() - 1);
    let (dev, var) = centered(ts)?;
    for lag in 1..=max_lag {
        if reaches(lag_correlation(&dev, var, lag), delta) {
            return Ok(CorrelationLength { lag, saturated: false });
        }
    }
    Ok(CorrelationLength {
        lag: max_lag,
        saturated: true,
    })
}

/// Below `delta`, or equal to it up to rounding: `CorrelationSpec` puts
/// `rho(n_star)` exactly on the threshold.
fn reaches(rho: f64, delta: f64) -> bool {
    rho < delta * (1.0 + CROSSING_REL_TOL)
}

const CROSSING_REL_TOL: f64 = 1e-12;

/// First lag `>= 1` of an autocorrelation sequence (lag 0 first) that drops
/// to `delta`.
pub fn first_lag_below(rho: &[f64], delta: f64) -> Option<usize> {
    (1..rho.len()).find(|&lag| reaches(rho[lag], delta))
}

/// Reads one named column of a headed CSV file.
pub fn load_csv(path: impl AsRef<Path>, column: &str, sample_interval: f64) -> Result<TimeSeries> {
    load_csv_with_delimiter(path, column, sample_interval, b',')
}

pub fn load_csv_with_delimiter(
    path: impl AsRef<Path>,
    column: &str,
    sample_interval: f64,
    delimiter: u8,
) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let csv_err = |message: String| Error::Csv {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader.headers().map_err(|e| csv_err(e.to_string()))?.clone();
    let idx = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| csv_err(format!("no column named {column:?}")))?;

    let mut samples = Vec::new();
    for (i, record) in reader.records().enumerate() {
        // Line 1 is the header.
        let row = i + 2;
        let record = record.map_err(|e| csv_err(format!("row {row}: {e}")))?;
        let cell = record.get(idx).unwrap_or("");
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => samples.push(v),
            _ => {
                return Err(Error::NonNumeric {
                    path: path.to_path_buf(),
                    row,
                    column: column.to_string(),
                    value: cell.to_string(),
                })
            }
        }
    }
    if samples.is_empty() {
        return Err(csv_err(format!("column {column:?} has no data rows")));
    }
    let label = format!("{}:{column}", path.display());
    TimeSeries::with_meta(samples, sample_interval, label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn decay_rate_hits_delta_at_n_star() {
        for (n, d) in [(1, 0.05), (50, 0.05), (290, 0.01), (500, 0.5)] {
            let s = CorrelationSpec::new(n, d).unwrap();
            let r = s.rho(n as f64);
            assert!(((r - d) / d).abs() < 1e-12);
        }
        assert!(CorrelationSpec::new(0, 0.05).is_err());
        assert!(CorrelationSpec::new(10, 1.0).is_err());
        assert!(CorrelationSpec::new(10, 0.0).is_err());
    }

    #[test]
    fn invalid_generator_arguments() {
        let spec = CorrelationSpec::new(10, 0.05).unwrap();
        let noise = NoiseSpec::new(0.0, 1).unwrap();
        assert!(generate_correlated(&spec, 100, 0.0, 0.0, &noise).is_err());
        assert!(generate_correlated(&spec, 100, f64::NAN, 1.0, &noise).is_err());
        assert!(generate_correlated(&spec, 100, 0.0, f64::INFINITY, &noise).is_err());
        assert!(NoiseSpec::new(f64::NAN, 1).is_err());
    }

    #[test]
    fn generator_is_deterministic() {
        let spec = CorrelationSpec::new(50, 0.05).unwrap();
        let noise = NoiseSpec::new(0.04, 99).unwrap();
        let a = generate_correlated(&spec, 500, 0.0, 1.0, &noise).unwrap();
        let b = generate_correlated(&spec, 500, 0.0, 1.0, &noise).unwrap();
        assert_eq!(a.samples(), b.samples());
        assert_eq!(a.len(), 500);
        let other = generate_correlated(&spec, 500, 0.0, 1.0, &NoiseSpec::new(0.04, 100).unwrap()).unwrap();
        assert_ne!(a.samples(), other.samples());
    }

    #[test]
    fn autocorrelation_basics() {
        let t = TimeSeries::new((0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()).unwrap();
        let r = autocorrelation(&t, 3).unwrap();
        assert!((r[0] - 1.0).abs() < 1e-12);
        assert!((r[1] + 1.0).abs() < 1e-12);
        assert!(autocorrelation(&t, 100).is_err());
        let flat = TimeSeries::new(vec![3.0; 10]).unwrap();
        assert!(matches!(autocorrelation(&flat, 2), Err(Error::DegenerateInput(_))));
        assert!(matches!(correlation_length(&flat, 0.05), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn csv_examples() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::write(&path, "t,v\n0,1.0\n60,1.5\n120,2.0\n").unwrap();
        let t = load_csv(&path, "v", 60.0).unwrap();
        assert_eq!(t.samples(), &[1.0, 1.5, 2.0]);
        assert_eq!(t.sample_interval, 60.0);

        let bad = dir.path().join("bad.csv");
        std::fs::write(&bad, "t,v\n0,1.0\n60,NaN\n").unwrap();
        match load_csv(&bad, "v", 60.0) {
            Err(Error::NonNumeric { row, .. }) => assert_eq!(row, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(load_csv(&path, "missing", 1.0).is_err());
        assert!(load_csv(dir.path().join("nope.csv"), "v", 1.0).is_err());

        let empty = dir.path().join("empty.csv");
        std::fs::write(&empty, "t,v\n").unwrap();
        assert!(load_csv(&empty, "v", 1.0).is_err());

        let semi = dir.path().join("semi.csv");
        let mut f = std::fs::File::create(&semi).unwrap();
        writeln!(f, "a;b\n1;2\n3;4").unwrap();
        assert_eq!(load_csv_with_delimiter(&semi, "b", 1.0, b';').unwrap().samples(), &[2.0, 4.0]);
    }
}
