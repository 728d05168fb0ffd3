use crate::error::{invalid, Result};

/// A finite, non-empty sequence of real samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
    /// Seconds between samples. Metadata only.
    pub sample_interval: f64,
    pub label: String,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        Self::with_meta(samples, 1.0, String::new())
    }

    pub fn with_meta(samples: Vec<f64>, sample_interval: f64, label: impl Into<String>) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("time series must contain at least one sample"));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_interval,
            label: label.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.len() as f64
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.samples.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / self.len() as f64
    }

    /// Largest absolute difference to `other` over the common prefix.
    pub fn max_abs_error(&self, other: &[f64]) -> f64 {
        max_abs_error(&self.samples, other)
    }

    pub fn window(&self, start: usize, len: usize) -> Result<TimeSeries> {
        if start + len > self.len() || len == 0 {
            return Err(invalid(format!(
                "window [{start}, {}) outside series of length {}",
                start + len,
                self.len()
            )));
        }
        Ok(Self {
            samples: self.samples[start..start + len].to_vec(),
            sample_interval: self.sample_interval,
            label: self.label.clone(),
        })
    }
}

pub fn max_abs_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Maximum absolute reconstruction error allowed per sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance(f64);

impl Tolerance {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(invalid(format!("tolerance must be finite and >= 0, got {epsilon}")));
        }
        Ok(Self(epsilon))
    }

    pub fn epsilon(self) -> f64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(TimeSeries::new(vec![]).is_err());
        assert!(TimeSeries::new(vec![1.0, f64::NAN]).is_err());
        assert!(TimeSeries::new(vec![f64::INFINITY]).is_err());
        assert!(TimeSeries::new(vec![0.0]).is_ok());
    }

    #[test]
    fn tolerance_must_be_non_negative() {
        assert!(Tolerance::new(-1e-9).is_err());
        assert!(Tolerance::new(f64::NAN).is_err());
        assert_eq!(Tolerance::new(0.0).unwrap().epsilon(), 0.0);
    }
}
