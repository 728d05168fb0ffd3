//! Runs the methods over consecutive blocks of a recorded series.

use std::io::Write;
use std::path::Path;

use wsn_compress::signal::{correlation_length, load_csv};
use wsn_compress::{Error as CoreError, TimeSeries};

use crate::config::ExperimentConfig;
use crate::error::BenchError;
use crate::format::fmt9;
use crate::methods::Method;
use crate::sweep::{energy_rows, measure, ResultRow};

/// One `(eta, xi, N_c)` observation for checking the fitted formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct FitPoint {
    pub method: Method,
    pub block: usize,
    pub epsilon: f64,
    pub eta: f64,
    pub xi: f64,
    /// CPU cycles per uncompressed bit.
    pub nc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRun {
    /// Correlation length of the whole series; 0 when it cannot be measured.
    pub n_star: usize,
    pub diagnostics: Vec<String>,
    pub rows: Vec<ResultRow>,
    pub fit_points: Vec<FitPoint>,
}

pub fn run_dataset_file(path: &Path, column: &str, cfg: &ExperimentConfig) -> Result<DatasetRun, BenchError> {
    let ts = load_csv(path, column, 1.0)?;
    run_dataset(&ts, cfg)
}

/// Splits the series into `N`-sample blocks (a trailing partial block is
/// dropped) and compresses each with every configured method and tolerance.
/// Windowed methods get up to `W` neighbouring samples on each side.
pub fn run_dataset(ts: &TimeSeries, cfg: &ExperimentConfig) -> Result<DatasetRun, BenchError> {
    cfg.validate()?;
    let samples = ts.samples();
    if samples.len() < cfg.n {
        return Err(BenchError::DatasetTooShort {
            len: samples.len(),
            block: cfg.n,
        });
    }
    let mut diagnostics = Vec::new();
    let n_star = match correlation_length(ts, cfg.delta) {
        Ok(c) => {
            if c.saturated {
                diagnostics.push(format!(
                    "autocorrelation stays above {} up to lag {}; n* is a lower bound",
                    cfg.delta, c.lag
                ));
            }
            c.lag
        }
        Err(CoreError::DegenerateInput(why)) => {
            diagnostics.push(format!("correlation length undefined: {why}"));
            0
        }
        Err(e) => return Err(e.into()),
    };
    let hardware = cfg.hardware_profiles()?;
    let bits_per_sample = cfg.policy.bits_per_value as f64;
    let mut rows = Vec::new();
    let mut fit_points = Vec::new();
    for block in 0..samples.len() / cfg.n {
        let start = block * cfg.n;
        let end = start + cfg.n;
        for &method in &cfg.methods {
            let (input, core) = if method.is_windowed() {
                let lo = start.saturating_sub(cfg.w);
                let hi = (end + cfg.w).min(samples.len());
                (&samples[lo..hi], start - lo..end - lo)
            } else {
                (&samples[start..end], 0..cfg.n)
            };
            for &xi in &cfg.xi_list {
                let epsilon = xi * cfg.sigma_noise;
                let m = measure(method, input, core.clone(), epsilon, &cfg.policy)?;
                rows.extend(energy_rows(&m, n_star, block, &hardware, &cfg.hops)?);
                fit_points.push(FitPoint {
                    method,
                    block,
                    epsilon,
                    eta: m.eta,
                    xi,
                    nc: hardware[0].cpu.cycles(&m.ops) as f64 / (cfg.n as f64 * bits_per_sample),
                });
            }
        }
    }
    Ok(DatasetRun {
        n_star,
        diagnostics,
        rows,
        fit_points,
    })
}

pub fn write_fit_points<W: Write>(out: W, n_star: usize, points: &[FitPoint]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "n_star", "block", "epsilon", "eta", "xi", "nc"])?;
    for p in points {
        w.write_record([
            p.method.to_string(),
            n_star.to_string(),
            p.block.to_string(),
            fmt9(p.epsilon),
            fmt9(p.eta),
            fmt9(p.xi),
            fmt9(p.nc),
        ])?;
    }
    w.flush()?;
    Ok(())
}
