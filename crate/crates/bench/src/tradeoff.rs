//! Compress-or-not verdicts over a grid of compression ratios.

use std::io::Write;

use wsn_compress::analysis::{FitCoefficients, FitMethod};
use wsn_compress::energy::{energy_ratio, tradeoff_rhs, CpuProfile, RadioProfile};

use crate::error::BenchError;
use crate::format::fmt9;

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffRow {
    pub eta: f64,
    pub method: FitMethod,
    /// Cycles per saved bit the method needs.
    pub rhs: f64,
    pub radio: String,
    /// Cycles one transmitted bit is worth on this hardware.
    pub ratio: f64,
    pub holds: bool,
}

/// `0.01, 0.02, ..., 0.99`.
pub fn default_eta_grid() -> Vec<f64> {
    (1..100).map(|k| k as f64 / 100.0).collect()
}

pub fn tradeoff_table(cpu: &CpuProfile, radios: &[RadioProfile], etas: &[f64]) -> Result<Vec<TradeoffRow>, BenchError> {
    if let Some(bad) = etas.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(BenchError::InvalidConfig(format!("eta grid values must lie in (0, 1), got {bad}")));
    }
    let mut rows = Vec::new();
    for &eta in etas {
        for method in [FitMethod::Ltc, FitMethod::DctLpf] {
            let rhs = tradeoff_rhs(FitCoefficients::builtin(method).nc()?, eta);
            for radio in radios {
                let ratio = energy_ratio(cpu, radio);
                rows.push(TradeoffRow {
                    eta,
                    method,
                    rhs,
                    radio: radio.name.clone(),
                    ratio,
                    holds: ratio > rhs,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_tradeoff<W: Write>(out: W, rows: &[TradeoffRow]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["eta", "method", "rhs", "radio", "ratio", "holds"])?;
    for r in rows {
        w.write_record([
            fmt9(r.eta),
            r.method.name().to_string(),
            fmt9(r.rhs),
            r.radio.clone(),
            fmt9(r.ratio),
            r.holds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Largest grid ratio at which `method` still pays off on `radio`, if any.
pub fn last_viable_eta(rows: &[TradeoffRow], method: FitMethod, radio: &str) -> Option<f64> {
    rows.iter()
        .filter(|r| r.method == method && r.radio == radio && r.holds)
        .map(|r| r.eta)
        .reduce(f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_grid_outside_unit_interval() {
        let cpu = CpuProfile::msp430();
        let radios = [RadioProfile::cc2420()];
        assert!(tradeoff_table(&cpu, &radios, &[0.5, 1.0]).is_err());
        assert!(tradeoff_table(&cpu, &radios, &[0.0]).is_err());
        assert_eq!(tradeoff_table(&cpu, &radios, &[0.5]).unwrap().len(), 2);
    }
}
