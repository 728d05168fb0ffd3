//! Synthetic sweeps over method, correlation length, tolerance and hardware.

use std::cmp::Ordering;
use std::io::Write;
use std::ops::Range;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use wsn_compress::energy::{
    compression_energy, multi_hop_gain_bits, payload_bits, transmission_energy, Direction, EncodingPolicy,
};
use wsn_compress::signal::{generate_correlated, CorrelationSpec, NoiseSpec};
use wsn_compress::{OpCount, Tolerance};

use crate::config::{ExperimentConfig, Hardware};
use crate::error::BenchError;
use crate::format::fmt9;
use crate::methods::Method;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: Method,
    pub n_star: usize,
    pub epsilon: f64,
    pub run_id: usize,
    pub eta: f64,
    pub max_error: f64,
    pub ops: OpCount,
    pub compression_energy_j: f64,
    /// Radio energy of the compressed payload over all hops.
    pub tx_energy_j: f64,
    pub total_j: f64,
    pub gain: f64,
    pub hops: u32,
    pub hardware: String,
}

pub const CSV_HEADER: [&str; 17] = [
    "method",
    "n_star",
    "epsilon",
    "run_id",
    "eta",
    "max_error",
    "ops_add",
    "ops_sub",
    "ops_mul",
    "ops_div",
    "ops_cmp",
    "compression_energy_J",
    "tx_energy_J",
    "total_J",
    "gain",
    "hops",
    "hardware",
];

impl ResultRow {
    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.method.to_string(),
            self.n_star.to_string(),
            fmt9(self.epsilon),
            self.run_id.to_string(),
            fmt9(self.eta),
            fmt9(self.max_error),
            self.ops.add.to_string(),
            self.ops.sub.to_string(),
            self.ops.mul.to_string(),
            self.ops.div.to_string(),
            self.ops.cmp.to_string(),
            fmt9(self.compression_energy_j),
            fmt9(self.tx_energy_j),
            fmt9(self.total_j),
            fmt9(self.gain),
            self.hops.to_string(),
            self.hardware.clone(),
        ]
    }
}

/// Seed of the signal realization for one `(run, n*)` cell, independent of
/// which other cells are generated.
pub fn cell_seed(master: u64, run_id: usize, n_star: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(run_id as u64);
    rng.set_word_pos(2 * n_star as u128);
    rng.next_u64()
}

/// One synthetic input shared by every method of a cell: `N` core samples
/// with `W` extra samples on each side for the windowed methods.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub samples: Vec<f64>,
    pub core: Range<usize>,
}

impl Realization {
    pub fn core_samples(&self) -> &[f64] {
        &self.samples[self.core.clone()]
    }
}

pub fn realization(cfg: &ExperimentConfig, run_id: usize, n_star: usize) -> Result<Realization, BenchError> {
    let spec = CorrelationSpec::new(n_star, cfg.delta)?;
    let noise = NoiseSpec::new(cfg.sigma_noise, cell_seed(cfg.seed, run_id, n_star))?;
    let ts = generate_correlated(&spec, cfg.n + 2 * cfg.w, 0.0, 1.0, &noise)?;
    Ok(Realization {
        samples: ts.into_samples(),
        core: cfg.w..cfg.w + cfg.n,
    })
}

/// What one compression of one block produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub method: Method,
    pub epsilon: f64,
    pub raw_bits: u64,
    pub bits: u64,
    pub eta: f64,
    pub max_error: f64,
    pub ops: OpCount,
}

/// Compresses `input[core]` and checks the reconstruction against `epsilon`.
/// Non-windowed methods only see the core.
pub fn measure(
    method: Method,
    input: &[f64],
    core: Range<usize>,
    epsilon: f64,
    policy: &EncodingPolicy,
) -> Result<Measurement, BenchError> {
    let tol = Tolerance::new(epsilon)?;
    let outcome = method.compress(input, core.clone(), tol)?;
    let original = &input[core.clone()];
    let max_error = outcome.max_error(original);
    let raw_bits = policy.raw_bits(core.len());
    let bits = payload_bits(&outcome.representation, policy);
    Ok(Measurement {
        method,
        epsilon,
        raw_bits,
        bits,
        eta: bits as f64 / raw_bits as f64,
        max_error,
        ops: outcome.ops,
    })
}

/// Energy rows of one measurement, one per hardware profile and hop count.
/// Fails if the reconstruction missed the tolerance.
pub fn energy_rows(
    m: &Measurement,
    n_star: usize,
    run_id: usize,
    hardware: &[Hardware],
    hops: &[u32],
) -> Result<Vec<ResultRow>, BenchError> {
    if !(m.max_error <= m.epsilon) {
        return Err(BenchError::ToleranceViolation {
            method: m.method.to_string(),
            n_star,
            run_id,
            epsilon: m.epsilon,
            max_error: m.max_error,
        });
    }
    let rep_bits = m.bits;
    let mut rows = Vec::with_capacity(hardware.len() * hops.len());
    for hw in hardware {
        let ec = compression_energy(&m.ops, &hw.cpu);
        for &h in hops {
            let tx = h as f64 * transmission_energy(rep_bits, &hw.radio, Direction::Tx)
                + (h - 1) as f64 * transmission_energy(rep_bits, &hw.radio, Direction::Rx);
            let gain = multi_hop_gain_bits(m.raw_bits, rep_bits, ec, &hw.radio, h)?;
            rows.push(ResultRow {
                method: m.method,
                n_star,
                epsilon: m.epsilon,
                run_id,
                eta: m.eta,
                max_error: m.max_error,
                ops: m.ops,
                compression_energy_j: ec,
                tx_energy_j: tx,
                total_j: ec + tx,
                gain,
                hops: h,
                hardware: hw.name.clone(),
            });
        }
    }
    Ok(rows)
}

fn row_order(hardware: &[String]) -> impl Fn(&ResultRow, &ResultRow) -> Ordering + '_ {
    move |a, b| {
        let hw = |r: &ResultRow| hardware.iter().position(|h| *h == r.hardware);
        a.method
            .cmp(&b.method)
            .then(a.n_star.cmp(&b.n_star))
            .then(a.epsilon.total_cmp(&b.epsilon))
            .then(a.run_id.cmp(&b.run_id))
            .then(hw(a).cmp(&hw(b)))
            .then(a.hops.cmp(&b.hops))
    }
}

/// Runs every `(run, n*)` cell, in parallel, and returns the rows sorted by
/// method, n*, epsilon, run, hardware and hops.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, BenchError> {
    cfg.validate()?;
    let hardware = cfg.hardware_profiles()?;
    let cells: Vec<(usize, usize)> = (0..cfg.runs)
        .flat_map(|r| cfg.n_star_list.iter().map(move |&n| (r, n)))
        .collect();
    let chunks: Vec<Vec<ResultRow>> = cells
        .par_iter()
        .map(|&(run_id, n_star)| {
            let input = realization(cfg, run_id, n_star)?;
            let mut rows = Vec::new();
            for &method in &cfg.methods {
                for &xi in &cfg.xi_list {
                    let epsilon = xi * cfg.sigma_noise;
                    let core = input.core.clone();
                    let (samples, core) = if method.is_windowed() {
                        (&input.samples[..], core)
                    } else {
                        (input.core_samples(), 0..cfg.n)
                    };
                    let m = measure(method, samples, core, epsilon, &cfg.policy)?;
                    rows.extend(energy_rows(&m, n_star, run_id, &hardware, &cfg.hops)?);
                }
            }
            Ok(rows)
        })
        .collect::<Result<_, BenchError>>()?;
    let mut rows: Vec<ResultRow> = chunks.into_iter().flatten().collect();
    rows.sort_by(row_order(&cfg.hardware));
    Ok(rows)
}

/// Writes rows as CSV, preceded by `# generated <unix seconds>` when a
/// timestamp is given.
pub fn write_rows<W: Write>(out: W, rows: &[ResultRow], timestamp: Option<u64>) -> Result<(), BenchError> {
    let mut out = out;
    if let Some(t) = timestamp {
        writeln!(out, "# generated {t}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_depend_on_cell_only() {
        let a = cell_seed(7, 3, 50);
        assert_eq!(a, cell_seed(7, 3, 50));
        assert_ne!(a, cell_seed(7, 3, 80));
        assert_ne!(a, cell_seed(7, 4, 50));
        assert_ne!(a, cell_seed(8, 3, 50));
    }
}
