//! Refits the cost and tolerance formulas from a results CSV.

use std::io::Read;

use wsn_compress::analysis::{refit, FitCoefficients, FitModel, MeasurementRow};
use wsn_compress::energy::CpuProfile;

use crate::error::BenchError;
use crate::methods::Method;
use crate::sweep::CSV_HEADER;

/// Rational numerator degree used when none is given.
pub fn default_numerator_degree(method: Method) -> usize {
    match method {
        Method::DctLpf => 4,
        _ => 2,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitInput {
    pub method: Method,
    pub sigma_noise: f64,
    /// Samples per block.
    pub n: usize,
    pub bits_per_value: u64,
    pub numerator_degree: usize,
}

/// Reads the single-hop rows of the first hardware profile listed for
/// `input.method` and turns them into `(eta, xi, N_c)` measurements.
pub fn read_measurements<R: Read>(reader: R, input: &FitInput, cpu: &CpuProfile) -> Result<Vec<MeasurementRow>, BenchError> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| BenchError::InvalidConfig(format!("results CSV has no {name:?} column")))
    };
    let idx: Vec<usize> = CSV_HEADER.iter().map(|h| col(h)).collect::<Result<_, _>>()?;
    let field = |rec: &csv::StringRecord, k: usize| rec.get(idx[k]).unwrap_or("").to_string();
    let num = |rec: &csv::StringRecord, k: usize| -> Result<f64, BenchError> {
        let s = field(rec, k);
        s.parse::<f64>()
            .map_err(|_| BenchError::InvalidConfig(format!("column {}: {s:?} is not a number", CSV_HEADER[k])))
    };

    let raw_bits = input.n as f64 * input.bits_per_value as f64;
    let method_name = input.method.to_string();
    let mut hardware: Option<String> = None;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if field(&rec, 0) != method_name || field(&rec, 15) != "1" {
            continue;
        }
        let hw = field(&rec, 16);
        match &hardware {
            None => hardware = Some(hw),
            Some(first) if *first != hw => continue,
            Some(_) => {}
        }
        let ops = wsn_compress::OpCount::new(
            num(&rec, 6)? as u64,
            num(&rec, 7)? as u64,
            num(&rec, 8)? as u64,
            num(&rec, 9)? as u64,
            num(&rec, 10)? as u64,
        );
        let epsilon = num(&rec, 2)?;
        rows.push(MeasurementRow {
            method: method_name.clone(),
            n_star: num(&rec, 1)? as usize,
            epsilon,
            eta: num(&rec, 4)?,
            xi: epsilon / input.sigma_noise,
            nc: cpu.cycles(&ops) as f64 / raw_bits,
            runs: 1,
        });
    }
    if rows.is_empty() {
        return Err(BenchError::InvalidConfig(format!("no single-hop rows for {method_name}")));
    }
    Ok(rows)
}

/// Both fits for one method: a rational `xi(eta)` row per n* and the linear
/// `N_c(eta)` model.
pub fn refit_results<R: Read>(reader: R, input: &FitInput, cpu: &CpuProfile) -> Result<FitCoefficients, BenchError> {
    let rows = read_measurements(reader, input, cpu)?;
    let nc = refit(&rows, FitModel::NcLinear)?;
    let mut xi = refit(
        &rows,
        FitModel::XiRational {
            numerator_degree: input.numerator_degree,
        },
    )?;
    xi.nc = nc.nc;
    Ok(xi)
}
