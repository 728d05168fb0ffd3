//! Compression ratio, the fitted distortion/complexity models and refitting.
//!
//! The distortion `xi = epsilon / sigma` a method needs to reach compression
//! ratio `eta` at correlation length `n*` is modelled as a rational function
//! `N(eta) / (eta + q1)` with a quadratic numerator for LTC and a quartic one
//! for DCT-LPF. Compression cost in cycles per uncompressed bit is modelled
//! as `alpha eta + beta` (plus a negligible `gamma n*`).

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};

/// Methods with built-in fit tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitMethod {
    Ltc,
    DctLpf,
}

impl FitMethod {
    pub fn name(self) -> &'static str {
        match self {
            FitMethod::Ltc => "ltc",
            FitMethod::DctLpf => "dct_lpf",
        }
    }

    pub fn numerator_degree(self) -> usize {
        match self {
            FitMethod::Ltc => 2,
            FitMethod::DctLpf => 4,
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "ltc" => Some(FitMethod::Ltc),
            "dct_lpf" => Some(FitMethod::DctLpf),
            _ => None,
        }
    }
}

/// One rational `xi(eta)` row.
#[derive(Debug, Clone, PartialEq)]
pub struct XiRow {
    pub n_star: usize,
    /// Numerator coefficients, highest power first (`p1, p2, ...`).
    pub numerator: Vec<f64>,
    pub q1: f64,
}

/// Pole guard on `eta + q1`.
pub const POLE_TOLERANCE: f64 = 1e-9;

impl XiRow {
    pub fn evaluate(&self, eta: f64) -> Result<f64> {
        let den = eta + self.q1;
        if den.abs() < POLE_TOLERANCE {
            return Err(Error::Pole(den));
        }
        let num = self.numerator.iter().fold(0.0, |acc, p| acc * eta + p);
        Ok(num / den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl NcCoefficients {
    /// Cycles per uncompressed bit, with the `gamma n*` term dropped.
    pub fn evaluate(&self, eta: f64) -> f64 {
        self.alpha * eta + self.beta
    }

    pub fn evaluate_with_n_star(&self, eta: f64, n_star: f64) -> f64 {
        self.alpha * eta + self.gamma * n_star + self.beta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitCoefficients {
    pub method: String,
    /// Sorted by `n_star`; may be empty when only the cost model is known.
    pub xi_rows: Vec<XiRow>,
    pub nc: Option<NcCoefficients>,
}

const LTC_XI: [(usize, [f64; 4]); 7] = [
    (10, [-0.35034, 0.27640, 0.92834, -0.15003]),
    (20, [-0.51980, 0.86851, 0.31368, -0.09245]),
    (50, [-0.80775, 1.38842, 0.17465, -0.03705]),
    (80, [-0.85691, 1.45560, 0.18208, -0.02366]),
    (110, [-0.86972, 1.46892, 0.19112, -0.01736]),
    (290, [-0.97242, 1.61970, 0.17280, -0.00747]),
    (500, [-1.03702, 1.70305, 0.17466, 0.00267]),
];

const DCT_LPF_XI: [(usize, [f64; 6]); 7] = [
    (10, [2.05351, -12.70381, 14.49624, -4.52198, 0.82292, -0.16165]),
    (20, [-0.92752, -3.07506, 3.07560, 1.06902, 0.02898, -0.09025]),
    (50, [-1.90344, -0.17491, -0.13500, 2.43821, -0.03826, -0.03929]),
    (80, [-2.59629, 1.41404, -1.40970, 2.81971, -0.04122, -0.02667]),
    (110, [-2.57150, 1.43655, -1.51646, 2.87138, -0.02747, -0.01913]),
    (290, [-3.43806, 3.17964, -2.67444, 3.13226, -0.01531, -0.00848]),
    (500, [-3.99007, 4.17811, -3.22636, 3.22590, -0.01102, -0.00560]),
];

fn split_row(n_star: usize, coefs: &[f64]) -> XiRow {
    let (num, q) = coefs.split_at(coefs.len() - 1);
    XiRow {
        n_star,
        numerator: num.to_vec(),
        q1: q[0],
    }
}

impl FitCoefficients {
    /// The published coefficient tables.
    pub fn builtin(method: FitMethod) -> Self {
        let (xi_rows, nc) = match method {
            FitMethod::Ltc => (
                LTC_XI.iter().map(|(n, c)| split_row(*n, c)).collect(),
                NcCoefficients {
                    alpha: 16.1,
                    beta: 105.4,
                    gamma: 3.1e-16,
                },
            ),
            FitMethod::DctLpf => (
                DCT_LPF_XI.iter().map(|(n, c)| split_row(*n, c)).collect(),
                NcCoefficients {
                    alpha: 48.1e3,
                    beta: 82.3,
                    gamma: -2e-13,
                },
            ),
        };
        Self {
            method: method.name().to_string(),
            xi_rows,
            nc: Some(nc),
        }
    }

    pub fn nc(&self) -> Result<&NcCoefficients> {
        self.nc
            .as_ref()
            .ok_or_else(|| invalid(format!("no cost model for {}", self.method)))
    }

    pub fn tabulated_n_star(&self) -> Vec<usize> {
        self.xi_rows.iter().map(|r| r.n_star).collect()
    }

    /// The row for `n_star`, or with `interpolate` a row whose coefficients
    /// are linearly interpolated between the two bracketing rows.
    pub fn xi_row(&self, n_star: usize, interpolate: bool) -> Result<XiRow> {
        if let Some(row) = self.xi_rows.iter().find(|r| r.n_star == n_star) {
            return Ok(row.clone());
        }
        if !interpolate {
            return Err(invalid(format!(
                "n* = {n_star} is not tabulated for {} (have {:?})",
                self.method,
                self.tabulated_n_star()
            )));
        }
        let upper = self
            .xi_rows
            .iter()
            .position(|r| r.n_star > n_star)
            .filter(|&i| i > 0)
            .ok_or_else(|| invalid(format!("n* = {n_star} is outside the tabulated range")))?;
        let (a, b) = (&self.xi_rows[upper - 1], &self.xi_rows[upper]);
        let t = (n_star - a.n_star) as f64 / (b.n_star - a.n_star) as f64;
        let lerp = |x: f64, y: f64| x + t * (y - x);
        Ok(XiRow {
            n_star,
            numerator: a.numerator.iter().zip(&b.numerator).map(|(x, y)| lerp(*x, *y)).collect(),
            q1: lerp(a.q1, b.q1),
        })
    }

    pub fn xi(&self, n_star: usize, eta: f64, interpolate: bool) -> Result<f64> {
        self.xi_row(n_star, interpolate)?.evaluate(eta)
    }

    /// Coefficient table as CSV: one `xi` line per row and one `nc` line.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = ["method", "kind", "n_star", "p1", "p2", "p3", "p4", "p5", "q1", "alpha", "beta", "gamma"];
        w.write_record(header).expect("in-memory write");
        for row in &self.xi_rows {
            let mut rec = vec![self.method.clone(), "xi".into(), row.n_star.to_string()];
            for k in 0..5 {
                rec.push(row.numerator.get(k).map(|v| v.to_string()).unwrap_or_default());
            }
            rec.push(row.q1.to_string());
            rec.extend(["", "", ""].map(String::from));
            w.write_record(&rec).expect("in-memory write");
        }
        if let Some(nc) = &self.nc {
            let mut rec = vec![self.method.clone(), "nc".into(), String::new()];
            rec.extend(std::iter::repeat(String::new()).take(6));
            rec.extend([nc.alpha, nc.beta, nc.gamma].map(|v| v.to_string()));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}

/// `eta = compressed_bits / raw_bits`.
pub fn compression_ratio(raw_bits: u64, compressed_bits: u64) -> Result<f64> {
    if raw_bits == 0 {
        return Err(invalid("raw size must be positive"));
    }
    Ok(compressed_bits as f64 / raw_bits as f64)
}

/// Built-in `xi(n*, eta)` at a tabulated correlation length.
pub fn xi_fit(method: FitMethod, n_star: usize, eta: f64) -> Result<f64> {
    FitCoefficients::builtin(method).xi(n_star, eta, false)
}

/// Built-in cost model in cycles per uncompressed bit.
pub fn nc_fit(method: FitMethod, eta: f64) -> f64 {
    let fit = FitCoefficients::builtin(method);
    fit.nc.expect("built-in tables carry a cost model").evaluate(eta)
}

/// Largest `eta` for which compressing still saves energy when the radio
/// costs `ratio` CPU cycles per bit.
pub fn break_even_eta(nc: &NcCoefficients, ratio: f64) -> f64 {
    (ratio - nc.beta) / (ratio + nc.alpha)
}

/// One experimental point.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRow {
    pub method: String,
    pub n_star: usize,
    pub epsilon: f64,
    pub eta: f64,
    pub xi: f64,
    /// Cycles per uncompressed bit.
    pub nc: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// One rational row per distinct `n_star`.
    XiRational { numerator_degree: usize },
    NcLinear,
}

const SVD_EPS: f64 = 1e-12;
const REFINE_TOLERANCE: f64 = 1e-8;
const MAX_REFINEMENTS: usize = 50;

fn least_squares(design: DMatrix<f64>, target: DVector<f64>) -> Result<DVector<f64>> {
    let cols = design.ncols();
    let svd = design.svd(true, true);
    let max_sv = svd.singular_values.max();
    let min_sv = svd.singular_values.min();
    if !(max_sv > 0.0) || min_sv <= SVD_EPS * max_sv || svd.singular_values.len() < cols {
        return Err(Error::Fit(format!(
            "rank-deficient design (singular values {:e}..{:e})",
            min_sv, max_sv
        )));
    }
    svd.solve(&target, SVD_EPS * max_sv).map_err(|e| Error::Fit(e.to_string()))
}

/// Cost model `nc = alpha eta + beta` by least squares.
pub fn refit_nc(points: &[(f64, f64)]) -> Result<NcCoefficients> {
    if points.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 points for 2 coefficients, got {}", points.len())));
    }
    let design = DMatrix::from_fn(points.len(), 2, |r, c| if c == 0 { points[r].0 } else { 1.0 });
    let target = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));
    let sol = least_squares(design, target)?;
    Ok(NcCoefficients {
        alpha: sol[0],
        beta: sol[1],
        gamma: 0.0,
    })
}

/// Rational row `xi = N(eta) / (eta + q1)` from `(eta, xi)` points.
///
/// Starts from the linearized problem `N(eta) - q1 xi = xi eta` and repeats
/// it with each equation divided by the previous `|eta + q1|` until the
/// coefficients settle.
pub fn refit_xi(points: &[(f64, f64)], numerator_degree: usize, n_star: usize) -> Result<XiRow> {
    let unknowns = numerator_degree + 2;
    if points.len() < 2 * unknowns {
        return Err(Error::Fit(format!(
            "need at least {} points for {unknowns} coefficients, got {}",
            2 * unknowns,
            points.len()
        )));
    }
    let solve = |weights: &[f64]| {
        let design = DMatrix::from_fn(points.len(), unknowns, |r, c| {
            let (eta, xi) = points[r];
            let v = if c < unknowns - 1 {
                eta.powi((numerator_degree - c) as i32)
            } else {
                -xi
            };
            v * weights[r]
        });
        let target = DVector::from_iterator(points.len(), points.iter().zip(weights).map(|((e, x), w)| e * x * w));
        least_squares(design, target)
    };

    // Sum of squared errors in xi; infinite when a point sits on the pole.
    let residual = |sol: &DVector<f64>| -> f64 {
        let q1 = sol[unknowns - 1];
        points
            .iter()
            .map(|&(eta, xi)| {
                let den = eta + q1;
                if den.abs() < POLE_TOLERANCE {
                    return f64::INFINITY;
                }
                let num = sol.iter().take(unknowns - 1).fold(0.0, |acc, c| acc * eta + c);
                (num / den - xi).powi(2)
            })
            .sum()
    };

    let mut weights = vec![1.0; points.len()];
    let mut sol = solve(&weights)?;
    let mut best = (residual(&sol), sol.clone());
    for _ in 0..MAX_REFINEMENTS {
        let q1 = sol[unknowns - 1];
        if points.iter().any(|(eta, _)| (eta + q1).abs() < POLE_TOLERANCE) {
            break;
        }
        for (w, (eta, _)) in weights.iter_mut().zip(points) {
            *w = 1.0 / (eta + q1).abs();
        }
        let next = match solve(&weights) {
            Ok(next) => next,
            Err(_) => break,
        };
        let change = (&next - &sol).amax() / sol.amax().max(1.0);
        sol = next;
        let r = residual(&sol);
        if r < best.0 {
            best = (r, sol.clone());
        }
        if change < REFINE_TOLERANCE {
            break;
        }
    }
    let (err, sol) = best;
    if !err.is_finite() {
        return Err(Error::Fit("every candidate fit puts its pole on a data point".into()));
    }
    Ok(XiRow {
        n_star,
        numerator: sol.iter().take(unknowns - 1).copied().collect(),
        q1: sol[unknowns - 1],
    })
}

/// Refits one model from measurements of a single method.
pub fn refit(rows: &[MeasurementRow], model: FitModel) -> Result<FitCoefficients> {
    let method = rows
        .first()
        .ok_or_else(|| Error::Fit("no measurements".into()))?
        .method
        .clone();
    if rows.iter().any(|r| r.method != method) {
        return Err(Error::Fit("measurements mix several methods".into()));
    }
    match model {
        FitModel::NcLinear => {
            let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.eta, r.nc)).collect();
            Ok(FitCoefficients {
                method,
                xi_rows: Vec::new(),
                nc: Some(refit_nc(&points)?),
            })
        }
        FitModel::XiRational { numerator_degree } => {
            let mut n_stars: Vec<usize> = rows.iter().map(|r| r.n_star).collect();
            n_stars.sort_unstable();
            n_stars.dedup();
            let xi_rows = n_stars
                .into_iter()
                .map(|n| {
                    let points: Vec<(f64, f64)> = rows.iter().filter(|r| r.n_star == n).map(|r| (r.eta, r.xi)).collect();
                    refit_xi(&points, numerator_degree, n)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FitCoefficients {
                method,
                xi_rows,
                nc: None,
            })
        }
    }
}
