//! Model-based compressors: polynomial regression and autoregressive prediction.
//!
//! The AR codecs transmit, per record, the `p` raw samples that seed the
//! predictor, the fitted coefficients and the number of samples the decoder
//! reconstructs by free-running one-step prediction from those seeds.
//! Encoder and decoder share [`ar_replay`], so the decoder reproduces the
//! encoder's predictions bit for bit.

use crate::error::{invalid, Error, Result};
use crate::linalg::gaussian_elimination;
use crate::ops::OpCount;
use crate::series::{TimeSeries, Tolerance};

/// Highest AR order accepted by the AR codecs.
pub const MAX_AR_ORDER: usize = 5;

/// Ridge added to a rank-deficient AR system, relative to its largest diagonal entry.
const RIDGE: f64 = 1e-9;

/// A least-squares polynomial over `window_len` samples starting at `start_index`.
///
/// The polynomial is expressed in the local abscissa `u` running from -1 at
/// the first sample to +1 at the last (see [`abscissa`]); coefficients are in
/// ascending powers of `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPiece {
    pub start_index: usize,
    pub window_len: usize,
    pub coefficients: Vec<f64>,
}

impl PolynomialPiece {
    pub fn order(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn evaluate(&self, offset: usize) -> f64 {
        horner(&self.coefficients, abscissa(offset, self.window_len))
    }
}

/// Local abscissa of sample `offset` inside a window of `len` samples.
#[inline]
pub fn abscissa(offset: usize, len: usize) -> f64 {
    if len < 2 {
        0.0
    } else {
        2.0 * offset as f64 / (len - 1) as f64 - 1.0
    }
}

#[inline]
fn horner(coefficients: &[f64], u: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, c| acc * u + c)
}

/// One AR prediction cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModelRecord {
    pub start_index: usize,
    pub order: usize,
    /// `xi_1..xi_p`; empty for a raw-only record.
    pub coefficients: Vec<f64>,
    /// Raw samples seeding the predictor, transmitted verbatim.
    pub initial_samples: Vec<f64>,
    /// Samples reconstructed by prediction after the initial ones.
    pub covered_len: usize,
}

impl ArModelRecord {
    fn raw(start_index: usize, order: usize, samples: &[f64]) -> Self {
        Self {
            start_index,
            order,
            coefficients: Vec::new(),
            initial_samples: samples.to_vec(),
            covered_len: 0,
        }
    }

    pub fn total_len(&self) -> usize {
        self.initial_samples.len() + self.covered_len
    }

    pub fn is_raw(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// Free-running one-step prediction: `count` samples following `initial`.
pub fn ar_replay(coefficients: &[f64], initial: &[f64], count: usize, ops: &mut OpCount) -> Vec<f64> {
    let p = coefficients.len();
    let mut history = initial.to_vec();
    history.reserve(count);
    for _ in 0..count {
        let t = history.len();
        let next: f64 = coefficients
            .iter()
            .enumerate()
            .map(|(r, xi)| xi * history[t - 1 - r])
            .sum();
        history.push(next);
    }
    ops.mul((p * count) as u64);
    ops.add((p.saturating_sub(1) * count) as u64);
    history.split_off(initial.len())
}

/// The normal equations of an order-`p` AR least-squares fit.
///
/// `gram[(r-1)*p + (s-1)] = f(r, s) = sum_i x(i-r) x(i-s)` and
/// `rhs[r-1] = f(r, 0)`, with `i` running over the window from its `p`-th
/// sample on.
#[derive(Debug, Clone, PartialEq)]
pub struct ArLinearSystem {
    pub order: usize,
    pub gram: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl ArLinearSystem {
    pub fn empty(order: usize) -> Self {
        Self {
            order,
            gram: vec![0.0; order * order],
            rhs: vec![0.0; order],
        }
    }

    /// Builds the system over `window` from scratch.
    pub fn from_window(window: &[f64], order: usize, ops: &mut OpCount) -> Self {
        let mut sys = Self::empty(order);
        for i in order..window.len() {
            sys.add_equation(window, i, ops);
        }
        sys
    }

    /// Adds the equation predicting `window[i]`: one product term per entry.
    /// Only the upper triangle is computed; the lower one is mirrored.
    pub fn add_equation(&mut self, window: &[f64], i: usize, ops: &mut OpCount) {
        let p = self.order;
        for r in 1..=p {
            for s in r..=p {
                let term = window[i - r] * window[i - s];
                self.gram[(r - 1) * p + (s - 1)] += term;
                if s != r {
                    self.gram[(s - 1) * p + (r - 1)] = self.gram[(r - 1) * p + (s - 1)];
                }
            }
            self.rhs[r - 1] += window[i - r] * window[i];
        }
        let entries = (p * (p + 1) / 2 + p) as u64;
        ops.mul(entries);
        ops.add(entries);
    }
}

/// Solves the AR normal equations by Gaussian elimination with partial pivoting.
pub fn solve_ar_system(sys: &ArLinearSystem) -> Result<Vec<f64>> {
    solve_ar_counted(sys, &mut OpCount::default())
}

fn solve_ar_counted(sys: &ArLinearSystem, ops: &mut OpCount) -> Result<Vec<f64>> {
    let mut a = sys.gram.clone();
    let mut b = sys.rhs.clone();
    gaussian_elimination(&mut a, &mut b, ops)
}

/// Plain solve, then a tiny ridge for rank-deficient windows (fewer
/// equations than unknowns early in a prediction cycle). An all-zero system
/// yields zero coefficients, which predict the zero window exactly.
fn fit_ar(sys: &ArLinearSystem, ops: &mut OpCount) -> Vec<f64> {
    match solve_ar_counted(sys, ops) {
        Ok(xi) => xi,
        Err(_) => {
            let p = sys.order;
            let diag_max = (0..p).map(|r| sys.gram[r * p + r]).fold(0.0, f64::max);
            ops.cmp(p as u64);
            if diag_max <= 0.0 {
                return vec![0.0; p];
            }
            let mut ridged = sys.clone();
            for r in 0..p {
                ridged.gram[r * p + r] += RIDGE * diag_max;
            }
            ops.mul(1);
            ops.add(p as u64);
            solve_ar_counted(&ridged, ops).unwrap_or_else(|_| vec![0.0; p])
        }
    }
}

fn check_order(ts: &TimeSeries, p: usize, max: Option<usize>) -> Result<()> {
    if p == 0 {
        return Err(invalid("model order must be at least 1"));
    }
    if let Some(max) = max {
        if p > max {
            return Err(invalid(format!("AR order {p} exceeds {max}")));
        }
    }
    if ts.len() < p + 1 {
        return Err(invalid(format!("need at least {} samples for order {p}, got {}", p + 1, ts.len())));
    }
    Ok(())
}

/// Least-squares polynomial of degree `degree` over `window`, or `None` if the
/// normal equations are singular.
fn fit_polynomial(window: &[f64], degree: usize, ops: &mut OpCount) -> Option<Vec<f64>> {
    let len = window.len();
    let m = degree + 1;
    let mut power_sums = vec![0.0; 2 * degree + 1];
    let mut rhs = vec![0.0; m];
    if len > 1 {
        // 2 / (len - 1), shared by every abscissa of the window.
        ops.div(1);
    }
    for (t, &x) in window.iter().enumerate() {
        let u = abscissa(t, len);
        ops.mul(1);
        ops.sub(1);
        let mut pw = 1.0;
        for (j, slot) in power_sums.iter_mut().enumerate() {
            if j > 0 {
                pw *= u;
            }
            *slot += pw;
            if j < m {
                rhs[j] += pw * x;
            }
        }
        ops.mul((2 * degree + m) as u64);
        ops.add((2 * degree + 1 + m) as u64);
    }
    let mut a: Vec<f64> = (0..m * m).map(|idx| power_sums[idx / m + idx % m]).collect();
    gaussian_elimination(&mut a, &mut rhs, ops).ok()
}

fn polynomial_feasible(window: &[f64], coefficients: &[f64], eps: f64, ops: &mut OpCount) -> bool {
    let len = window.len();
    let degree = coefficients.len().saturating_sub(1) as u64;
    for (t, &x) in window.iter().enumerate() {
        let y = horner(coefficients, abscissa(t, len));
        ops.mul(degree + 1);
        ops.add(degree);
        ops.sub(1);
        ops.tolerance_check();
        if (y - x).abs() > eps {
            return false;
        }
    }
    true
}

fn mean_polynomial(window: &[f64], ops: &mut OpCount) -> Vec<f64> {
    ops.add(window.len() as u64);
    ops.div(1);
    vec![window.iter().sum::<f64>() / window.len() as f64]
}

/// Feasible fit of `window`: least squares of the given degree, falling back
/// to the window mean when the normal equations are singular.
fn feasible_fit(window: &[f64], degree: usize, eps: f64, ops: &mut OpCount) -> Option<Vec<f64>> {
    let coefficients = fit_polynomial(window, degree, ops).unwrap_or_else(|| mean_polynomial(window, ops));
    polynomial_feasible(window, &coefficients, eps, ops).then_some(coefficients)
}

/// Polynomial regression with windows grown one sample at a time.
///
/// Each piece starts from the `p + 1` samples a degree-`p` polynomial
/// interpolates, and the window grows while the refitted (from scratch)
/// least-squares polynomial stays within `epsilon` of every window sample.
/// When rounding makes even the starting window infeasible (for instance
/// with `epsilon = 0`) the piece shrinks, down to a single sample stored
/// as a constant.
pub fn pr_compress(ts: &TimeSeries, tol: Tolerance, p: usize) -> Result<(Vec<PolynomialPiece>, OpCount)> {
    check_order(ts, p, None)?;
    let x = ts.samples();
    let eps = tol.epsilon();
    let n = x.len();
    let mut ops = OpCount::ZERO;
    let mut pieces = Vec::new();
    let mut start = 0;

    while start < n {
        let mut len = (p + 1).min(n - start);
        let mut best = loop {
            let degree = p.min(len - 1);
            if let Some(c) = feasible_fit(&x[start..start + len], degree, eps, &mut ops) {
                break c;
            }
            if len == 1 {
                break vec![x[start]];
            }
            len -= 1;
        };
        if len == p + 1 {
            while start + len < n {
                match feasible_fit(&x[start..start + len + 1], p, eps, &mut ops) {
                    Some(c) => {
                        best = c;
                        len += 1;
                    }
                    None => break,
                }
            }
        }
        pieces.push(PolynomialPiece {
            start_index: start,
            window_len: len,
            coefficients: best,
        });
        start += len;
    }
    Ok((pieces, ops))
}

/// Largest `i` such that every `|predicted - actual|` before it is within tolerance.
fn prediction_feasible(predicted: &[f64], actual: &[f64], eps: f64, ops: &mut OpCount) -> bool {
    for (y, x) in predicted.iter().zip(actual) {
        ops.tolerance_check();
        if (y - x).abs() > eps {
            return false;
        }
    }
    true
}

/// Modified adaptive AR compression with variable-length prediction cycles.
///
/// A cycle starting at `n` sends `x(n..n+p)` raw. For `k = 1, 2, ...` the
/// AR(p) model is refitted on `x(n..n+p+k)` (the Gram matrix gains one
/// product term per entry as the window grows) and replayed from the raw
/// seeds over all `k` predicted samples. The last model whose replay met the
/// tolerance everywhere is emitted; if already `k = 1` fails, the cycle
/// degenerates to the raw seeds alone.
pub fn ma_ar_compress(ts: &TimeSeries, tol: Tolerance, p: usize) -> Result<(Vec<ArModelRecord>, OpCount)> {
    check_order(ts, p, Some(MAX_AR_ORDER))?;
    let x = ts.samples();
    let eps = tol.epsilon();
    let n = x.len();
    let mut ops = OpCount::ZERO;
    let mut records = Vec::new();
    let mut pos = 0;

    while pos < n {
        if n - pos <= p {
            records.push(ArModelRecord::raw(pos, p, &x[pos..]));
            break;
        }
        let initial = &x[pos..pos + p];
        let mut sys = ArLinearSystem::empty(p);
        let mut valid: Option<(Vec<f64>, usize)> = None;
        let mut k = 1;
        while pos + p + k <= n {
            let window = &x[pos..pos + p + k];
            sys.add_equation(window, p + k - 1, &mut ops);
            let xi = fit_ar(&sys, &mut ops);
            let predicted = ar_replay(&xi, initial, k, &mut ops);
            if !prediction_feasible(&predicted, &x[pos + p..pos + p + k], eps, &mut ops) {
                break;
            }
            valid = Some((xi, k));
            k += 1;
        }
        match valid {
            Some((coefficients, covered_len)) => {
                records.push(ArModelRecord {
                    start_index: pos,
                    order: p,
                    coefficients,
                    initial_samples: initial.to_vec(),
                    covered_len,
                });
                pos += p + covered_len;
            }
            None => {
                records.push(ArModelRecord::raw(pos, p, initial));
                pos += p;
            }
        }
    }
    Ok((records, ops))
}

/// Parameters of the fixed-window adaptive AR scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AarmaParams {
    pub order: usize,
    /// Estimation window length, larger than `order`.
    pub window_len: usize,
    /// Prediction block length checked at once.
    pub horizon: usize,
}

impl Default for AarmaParams {
    fn default() -> Self {
        Self {
            order: 2,
            window_len: 20,
            horizon: 1,
        }
    }
}

/// Root mean square of `predicted - actual` is within `eps`. A single sample
/// is compared by absolute value so that `horizon = 1` is an exact
/// per-sample check.
fn block_rms_ok(predicted: &[f64], actual: &[f64], eps: f64, ops: &mut OpCount) -> bool {
    if predicted.len() == 1 {
        ops.tolerance_check();
        return (predicted[0] - actual[0]).abs() <= eps;
    }
    let sq: f64 = predicted.iter().zip(actual).map(|(y, x)| (y - x) * (y - x)).sum();
    let len = predicted.len() as u64;
    ops.sub(len);
    ops.mul(len);
    ops.add(len);
    ops.div(1);
    ops.cmp(1);
    (sq / predicted.len() as f64).sqrt() <= eps
}

/// Adaptive AR with a fixed estimation window (the AR core of A-ARMA).
///
/// The model is fitted on the most recent `window_len` samples ending with
/// the record's `p` seed samples (at the start of the series, on the first
/// `window_len` samples). It is kept while each following block of
/// `horizon` predictions has RMS error within `epsilon`; the first failing
/// block triggers a refit that starts a new record at that block.
pub fn aarma_compress(
    ts: &TimeSeries,
    tol: Tolerance,
    params: AarmaParams,
) -> Result<(Vec<ArModelRecord>, OpCount)> {
    let AarmaParams {
        order: p,
        window_len,
        horizon,
    } = params;
    check_order(ts, p, Some(MAX_AR_ORDER))?;
    if window_len <= p {
        return Err(invalid(format!("estimation window {window_len} must exceed the order {p}")));
    }
    if horizon == 0 {
        return Err(invalid("prediction horizon must be at least 1"));
    }
    let x = ts.samples();
    let eps = tol.epsilon();
    let n = x.len();
    let mut ops = OpCount::ZERO;
    let mut records = Vec::new();
    let mut pos = 0;

    while pos < n {
        if n - pos <= p {
            records.push(ArModelRecord::raw(pos, p, &x[pos..]));
            break;
        }
        let seed_end = pos + p;
        let (w_start, w_end) = if seed_end >= window_len {
            (seed_end - window_len, seed_end)
        } else {
            (0, window_len.min(n))
        };
        let sys = ArLinearSystem::from_window(&x[w_start..w_end], p, &mut ops);
        let xi = fit_ar(&sys, &mut ops);
        let initial = &x[pos..seed_end];

        let mut covered = 0;
        while seed_end + covered < n {
            let block = horizon.min(n - seed_end - covered);
            // The decoder replays from the seeds, so the encoder does too.
            let predicted = ar_replay(&xi, initial, covered + block, &mut OpCount::default());
            let new = &predicted[covered..];
            ops.mul((p * block) as u64);
            ops.add((p.saturating_sub(1) * block) as u64);
            let lo = seed_end + covered;
            if !block_rms_ok(new, &x[lo..lo + block], eps, &mut ops) {
                break;
            }
            covered += block;
        }
        if covered == 0 {
            records.push(ArModelRecord::raw(pos, p, initial));
        } else {
            records.push(ArModelRecord {
                start_index: pos,
                order: p,
                coefficients: xi,
                initial_samples: initial.to_vec(),
                covered_len: covered,
            });
        }
        pos = seed_end + covered;
    }
    Ok((records, ops))
}

/// Borrowed model output to decode.
#[derive(Debug, Clone, Copy)]
pub enum ModelPieces<'a> {
    Polynomials(&'a [PolynomialPiece]),
    Ar(&'a [ArModelRecord]),
}

/// Reconstructs `length` samples from polynomial pieces or AR records, which
/// must tile `0..length` in order.
pub fn model_decompress(pieces: ModelPieces<'_>, length: usize) -> Result<TimeSeries> {
    let mut out = Vec::with_capacity(length);
    let gap = |expected: usize, got: usize| Error::InvalidArgument(format!("coverage gap: expected a piece at {expected}, found {got}"));
    match pieces {
        ModelPieces::Polynomials(pieces) => {
            for piece in pieces {
                if piece.start_index != out.len() {
                    return Err(gap(out.len(), piece.start_index));
                }
                out.extend((0..piece.window_len).map(|t| piece.evaluate(t)));
            }
        }
        ModelPieces::Ar(records) => {
            for rec in records {
                if rec.start_index != out.len() {
                    return Err(gap(out.len(), rec.start_index));
                }
                out.extend_from_slice(&rec.initial_samples);
                if rec.covered_len > 0 {
                    out.extend(ar_replay(&rec.coefficients, &rec.initial_samples, rec.covered_len, &mut OpCount::default()));
                }
            }
        }
    }
    if out.len() != length {
        return Err(invalid(format!("pieces cover {} samples, expected {length}", out.len())));
    }
    TimeSeries::new(out)
}
