//! Transform-domain compressors.
//!
//! The FFT codecs operate on the half spectrum of a real window of length
//! `L`: the real parts of bins `0..=L/2` and the imaginary parts of bins
//! `1..=(L-1)/2`. DC, and for even `L` the Nyquist bin, carry no imaginary
//! part, so there are exactly `L` candidate values. The DCT codecs use the
//! `L` orthonormal DCT-II coefficients.
//!
//! After every coefficient added to the reconstruction the full inverse
//! transform is recomputed and checked against the tolerance, on the whole
//! window or, for the overlapped variants, on its central core only.

use std::ops::Range;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::ops::OpCount;
use crate::series::{TimeSeries, Tolerance};
use crate::transform::{inverse_real, real_fft, Dct, Fft};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transform {
    Fft,
    Dct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    Real,
    Imag,
    /// A DCT-II coefficient.
    Dct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pick {
    pub position: usize,
    pub part: Part,
    pub value: f64,
}

/// Coefficients kept for one transformed window.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSelection {
    pub transform: Transform,
    /// How `picks` were chosen. Low-pass picks are a prefix of the
    /// frequency-ordered slots, so their positions need not be sent.
    pub selection: Selection,
    pub picks: Vec<Pick>,
    /// Length of the transformed window.
    pub window_len: usize,
    /// Samples of the window that are reconstructed and checked.
    pub core: Range<usize>,
}

impl SpectralSelection {
    /// Flank lengths actually used on the left and right of the core.
    pub fn overlap(&self) -> (usize, usize) {
        (self.core.start, self.window_len - self.core.end)
    }
}

/// Coefficient ordering strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selection {
    /// Largest magnitude first.
    Greedy,
    /// Increasing frequency.
    LowPass,
}

/// Candidate slots in frequency order, real part before imaginary.
fn fft_slots(len: usize) -> Vec<(usize, Part)> {
    let mut slots = Vec::with_capacity(len);
    for bin in 0..=len / 2 {
        slots.push((bin, Part::Real));
        if bin != 0 && !(len % 2 == 0 && bin == len / 2) {
            slots.push((bin, Part::Imag));
        }
    }
    slots
}

fn core_within_tolerance(recon: &[f64], x: &[f64], core: &Range<usize>, eps: f64, ops: &mut OpCount) -> bool {
    for k in core.clone() {
        ops.tolerance_check();
        if (recon[k] - x[k]).abs() > eps {
            return false;
        }
    }
    true
}

/// Places `pick` into a Hermitian spectrum of length `len`.
fn install(spectrum: &mut [Complex64], pick: &Pick) {
    let len = spectrum.len();
    let bin = pick.position;
    match pick.part {
        Part::Real => spectrum[bin].re = pick.value,
        Part::Imag => spectrum[bin].im = pick.value,
        Part::Dct => unreachable!("DCT pick in FFT spectrum"),
    }
    if bin != 0 && 2 * bin != len {
        spectrum[len - bin] = spectrum[bin].conj();
    }
}

fn slot_value(spectrum: &[Complex64], bin: usize, part: Part) -> f64 {
    match part {
        Part::Real => spectrum[bin].re,
        Part::Imag => spectrum[bin].im,
        Part::Dct => unreachable!(),
    }
}

/// Scans `values` for the largest magnitude among unused slots; earliest wins ties.
fn argmax_unused(values: impl Iterator<Item = f64>, used: &[bool], ops: &mut OpCount) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        if used[i] {
            continue;
        }
        ops.cmp(1);
        let a = v.abs();
        if best.map_or(true, |(_, b)| a > b) {
            best = Some((i, a));
        }
    }
    best.map(|(i, _)| i)
}

/// FFT coefficient selection over `x`, checking the tolerance on `core`.
pub fn fft_select(x: &[f64], core: Range<usize>, tol: Tolerance, strategy: Selection) -> Result<(SpectralSelection, OpCount)> {
    let len = x.len();
    check_window(len, &core)?;
    let eps = tol.epsilon();
    let mut ops = OpCount::ZERO;
    let plan = Fft::new(len);
    let spectrum = real_fft(&plan, x, &mut ops);
    let slots = fft_slots(len);
    let mut used = vec![false; slots.len()];
    let mut recon_spec = vec![Complex64::new(0.0, 0.0); len];
    let mut picks = Vec::new();
    let mut recon = vec![0.0; len];
    let mut next_lowpass = 0;

    while !core_within_tolerance(&recon, x, &core, eps, &mut ops) {
        match strategy {
            Selection::Greedy => {
                let values = slots.iter().map(|&(b, p)| slot_value(&spectrum, b, p));
                let Some(i) = argmax_unused(values, &used, &mut ops) else { break };
                used[i] = true;
                let (bin, part) = slots[i];
                let pick = Pick {
                    position: bin,
                    part,
                    value: slot_value(&spectrum, bin, part),
                };
                install(&mut recon_spec, &pick);
                picks.push(pick);
            }
            Selection::LowPass => {
                if next_lowpass >= slots.len() {
                    break;
                }
                // Both parts of the next bin at once.
                let bin = slots[next_lowpass].0;
                while next_lowpass < slots.len() && slots[next_lowpass].0 == bin {
                    let part = slots[next_lowpass].1;
                    let pick = Pick {
                        position: bin,
                        part,
                        value: slot_value(&spectrum, bin, part),
                    };
                    install(&mut recon_spec, &pick);
                    picks.push(pick);
                    next_lowpass += 1;
                }
            }
        }
        recon = inverse_real(&plan, &recon_spec, &mut ops);
    }
    Ok((
        SpectralSelection {
            transform: Transform::Fft,
            selection: strategy,
            picks,
            window_len: len,
            core,
        },
        ops,
    ))
}

/// DCT-II coefficient selection over `x`, checking the tolerance on `core`.
pub fn dct_select(x: &[f64], core: Range<usize>, tol: Tolerance, strategy: Selection) -> Result<(SpectralSelection, OpCount)> {
    let len = x.len();
    check_window(len, &core)?;
    let eps = tol.epsilon();
    let mut ops = OpCount::ZERO;
    let dct = Dct::new(len);
    let coefficients = dct.forward(x, &mut ops);
    let mut used = vec![false; len];
    let mut kept = vec![0.0; len];
    let mut picks = Vec::new();
    let mut recon = vec![0.0; len];

    while !core_within_tolerance(&recon, x, &core, eps, &mut ops) {
        let position = match strategy {
            Selection::Greedy => match argmax_unused(coefficients.iter().copied(), &used, &mut ops) {
                Some(i) => i,
                None => break,
            },
            Selection::LowPass => match used.iter().position(|u| !u) {
                Some(i) => i,
                None => break,
            },
        };
        used[position] = true;
        kept[position] = coefficients[position];
        picks.push(Pick {
            position,
            part: Part::Dct,
            value: coefficients[position],
        });
        recon = dct.inverse(&kept, &mut ops);
    }
    Ok((
        SpectralSelection {
            transform: Transform::Dct,
            selection: strategy,
            picks,
            window_len: len,
            core,
        },
        ops,
    ))
}

fn check_window(len: usize, core: &Range<usize>) -> Result<()> {
    if len < 2 {
        return Err(invalid(format!("need at least 2 samples, got {len}")));
    }
    if core.start >= core.end || core.end > len {
        return Err(invalid(format!("core {core:?} outside window of length {len}")));
    }
    Ok(())
}

/// Greedy FFT: repeatedly keeps the largest remaining half-spectrum value.
pub fn fft_compress(ts: &TimeSeries, tol: Tolerance) -> Result<(SpectralSelection, OpCount)> {
    fft_select(ts.samples(), 0..ts.len(), tol, Selection::Greedy)
}

/// FFT low-pass: keeps whole bins in increasing frequency.
pub fn fft_lpf_compress(ts: &TimeSeries, tol: Tolerance) -> Result<(SpectralSelection, OpCount)> {
    fft_select(ts.samples(), 0..ts.len(), tol, Selection::LowPass)
}

/// Greedy DCT: repeatedly keeps the largest remaining coefficient.
pub fn dct_compress(ts: &TimeSeries, tol: Tolerance) -> Result<(SpectralSelection, OpCount)> {
    dct_select(ts.samples(), 0..ts.len(), tol, Selection::Greedy)
}

/// DCT low-pass: keeps coefficients in increasing frequency.
pub fn dct_lpf_compress(ts: &TimeSeries, tol: Tolerance) -> Result<(SpectralSelection, OpCount)> {
    dct_select(ts.samples(), 0..ts.len(), tol, Selection::LowPass)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WindowedVariant {
    Fft,
    FftLpf,
}

impl WindowedVariant {
    fn strategy(self) -> Selection {
        match self {
            WindowedVariant::Fft => Selection::Greedy,
            WindowedVariant::FftLpf => Selection::LowPass,
        }
    }
}

/// Disjoint cores of `core_len` samples tiling `0..len`, each extended by up
/// to `overlap` samples on both sides (truncated at the series ends).
pub fn window_plan(len: usize, core_len: usize, overlap: usize) -> Vec<(Range<usize>, Range<usize>)> {
    (0..len)
        .step_by(core_len.max(1))
        .map(|start| {
            let end = (start + core_len).min(len);
            let ext = start.saturating_sub(overlap)..(end + overlap).min(len);
            (ext, start..end)
        })
        .collect()
}

/// Compresses one core with its surrounding context `window`.
pub fn compress_with_context(
    window: &[f64],
    core: Range<usize>,
    tol: Tolerance,
    variant: WindowedVariant,
) -> Result<(SpectralSelection, OpCount)> {
    fft_select(window, core, tol, variant.strategy())
}

/// Overlapped-window FFT compression of a whole series.
///
/// Each `core_len`-sample core is transformed together with up to `overlap`
/// neighbouring samples on each side, but only the core is checked against
/// the tolerance and reconstructed. A trailing core of fewer than two
/// samples is merged into its predecessor.
pub fn windowed_compress(
    ts: &TimeSeries,
    tol: Tolerance,
    variant: WindowedVariant,
    core_len: usize,
    overlap: usize,
) -> Result<(Vec<SpectralSelection>, OpCount)> {
    if core_len < 2 {
        return Err(invalid("core length must be at least 2"));
    }
    let x = ts.samples();
    let mut plan = window_plan(x.len(), core_len, overlap);
    if plan.len() > 1 && plan.last().map_or(false, |(_, c)| c.len() < 2) {
        let (_, last_core) = plan.pop().unwrap();
        let (ext, core) = plan.pop().unwrap();
        let merged_core = core.start..last_core.end;
        let merged_ext = ext.start..(merged_core.end + overlap).min(x.len());
        plan.push((merged_ext, merged_core));
    }
    let mut ops = OpCount::ZERO;
    let mut selections = Vec::with_capacity(plan.len());
    for (ext, core) in plan {
        let local = core.start - ext.start..core.end - ext.start;
        let window = &x[ext.clone()];
        if window.len() < 2 {
            return Err(invalid("series too short for windowed compression"));
        }
        let (sel, o) = compress_with_context(window, local, tol, variant)?;
        ops += o;
        selections.push(sel);
    }
    Ok((selections, ops))
}

/// Reconstructs the core samples of one selection.
pub fn spectral_decompress(sel: &SpectralSelection) -> Result<TimeSeries> {
    let len = sel.window_len;
    if len == 0 || sel.core.start >= sel.core.end || sel.core.end > len {
        return Err(invalid("selection window is empty or its core is out of range"));
    }
    let full = match sel.transform {
        Transform::Fft => {
            let mut spectrum = vec![Complex64::new(0.0, 0.0); len];
            for pick in &sel.picks {
                let valid = match pick.part {
                    Part::Real => pick.position <= len / 2,
                    Part::Imag => pick.position >= 1 && 2 * pick.position < len,
                    Part::Dct => false,
                };
                if !valid {
                    return Err(invalid(format!("pick {pick:?} out of range for FFT length {len}")));
                }
                install(&mut spectrum, pick);
            }
            inverse_real(&Fft::new(len), &spectrum, &mut OpCount::default())
        }
        Transform::Dct => {
            let mut kept = vec![0.0; len];
            for pick in &sel.picks {
                if pick.part != Part::Dct || pick.position >= len {
                    return Err(invalid(format!("pick {pick:?} out of range for DCT length {len}")));
                }
                kept[pick.position] = pick.value;
            }
            Dct::new(len).inverse(&kept, &mut OpCount::default())
        }
    };
    TimeSeries::new(full[sel.core.clone()].to_vec())
}

/// Concatenated cores of a list of selections.
pub fn spectral_decompress_all(selections: &[SpectralSelection]) -> Result<TimeSeries> {
    let mut out = Vec::new();
    for sel in selections {
        out.extend_from_slice(spectral_decompress(sel)?.samples());
    }
    TimeSeries::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ts(v: Vec<f64>) -> TimeSeries {
        TimeSeries::new(v).unwrap()
    }

    fn tol(e: f64) -> Tolerance {
        Tolerance::new(e).unwrap()
    }

    #[test]
    fn slot_count_equals_length() {
        for len in 1..40 {
            assert_eq!(fft_slots(len).len(), len);
        }
    }

    #[test]
    fn single_cosine_is_one_real_pick() {
        let n = 64;
        let x: Vec<f64> = (0..n).map(|i| (2.0 * PI * 5.0 * i as f64 / n as f64).cos()).collect();
        let (sel, _) = fft_compress(&ts(x.clone()), tol(1e-6)).unwrap();
        assert_eq!(sel.picks.len(), 1);
        assert_eq!((sel.picks[0].position, sel.picks[0].part), (5, Part::Real));
        let y = spectral_decompress(&sel).unwrap();
        assert!(y.max_abs_error(&x) <= 1e-6);
    }

    #[test]
    fn constant_is_one_dc_pick() {
        let x = vec![2.5; 50];
        for f in [fft_compress, fft_lpf_compress, dct_compress, dct_lpf_compress] {
            let (sel, _) = f(&ts(x.clone()), tol(1e-9)).unwrap();
            assert_eq!(sel.picks.len(), 1);
            assert_eq!(sel.picks[0].position, 0);
        }
    }

    #[test]
    fn lowpass_stops_after_first_bin() {
        let n = 64;
        let x: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 / n as f64).cos()).collect();
        let (sel, _) = fft_lpf_compress(&ts(x), tol(1e-6)).unwrap();
        assert!(sel.picks.iter().all(|p| p.position <= 1));
        assert_eq!(sel.picks.last().unwrap().position, 1);
    }

    #[test]
    fn lowpass_pathology_on_high_frequency() {
        let n = 64;
        let k = n / 2 - 1;
        let x: Vec<f64> = (0..n).map(|i| (2.0 * PI * k as f64 * i as f64 / n as f64).cos()).collect();
        let (lpf, _) = fft_lpf_compress(&ts(x.clone()), tol(1e-6)).unwrap();
        let (greedy, _) = fft_compress(&ts(x), tol(1e-6)).unwrap();
        let bins: std::collections::BTreeSet<usize> = lpf.picks.iter().map(|p| p.position).collect();
        assert_eq!(bins, (0..=k).collect());
        assert!(lpf.picks.len() > greedy.picks.len());
    }

    #[test]
    fn dct_basis_function_is_one_pick() {
        let n = 40;
        for k in [0usize, 1, 7, 39] {
            let x: Vec<f64> = (0..n).map(|i| (PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64).cos()).collect();
            let (sel, _) = dct_compress(&ts(x), tol(1e-9)).unwrap();
            assert_eq!(sel.picks.len(), 1);
            assert_eq!(sel.picks[0].position, k);
        }
    }

    #[test]
    fn empty_selection_decodes_to_zeros() {
        for transform in [Transform::Fft, Transform::Dct] {
            let sel = SpectralSelection {
                transform,
                selection: Selection::Greedy,
                picks: vec![],
                window_len: 8,
                core: 0..8,
            };
            assert_eq!(spectral_decompress(&sel).unwrap().samples(), &[0.0; 8]);
        }
    }

    #[test]
    fn out_of_range_picks_are_rejected() {
        let sel = SpectralSelection {
            transform: Transform::Fft,
            selection: Selection::Greedy,
            picks: vec![Pick {
                position: 4,
                part: Part::Imag,
                value: 1.0,
            }],
            window_len: 8,
            core: 0..8,
        };
        assert!(spectral_decompress(&sel).is_err());
        let sel = SpectralSelection {
            transform: Transform::Dct,
            selection: Selection::Greedy,
            picks: vec![Pick {
                position: 8,
                part: Part::Dct,
                value: 1.0,
            }],
            window_len: 8,
            core: 0..8,
        };
        assert!(spectral_decompress(&sel).is_err());
    }

    #[test]
    fn zero_overlap_matches_per_core_compression() {
        let x: Vec<f64> = (0..120).map(|i| (i as f64 * 0.05).sin() + 0.1 * ((i * 7) % 5) as f64).collect();
        let (sels, _) = windowed_compress(&ts(x.clone()), tol(0.05), WindowedVariant::Fft, 40, 0).unwrap();
        assert_eq!(sels.len(), 3);
        for (i, sel) in sels.iter().enumerate() {
            let (direct, _) = fft_compress(&ts(x[i * 40..(i + 1) * 40].to_vec()), tol(0.05)).unwrap();
            assert_eq!(sel, &direct);
        }
    }

    #[test]
    fn window_plan_truncates_flanks() {
        let plan = window_plan(100, 40, 10);
        assert_eq!(plan, vec![(0..50, 0..40), (30..90, 40..80), (70..100, 80..100)]);
    }

    #[test]
    fn full_spectrum_round_trip() {
        let x: Vec<f64> = (0..37).map(|i| ((i * 13) % 11) as f64 - 5.0).collect();
        let (sel, _) = fft_compress(&ts(x.clone()), tol(1e-10)).unwrap();
        let y = spectral_decompress(&sel).unwrap();
        assert!(y.max_abs_error(&x) <= 1e-10);
    }
}
