//! Instrumented discrete transforms for arbitrary lengths.
//!
//! [`Fft`] is a recursive mixed-radix Cooley-Tukey transform. Radices up to
//! [`MAX_DIRECT_RADIX`] are combined with direct small DFTs; lengths with a
//! larger prime factor go through Bluestein's chirp-z algorithm on a
//! power-of-two transform. [`Dct`] computes the orthonormal DCT-II and its
//! inverse (DCT-III) through one complex FFT of the same length.
//!
//! Twiddle and chirp tables are computed when a plan is built and are not
//! charged to the [`OpCount`]; everything done per call is.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::ops::OpCount;

/// Largest prime radix handled by a direct DFT inside the mixed-radix recursion.
pub const MAX_DIRECT_RADIX: usize = 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone)]
enum Algorithm {
    MixedRadix { factors: Vec<usize> },
    Bluestein(Box<BluesteinPlan>),
}

#[derive(Debug, Clone)]
struct BluesteinPlan {
    inner: Fft,
    /// exp(-i pi k^2 / n) for k in 0..n
    chirp: Vec<Complex64>,
    /// Forward transform of the conjugate chirp, zero padded to the inner length.
    kernel_forward: Vec<Complex64>,
    /// Same for the inverse direction (chirp conjugated).
    kernel_inverse: Vec<Complex64>,
}

/// A complex FFT plan of fixed length.
#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    /// exp(-2 pi i k / len)
    twiddles: Vec<Complex64>,
    algorithm: Algorithm,
}

fn factorize(mut n: usize) -> Vec<usize> {
    let mut factors = Vec::new();
    // Radix 4 first keeps the recursion shallow for powers of two.
    while n % 4 == 0 {
        factors.push(4);
        n /= 4;
    }
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            factors.push(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    factors
}

impl Fft {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "FFT length must be positive");
        let twiddles = (0..len)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / len as f64))
            .collect();
        let factors = factorize(len);
        let algorithm = if factors.iter().any(|&p| p > MAX_DIRECT_RADIX) {
            Algorithm::Bluestein(Box::new(BluesteinPlan::new(len)))
        } else {
            Algorithm::MixedRadix { factors }
        };
        Self {
            len,
            twiddles,
            algorithm,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Unnormalized forward transform, or the inverse scaled by `1/len`.
    pub fn process(&self, data: &mut [Complex64], direction: Direction, ops: &mut OpCount) {
        assert_eq!(data.len(), self.len, "buffer length does not match plan");
        self.process_unscaled(data, direction, ops);
        if direction == Direction::Inverse && self.len > 1 {
            let scale = 1.0 / self.len as f64;
            for v in data.iter_mut() {
                *v *= scale;
            }
            ops.mul(2 * self.len as u64);
        }
    }

    fn process_unscaled(&self, data: &mut [Complex64], direction: Direction, ops: &mut OpCount) {
        match &self.algorithm {
            Algorithm::MixedRadix { factors } => {
                let input = data.to_vec();
                let mut scratch = Vec::with_capacity(MAX_DIRECT_RADIX * 2);
                self.mixed_radix(&input, 0, 1, self.len, factors, data, direction, &mut scratch, ops);
            }
            Algorithm::Bluestein(plan) => plan.process(data, direction, ops),
        }
    }

    #[inline]
    fn twiddle(&self, exponent: usize, direction: Direction) -> Complex64 {
        let w = self.twiddles[exponent % self.len];
        match direction {
            Direction::Forward => w,
            Direction::Inverse => w.conj(),
        }
    }

    /// Decimation in time: `out[0..n]` receives the DFT of
    /// `input[offset], input[offset + stride], ...`.
    #[allow(clippy::too_many_arguments)]
    fn mixed_radix(
        &self,
        input: &[Complex64],
        offset: usize,
        stride: usize,
        n: usize,
        factors: &[usize],
        out: &mut [Complex64],
        direction: Direction,
        scratch: &mut Vec<Complex64>,
        ops: &mut OpCount,
    ) {
        if n == 1 {
            out[0] = input[offset];
            return;
        }
        let p = factors[0];
        let m = n / p;
        for r in 0..p {
            self.mixed_radix(
                input,
                offset + r * stride,
                stride * p,
                m,
                &factors[1..],
                &mut out[r * m..(r + 1) * m],
                direction,
                scratch,
                ops,
            );
        }

        // Exponent step so that twiddle(e * step) = exp(-2 pi i e / n).
        let step = self.len / n;
        let radix_step = self.len / p;
        for k in 0..m {
            scratch.clear();
            for r in 0..p {
                let y = out[r * m + k];
                let e = r * k;
                if e == 0 {
                    scratch.push(y);
                } else {
                    ops.complex_mul();
                    scratch.push(y * self.twiddle(e * step, direction));
                }
            }
            match p {
                2 => {
                    let (a, b) = (scratch[0], scratch[1]);
                    out[k] = a + b;
                    out[k + m] = a - b;
                    ops.add(2);
                    ops.sub(2);
                }
                4 => {
                    let (a, b, c, d) = (scratch[0], scratch[1], scratch[2], scratch[3]);
                    let s0 = a + c;
                    let s1 = a - c;
                    let s2 = b + d;
                    let s3 = b - d;
                    // Multiplying by -i (forward) or i (inverse) is a swap and a sign flip.
                    let s3_rot = match direction {
                        Direction::Forward => Complex64::new(s3.im, -s3.re),
                        Direction::Inverse => Complex64::new(-s3.im, s3.re),
                    };
                    out[k] = s0 + s2;
                    out[k + m] = s1 + s3_rot;
                    out[k + 2 * m] = s0 - s2;
                    out[k + 3 * m] = s1 - s3_rot;
                    ops.add(8);
                    ops.sub(8);
                }
                _ => {
                    // Odd prime radix. Pairing r with p - r turns every
                    // rotation into a real scaling of a sum or a difference.
                    let half = p / 2;
                    let a0 = scratch[0];
                    let mut sums = [Complex64::new(0.0, 0.0); MAX_DIRECT_RADIX / 2];
                    let mut diffs = sums;
                    let mut dc = a0;
                    for r in 1..=half {
                        sums[r - 1] = scratch[r] + scratch[p - r];
                        diffs[r - 1] = scratch[r] - scratch[p - r];
                        dc += sums[r - 1];
                    }
                    ops.add(4 * half as u64);
                    ops.sub(2 * half as u64);
                    out[k] = dc;
                    for q in 1..=half {
                        let mut even = a0;
                        let mut odd = Complex64::new(0.0, 0.0);
                        for r in 1..=half {
                            // exp(-2 pi i rq / p) = cos - i sin
                            let w = self.twiddles[(r * q) % p * radix_step];
                            even += sums[r - 1] * w.re;
                            odd += diffs[r - 1] * (-w.im);
                        }
                        ops.mul(4 * half as u64);
                        ops.add(4 * half as u64);
                        let rot = match direction {
                            Direction::Forward => Complex64::new(odd.im, -odd.re),
                            Direction::Inverse => Complex64::new(-odd.im, odd.re),
                        };
                        out[k + q * m] = even + rot;
                        out[k + (p - q) * m] = even - rot;
                        ops.add(2);
                        ops.sub(2);
                    }
                }
            }
        }
    }
}

impl BluesteinPlan {
    fn new(len: usize) -> Self {
        let inner_len = (2 * len - 1).next_power_of_two();
        let inner = Fft::new(inner_len);
        let chirp: Vec<Complex64> = (0..len)
            .map(|k| {
                // k^2 mod 2n keeps the phase argument small for long transforms.
                let k2 = (k as u128 * k as u128 % (2 * len as u128)) as f64;
                Complex64::from_polar(1.0, -PI * k2 / len as f64)
            })
            .collect();
        let build_kernel = |conj_chirp: bool| {
            let mut kernel = vec![Complex64::new(0.0, 0.0); inner_len];
            for k in 0..len {
                let c = if conj_chirp { chirp[k].conj() } else { chirp[k] };
                kernel[k] = c;
                if k > 0 {
                    kernel[inner_len - k] = c;
                }
            }
            let mut scratch_ops = OpCount::ZERO;
            inner.process(&mut kernel, Direction::Forward, &mut scratch_ops);
            kernel
        };
        let kernel_forward = build_kernel(true);
        let kernel_inverse = build_kernel(false);
        Self {
            inner,
            chirp,
            kernel_forward,
            kernel_inverse,
        }
    }

    fn process(&self, data: &mut [Complex64], direction: Direction, ops: &mut OpCount) {
        let n = data.len();
        let m = self.inner.len();
        let chirp = |k: usize| match direction {
            Direction::Forward => self.chirp[k],
            Direction::Inverse => self.chirp[k].conj(),
        };
        let kernel = match direction {
            Direction::Forward => &self.kernel_forward,
            Direction::Inverse => &self.kernel_inverse,
        };
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..n {
            buf[k] = data[k] * chirp(k);
        }
        ops.mul(4 * n as u64);
        ops.add(n as u64);
        ops.sub(n as u64);
        self.inner.process(&mut buf, Direction::Forward, ops);
        for (b, h) in buf.iter_mut().zip(kernel) {
            *b *= h;
        }
        ops.mul(4 * m as u64);
        ops.add(m as u64);
        ops.sub(m as u64);
        self.inner.process(&mut buf, Direction::Inverse, ops);
        for k in 0..n {
            data[k] = buf[k] * chirp(k);
        }
        ops.mul(4 * n as u64);
        ops.add(n as u64);
        ops.sub(n as u64);
    }
}

/// Forward FFT of a real sequence.
pub fn real_fft(plan: &Fft, samples: &[f64], ops: &mut OpCount) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    plan.process(&mut buf, Direction::Forward, ops);
    buf
}

/// Inverse FFT keeping only the real part of the result.
pub fn inverse_real(plan: &Fft, spectrum: &[Complex64], ops: &mut OpCount) -> Vec<f64> {
    let mut buf = spectrum.to_vec();
    plan.process(&mut buf, Direction::Inverse, ops);
    buf.into_iter().map(|c| c.re).collect()
}

/// Orthonormal DCT-II / DCT-III pair of fixed length.
#[derive(Debug, Clone)]
pub struct Dct {
    fft: Fft,
    /// Orthonormal scale times exp(-i pi k / (2n)).
    post: Vec<Complex64>,
    /// exp(i pi k / (2n)) divided by the orthonormal scale.
    pre: Vec<Complex64>,
}

impl Dct {
    pub fn new(len: usize) -> Self {
        let n = len as f64;
        let scale = |k: usize| if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
        let shift = |k: usize| Complex64::from_polar(1.0, -PI * k as f64 / (2.0 * n));
        Self {
            fft: Fft::new(len),
            post: (0..len).map(|k| shift(k) * scale(k)).collect(),
            pre: (0..len).map(|k| shift(k).conj() / scale(k)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.fft.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fft.is_empty()
    }

    /// Orthonormal DCT-II.
    pub fn forward(&self, samples: &[f64], ops: &mut OpCount) -> Vec<f64> {
        let n = self.len();
        assert_eq!(samples.len(), n, "buffer length does not match plan");
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n.div_ceil(2) {
            v[k] = Complex64::new(samples[2 * k], 0.0);
        }
        for k in 0..n / 2 {
            v[n - 1 - k] = Complex64::new(samples[2 * k + 1], 0.0);
        }
        self.fft.process(&mut v, Direction::Forward, ops);
        let out = (0..n)
            .map(|k| {
                let s = self.post[k];
                v[k].re * s.re - v[k].im * s.im
            })
            .collect();
        ops.mul(2 * n as u64);
        ops.sub(n as u64);
        out
    }

    /// Orthonormal DCT-III, the inverse of [`Dct::forward`].
    pub fn inverse(&self, coefficients: &[f64], ops: &mut OpCount) -> Vec<f64> {
        let n = self.len();
        assert_eq!(coefficients.len(), n, "buffer length does not match plan");
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[0] = Complex64::new(coefficients[0] * self.pre[0].re, 0.0);
        ops.mul(1);
        for k in 1..n {
            let z = Complex64::new(coefficients[k], -coefficients[n - k]);
            v[k] = z * self.pre[k];
            ops.complex_mul();
        }
        self.fft.process(&mut v, Direction::Inverse, ops);
        let mut out = vec![0.0; n];
        for k in 0..n.div_ceil(2) {
            out[2 * k] = v[k].re;
        }
        for k in 0..n / 2 {
            out[2 * k + 1] = v[n - 1 - k].re;
        }
        out
    }
}
