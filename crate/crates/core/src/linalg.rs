//! Small dense solves used by the least-squares compressors.

use crate::error::{Error, Result};
use crate::ops::OpCount;

/// Relative pivot threshold below which a system is declared singular.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Solves `a * x = b` in place by Gaussian elimination with partial pivoting.
///
/// `a` is row-major `n x n`. A pivot smaller than `PIVOT_TOLERANCE * max|a|`
/// (measured on the input matrix) is reported as [`Error::SingularSystem`].
pub fn gaussian_elimination(a: &mut [f64], b: &mut [f64], ops: &mut OpCount) -> Result<Vec<f64>> {
    let n = b.len();
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let threshold = PIVOT_TOLERANCE * scale;
    if n == 0 {
        return Ok(Vec::new());
    }

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_abs = a[col * n + col].abs();
        for row in col + 1..n {
            ops.cmp(1);
            let v = a[row * n + col].abs();
            if v > pivot_abs {
                pivot_abs = v;
                pivot_row = row;
            }
        }
        ops.cmp(1);
        if !(pivot_abs > threshold) {
            return Err(Error::SingularSystem {
                pivot: pivot_abs,
                threshold,
            });
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            ops.div(1);
            a[row * n + col] = 0.0;
            for k in col + 1..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
            let updates = (n - col) as u64;
            ops.mul(updates);
            ops.sub(updates);
        }
    }

    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * x[k];
        }
        let terms = (n - row - 1) as u64;
        ops.mul(terms);
        ops.sub(terms);
        x[row] = acc / a[row * n + row];
        ops.div(1);
    }
    Ok(x)
}

/// `max_i |(a x - b)_i|`, computed without instrumentation.
pub fn residual_inf(a: &[f64], x: &[f64], b: &[f64]) -> f64 {
    let n = b.len();
    (0..n)
        .map(|i| {
            let ax: f64 = (0..n).map(|k| a[i * n + k] * x[k]).sum();
            (ax - b[i]).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_with_row_swap() {
        let mut a = vec![0.0, 1.0, 1.0, 1.0];
        let mut b = vec![2.0, 3.0];
        let x = gaussian_elimination(&mut a, &mut b, &mut OpCount::default()).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 2.0];
        let err = gaussian_elimination(&mut a, &mut b, &mut OpCount::default()).unwrap_err();
        assert!(matches!(err, Error::SingularSystem { .. }));

        let mut zero = vec![0.0; 4];
        let mut b = vec![0.0; 2];
        assert!(gaussian_elimination(&mut zero, &mut b, &mut OpCount::default()).is_err());
    }

    #[test]
    fn counts_scale_cubically() {
        let n = 6;
        let mut a: Vec<f64> = (0..n * n).map(|i| if i % (n + 1) == 0 { 10.0 } else { 1.0 }).collect();
        let mut b = vec![1.0; n];
        let mut ops = OpCount::ZERO;
        gaussian_elimination(&mut a, &mut b, &mut ops).unwrap();
        // n divisions for the multipliers below the diagonal plus n for back substitution.
        assert_eq!(ops.div as usize, n * (n - 1) / 2 + n);
        assert!(ops.mul as usize >= n * n * n / 3);
    }
}
