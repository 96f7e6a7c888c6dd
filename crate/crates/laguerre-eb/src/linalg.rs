//! Dense symmetric positive definite solves.
//!
//! Matrices here are small (the truncation level M), stored row-major in a
//! flat slice. Cholesky is all that is needed: the moment matrix is a Gram
//! matrix, so after the ridge shift it is positive definite by
//! construction.

use crate::error::{Error, Result};

/// Lower Cholesky factor of the `n`×`n` matrix `a` (row-major).
pub(crate) fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::NumericalFailure(format!(
                        "matrix not positive definite at pivot {i} (value {s:.3e})"
                    )));
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Solves `a x = b` for symmetric positive definite `a` via Cholesky.
pub(crate) fn solve_spd(a: &[f64], n: usize, b: &[f64]) -> Result<Vec<f64>> {
    debug_assert_eq!(b.len(), n);
    let l = cholesky(a, n)?;
    // Forward substitution L y = b.
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    // Back substitution Lᵀ x = y.
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    Ok(x)
}

/// Residual ‖a x − b‖₂.
pub(crate) fn residual_norm(a: &[f64], n: usize, x: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        let mut r = -b[i];
        for j in 0..n {
            r += a[i * n + j] * x[j];
        }
        acc += r * r;
    }
    acc.sqrt()
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
