//! Generalized Laguerre polynomials and the orthonormal function system
//!
//! φ⁽ᵃ⁾_k(x) = [k!/Γ(k+a+1)]^{1/2} e^{−x/2} x^{a/2} L⁽ᵃ⁾_k(x),  k = 0, 1, …
//!
//! on (0, ∞). Polynomials are evaluated by the stable three-term
//! recurrence; the normalized functions fold the weight and the
//! normalization ratio into the recurrence itself, so that every
//! intermediate stays on the scale of the result and nothing overflows for
//! large k. The explicit alternating series exists only as a test oracle.

use crate::error::{Error, Result};
use crate::kahan::CompensatedSum;
use crate::quad;
use crate::special::ln_gamma;

/// Basis parameter `a` and truncation level `M`; functions are
/// φ⁽ᵃ⁾_k for k = 0 … M−1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisSpec {
    a: f64,
    m: usize,
}

impl BasisSpec {
    pub fn new(a: f64, m: usize) -> Result<Self> {
        if !a.is_finite() || a < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Laguerre parameter a must be finite and nonnegative, got {a}"
            )));
        }
        if m == 0 {
            return Err(Error::InvalidParameter(
                "truncation level M must be at least 1".into(),
            ));
        }
        Ok(Self { a, m })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

fn check_a(a: f64) -> Result<()> {
    if !a.is_finite() || a < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Laguerre parameter a must be finite and nonnegative, got {a}"
        )));
    }
    Ok(())
}

fn check_x_nonneg(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::OutOfDomain(format!(
            "argument must be finite and nonnegative, got {x}"
        )));
    }
    Ok(())
}

fn check_x_pos(x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::OutOfDomain(format!(
            "argument must be finite and positive, got {x}"
        )));
    }
    Ok(())
}

/// L⁽ᵃ⁾_k(x) by the three-term recurrence
/// (k+1) L⁽ᵃ⁾_{k+1} = (2k+1+a−x) L⁽ᵃ⁾_k − (k+a) L⁽ᵃ⁾_{k−1}.
pub fn laguerre_poly(k: usize, a: f64, x: f64) -> Result<f64> {
    check_a(a)?;
    check_x_nonneg(x)?;
    Ok(laguerre_poly_unchecked(k, a, x))
}

fn laguerre_poly_unchecked(k: usize, a: f64, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + a - x;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - x) * cur - (jf + a) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[k] = φ⁽ᵃ⁾_k(x)` for `k < out.len()` in one recurrence pass.
///
/// The scaled recurrence is
/// φ_{k+1} = [(2k+1+a−x) φ_k − √(k(k+a)) φ_{k−1}] / √((k+1)(k+a+1)),
/// seeded by φ_0 = exp(−x/2 + (a/2)·ln x − ln Γ(a+1)/2); at x = 0 the
/// functions take their analytic limits (1 for a = 0, 0 otherwise).
pub fn laguerre_fn_sweep(a: f64, x: f64, out: &mut [f64]) -> Result<()> {
    check_a(a)?;
    check_x_nonneg(x)?;
    if out.is_empty() {
        return Ok(());
    }
    if x == 0.0 {
        let limit = if a == 0.0 { 1.0 } else { 0.0 };
        out.fill(limit);
        return Ok(());
    }
    let phi0 = (-0.5 * x + 0.5 * a * x.ln() - 0.5 * ln_gamma(a + 1.0)).exp();
    out[0] = phi0;
    if out.len() == 1 {
        return Ok(());
    }
    out[1] = phi0 * (1.0 + a - x) / (1.0 + a).sqrt();
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0 + a - x) * out[k]
            - (kf * (kf + a)).sqrt() * out[k - 1])
            / ((kf + 1.0) * (kf + a + 1.0)).sqrt();
    }
    Ok(())
}

/// φ⁽ᵃ⁾_k(x). At x = 0 returns the analytic limit (0 for a > 0).
pub fn laguerre_fn(k: usize, a: f64, x: f64) -> Result<f64> {
    let mut buf = vec![0.0; k + 1];
    laguerre_fn_sweep(a, x, &mut buf)?;
    Ok(buf[k])
}

/// φ⁽ᵃ⁾_k(x), rejecting x = 0 when a > 0 instead of taking the limit.
pub fn laguerre_fn_strict(k: usize, a: f64, x: f64) -> Result<f64> {
    if x == 0.0 && a > 0.0 {
        return Err(Error::OutOfDomain(
            "x = 0 is outside the domain of φ⁽ᵃ⁾_k for a > 0".into(),
        ));
    }
    laguerre_fn(k, a, x)
}

/// Fills `out[k] = (φ⁽ᵃ⁾_k)′(x)` for `k < out.len()`.
///
/// Uses (L⁽ᵃ⁾_k)′ = −L⁽ᵃ⁺¹⁾_{k−1} combined with the product rule, which in
/// normalized form reads
/// (φ⁽ᵃ⁾_k)′(x) = ((a−x)/(2x)) φ⁽ᵃ⁾_k(x) − √(k/x) φ⁽ᵃ⁺¹⁾_{k−1}(x).
pub fn laguerre_fn_deriv_sweep(a: f64, x: f64, out: &mut [f64]) -> Result<()> {
    check_a(a)?;
    check_x_pos(x)?;
    if out.is_empty() {
        return Ok(());
    }
    let m = out.len();
    let mut phi = vec![0.0; m];
    laguerre_fn_sweep(a, x, &mut phi)?;
    let mut phi_up = vec![0.0; m.saturating_sub(1)];
    laguerre_fn_sweep(a + 1.0, x, &mut phi_up)?;
    let weight_term = (a - x) / (2.0 * x);
    out[0] = weight_term * phi[0];
    for k in 1..m {
        out[k] = weight_term * phi[k] - (k as f64 / x).sqrt() * phi_up[k - 1];
    }
    Ok(())
}

/// (φ⁽ᵃ⁾_k)′(x) for x > 0.
pub fn laguerre_fn_deriv(k: usize, a: f64, x: f64) -> Result<f64> {
    let mut buf = vec![0.0; k + 1];
    laguerre_fn_deriv_sweep(a, x, &mut buf)?;
    Ok(buf[k])
}

/// ∫₀ˣ φ⁽ᵃ⁾_k(z) dz by adaptive quadrature.
pub fn cumulative_integral(k: usize, a: f64, x: f64) -> Result<f64> {
    check_a(a)?;
    check_x_pos(x)?;
    let f = |z: f64| {
        let mut buf = vec![0.0; k + 1];
        laguerre_fn_sweep(a, z, &mut buf).expect("validated arguments");
        buf[k]
    };
    quad::integrate(f, 0.0, x, quad::DEFAULT_ABS_TOL)
}

/// ∫ₓ^∞ z^{−α−1} φ⁽ᵃ⁾_k(z) dz for α > 2, x > 0.
pub fn tail_weighted_integral(k: usize, a: f64, alpha: f64, x: f64) -> Result<f64> {
    check_a(a)?;
    check_x_pos(x)?;
    if !alpha.is_finite() || alpha <= 2.0 {
        return Err(Error::InvalidParameter(format!(
            "Pareto shape must exceed 2, got {alpha}"
        )));
    }
    let f = |z: f64| {
        let mut buf = vec![0.0; k + 1];
        laguerre_fn_sweep(a, z, &mut buf).expect("validated arguments");
        z.powf(-alpha - 1.0) * buf[k]
    };
    quad::integrate_semi_infinite(f, x, quad::DEFAULT_ABS_TOL)
}

/// Σ_{l<M} coeffs[l] · φ⁽ᵃ⁾_l(y) in a single recurrence sweep.
pub fn eval_series(coeffs: &[f64], spec: &BasisSpec, y: f64) -> Result<f64> {
    if coeffs.len() != spec.m() {
        return Err(Error::LengthMismatch {
            expected: spec.m(),
            got: coeffs.len(),
        });
    }
    check_x_nonneg(y)?;
    let a = spec.a();
    let mut acc = CompensatedSum::new();
    if y == 0.0 {
        if a == 0.0 {
            for &c in coeffs {
                acc.add(c);
            }
        }
        return Ok(acc.value());
    }
    let phi0 = (-0.5 * y + 0.5 * a * y.ln() - 0.5 * ln_gamma(a + 1.0)).exp();
    let mut prev = phi0;
    acc.add(coeffs[0] * prev);
    if coeffs.len() == 1 {
        return Ok(acc.value());
    }
    let mut cur = phi0 * (1.0 + a - y) / (1.0 + a).sqrt();
    acc.add(coeffs[1] * cur);
    for k in 1..coeffs.len() - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - y) * cur - (kf * (kf + a)).sqrt() * prev)
            / ((kf + 1.0) * (kf + a + 1.0)).sqrt();
        acc.add(coeffs[k + 1] * next);
        prev = cur;
        cur = next;
    }
    Ok(acc.value())
}
