//! Adaptive Gauss–Kronrod quadrature.
//!
//! Panels use the 15-point Kronrod rule with its embedded 7-point Gauss
//! rule for the error estimate; refinement always splits the panel with the
//! largest error. Integrands may be vector valued so that a whole basis
//! sweep shares one set of nodes.
//!
//! Semi-infinite ranges are handled by marching fixed-width windows from
//! the lower limit until the contribution of a window falls below 1e-16 of
//! the running total twice in a row, which for the e^{-x/2}-enveloped
//! integrands in this crate bounds the discarded tail well under every
//! tolerance used.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::kahan::CompensatedSum;

/// Default absolute tolerance for basis and mixing-model integrals.
pub const DEFAULT_ABS_TOL: f64 = 1e-10;

/// Hard cap on panels per finite-interval integration.
const MAX_PANELS: usize = 8192;

/// Width of the windows marched over semi-infinite ranges.
const WINDOW_WIDTH: f64 = 32.0;

/// Cap on the number of windows (reaches lower + 4096).
const MAX_WINDOWS: usize = 128;

/// A window contributing less than this fraction of the running total
/// (twice in a row) terminates the march.
const TAIL_CUTOFF_REL: f64 = 1e-16;

// 15-point Kronrod abscissae on [-1, 1] (positive half, descending);
// entries 1, 3, 5 and the centre are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_33,
    0.949_107_912_342_758_524_526_189_684_047_85,
    0.864_864_423_359_769_072_789_712_788_640_93,
    0.741_531_185_599_394_439_863_864_773_280_79,
    0.586_087_235_467_691_130_294_144_838_258_73,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_52,
    0.140_653_259_715_525_918_745_189_590_510_24,
    0.169_004_726_639_267_902_826_583_426_598_55,
    0.190_350_578_064_785_409_913_256_402_421_01,
    0.204_432_940_075_298_892_414_161_999_234_65,
    0.209_482_141_084_727_828_012_999_174_891_71,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_08,
    0.279_705_391_489_276_667_901_467_771_423_78,
    0.381_830_050_505_118_944_950_369_775_488_97,
    0.417_959_183_673_469_387_755_102_040_816_33,
];

/// Per-component value and error estimate of one K15 panel.
fn qk15_vec<F>(f: &F, dim: usize, a: f64, b: f64, vals: &mut [f64], errs: &mut [f64])
where
    F: Fn(f64, &mut [f64]),
{
    let half = 0.5 * (b - a);
    let centre = 0.5 * (a + b);

    // Node evaluations: centre plus 7 symmetric pairs.
    let mut fv = vec![0.0; 15 * dim];
    let (mut lo_buf, mut hi_buf) = (vec![0.0; dim], vec![0.0; dim]);
    f(centre, &mut fv[7 * dim..8 * dim]);
    for j in 0..7 {
        let dx = half * XGK[j];
        f(centre - dx, &mut lo_buf);
        f(centre + dx, &mut hi_buf);
        fv[j * dim..(j + 1) * dim].copy_from_slice(&lo_buf);
        fv[(14 - j) * dim..(15 - j) * dim].copy_from_slice(&hi_buf);
    }

    for k in 0..dim {
        let fc = fv[7 * dim + k];
        let mut resk = WGK[7] * fc;
        let mut resabs = WGK[7] * fc.abs();
        let mut resg = WG[3] * fc;
        for j in 0..7 {
            let flo = fv[j * dim + k];
            let fhi = fv[(14 - j) * dim + k];
            resk += WGK[j] * (flo + fhi);
            resabs += WGK[j] * (flo.abs() + fhi.abs());
            if j % 2 == 1 {
                // XGK[1], XGK[3], XGK[5] are the Gauss nodes.
                resg += WG[j / 2] * (flo + fhi);
            }
        }
        let mean = 0.5 * resk;
        let mut resasc = WGK[7] * (fc - mean).abs();
        for j in 0..7 {
            resasc += WGK[j]
                * ((fv[j * dim + k] - mean).abs() + (fv[(14 - j) * dim + k] - mean).abs());
        }
        let value = resk * half;
        let resasc = resasc * half.abs();
        let mut err = ((resk - resg) * half).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        let resabs = resabs * half.abs();
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        vals[k] = value;
        errs[k] = err;
    }
}

struct Panel {
    key: f64,
    a: f64,
    b: f64,
    vals: Vec<f64>,
    errs: Vec<f64>,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // NaN sorts first so broken panels are split (and detected) early.
        self.key.partial_cmp(&other.key).unwrap_or(Ordering::Greater)
    }
}

/// Adaptive driver shared by all public entry points. `done` receives the
/// per-component running totals and error totals and decides convergence.
fn adapt_vec<F, D>(f: &F, dim: usize, a: f64, b: f64, done: D) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(f64, &mut [f64]),
    D: Fn(&[f64], &[f64]) -> bool,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidParameter(format!(
            "bad integration interval [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok((vec![0.0; dim], vec![0.0; dim]));
    }

    let mut vals = vec![0.0; dim];
    let mut errs = vec![0.0; dim];
    qk15_vec(f, dim, a, b, &mut vals, &mut errs);

    let mut total_vals = vals.clone();
    let mut total_errs = errs.clone();
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        key: errs.iter().sum(),
        a,
        b,
        vals,
        errs,
    });
    let mut panels = 1usize;

    while !done(&total_vals, &total_errs) {
        if panels >= MAX_PANELS {
            return Err(Error::QuadratureNonConvergent(format!(
                "panel budget exhausted on [{a}, {b}] (err {:.3e})",
                total_errs.iter().sum::<f64>()
            )));
        }
        let worst = heap.pop().expect("heap cannot be empty while refining");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            return Err(Error::QuadratureNonConvergent(format!(
                "interval [{}, {}] cannot be refined further",
                worst.a, worst.b
            )));
        }
        for k in 0..dim {
            total_vals[k] -= worst.vals[k];
            total_errs[k] -= worst.errs[k];
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let mut v = vec![0.0; dim];
            let mut e = vec![0.0; dim];
            qk15_vec(f, dim, lo, hi, &mut v, &mut e);
            for k in 0..dim {
                total_vals[k] += v[k];
                total_errs[k] += e[k];
            }
            heap.push(Panel {
                key: e.iter().sum(),
                a: lo,
                b: hi,
                vals: v,
                errs: e,
            });
        }
        panels += 1;
    }

    // Re-sum panel contributions with compensation: the incremental totals
    // accumulate rounding over thousands of updates.
    let mut sums: Vec<CompensatedSum> = vec![CompensatedSum::new(); dim];
    let panels: Vec<Panel> = heap.into_vec();
    for p in &panels {
        for k in 0..dim {
            sums[k].add(p.vals[k]);
        }
    }
    let out: Vec<f64> = sums.iter().map(|s| s.value()).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::QuadratureNonConvergent(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    Ok((out, total_errs))
}

/// ∫_a^b f to absolute tolerance `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    let wrapped = |x: f64, out: &mut [f64]| out[0] = f(x);
    let (vals, _) = adapt_vec(&wrapped, 1, a, b, |_, errs| errs[0] <= abs_tol)?;
    Ok(vals[0])
}

/// Vector-valued ∫_a^b f, each component to absolute tolerance `abs_tol`.
pub fn integrate_vec<F: Fn(f64, &mut [f64])>(
    f: F,
    dim: usize,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Result<Vec<f64>> {
    let (vals, _) = adapt_vec(&f, dim, a, b, |_, errs| {
        errs.iter().all(|&e| e <= abs_tol)
    })?;
    Ok(vals)
}

/// Pair integral with a relative stopping rule, sharing panels between the
/// two components so their errors are correlated (the use case is Ψ and p
/// of a Bayes ratio: the quotient benefits from the cancellation).
pub fn integrate_pair_rel<F: Fn(f64) -> (f64, f64)>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    let wrapped = |x: f64, out: &mut [f64]| {
        let (u, v) = f(x);
        out[0] = u;
        out[1] = v;
    };
    let done = |vals: &[f64], errs: &[f64]| {
        let floor = 1e-16 * (vals[0].abs() + vals[1].abs()) + 1e-300;
        errs[0] <= (rel_tol * vals[0].abs()).max(floor)
            && errs[1] <= (rel_tol * vals[1].abs()).max(floor)
    };
    let (vals, _) = adapt_vec(&wrapped, 2, a, b, done)?;
    Ok((vals[0], vals[1]))
}

/// Generic window march shared by the semi-infinite integrators.
fn march_windows<G>(dim: usize, lower: f64, mut window: G) -> Result<Vec<f64>>
where
    G: FnMut(f64, f64, &[f64]) -> Result<Vec<f64>>,
{
    let mut totals = vec![CompensatedSum::new(); dim];
    let mut running = vec![0.0; dim];
    let mut consecutive_small = 0usize;
    for w in 0..MAX_WINDOWS {
        let lo = lower + w as f64 * WINDOW_WIDTH;
        let hi = lo + WINDOW_WIDTH;
        let contrib = window(lo, hi, &running)?;
        let mut small = true;
        for k in 0..dim {
            totals[k].add(contrib[k]);
            running[k] = totals[k].value();
            if contrib[k].abs() > TAIL_CUTOFF_REL * running[k].abs() + 1e-300 {
                small = false;
            }
        }
        if small {
            consecutive_small += 1;
            if consecutive_small >= 2 {
                return Ok(running);
            }
        } else {
            consecutive_small = 0;
        }
    }
    Err(Error::QuadratureNonConvergent(format!(
        "tail did not decay within {} windows from {lower}",
        MAX_WINDOWS
    )))
}

/// ∫_lower^∞ f to absolute tolerance `abs_tol`, for integrands with an
/// eventually exponentially decaying envelope.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    abs_tol: f64,
) -> Result<f64> {
    let window_tol = abs_tol / 16.0;
    let out = march_windows(1, lower, |lo, hi, _| {
        let v = integrate(&f, lo, hi, window_tol)?;
        Ok(vec![v])
    })?;
    Ok(out[0])
}

/// Vector-valued semi-infinite integral, each component to `abs_tol`.
pub fn integrate_vec_semi_infinite<F: Fn(f64, &mut [f64])>(
    f: F,
    dim: usize,
    lower: f64,
    abs_tol: f64,
) -> Result<Vec<f64>> {
    let window_tol = abs_tol / 16.0;
    march_windows(dim, lower, |lo, hi, _| {
        integrate_vec(&f, dim, lo, hi, window_tol)
    })
}

/// Semi-infinite pair integral with relative stopping (see
/// [`integrate_pair_rel`]).
pub fn integrate_pair_rel_semi_infinite<F: Fn(f64) -> (f64, f64)>(
    f: F,
    lower: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    let wrapped = |x: f64, out: &mut [f64]| {
        let (u, v) = f(x);
        out[0] = u;
        out[1] = v;
    };
    let out = march_windows(2, lower, |lo, hi, running: &[f64]| {
        // Window tolerance tracks the scale accumulated so far.
        let scale = running[0].abs() + running[1].abs();
        let done = move |vals: &[f64], errs: &[f64]| {
            let s = scale + vals[0].abs() + vals[1].abs();
            let tol = (rel_tol * s / 16.0).max(1e-300);
            errs[0] <= tol && errs[1] <= tol
        };
        let (vals, _) = adapt_vec(&wrapped, 2, lo, hi, done)?;
        Ok(vals)
    })?;
    Ok((out[0], out[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_interval_is_zero() {
        assert_eq!(integrate(|x| x.exp(), 1.0, 1.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(integrate(|x| x, 1.0, 0.0, 1e-10).is_err());
    }

    #[test]
    fn oscillatory_integrand() {
        // ∫_0^{10π} sin x dx = 0 exactly by periodicity.
        let v = integrate(f64::sin, 0.0, 10.0 * std::f64::consts::PI, 1e-11).unwrap();
        assert!(v.abs() < 1e-10, "got {v}");
    }

    #[test]
    fn endpoint_singularity_converges() {
        // ∫_0^1 x^{-1/2} dx = 2; integrable singularity at 0.
        let v = integrate(|x| x.sqrt().recip(), 1e-300, 1.0, 1e-9).unwrap();
        assert!((v - 2.0).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn semi_infinite_exponential() {
        // ∫_0^∞ e^{-x/2} dx = 2.
        let v = integrate_semi_infinite(|x| (-x / 2.0).exp(), 0.0, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-11, "got {v}");
        // ∫_3^∞ e^{-x} dx = e^{-3}.
        let v = integrate_semi_infinite(|x| (-x).exp(), 3.0, 1e-13).unwrap();
        assert!((v - (-3.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn vector_components_integrate_together() {
        let v = integrate_vec(
            |x, out| {
                out[0] = x;
                out[1] = x * x;
            },
            2,
            0.0,
            1.0,
            1e-12,
        )
        .unwrap();
        assert!((v[0] - 0.5).abs() < 1e-12);
        assert!((v[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn pair_rel_matches_closed_forms() {
        // (∫_0^∞ e^{-x}, ∫_0^∞ x e^{-x}) = (1, 1).
        let (p, q) =
            integrate_pair_rel_semi_infinite(|x| ((-x).exp(), x * (-x).exp()), 0.0, 1e-11)
                .unwrap();
        assert!((p - 1.0).abs() < 1e-9);
        assert!((q - 1.0).abs() < 1e-9);
    }

    #[test]
    fn panel_budget_reports_failure() {
        // A pathological discontinuous oscillator that never settles at the
        // requested tolerance.
        let res = integrate(|x| (1e8 * x).sin().signum(), 0.0, 1.0, 1e-14);
        assert!(res.is_err());
    }
}
