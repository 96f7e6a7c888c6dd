//! The six mixing (conditional) families and their U_k representations.
//!
//! For each family q(x|θ) there is a function U_k with
//! ∫ q(x|θ) U_k(x) dx = ∫ θ q(x|θ) φ⁽ᵃ⁾_k(x) dx for every θ in the
//! family's domain, which turns the unknown series moments into marginal
//! expectations estimable by sample averages. The basis parameter `a` is
//! pinned per family — it is what makes the U_k norms finite — and cannot
//! be overridden:
//!
//! | family      | a   | U_k(x)                                            | β   |
//! |-------------|-----|---------------------------------------------------|-----|
//! | Uniform     | 0   | ∫₀ˣ φ_k + x φ_k(x)                                | 0   |
//! | Pareto(α)   | 0   | −x^{α+1} ∫ₓ^∞ z^{−α−1} φ_k(z) dz + x φ_k(x)       | 7/3 |
//! | Beta(α)     | 2   | (α−1)(1−x)x⁻¹ φ_k(x) + (1−x) φ_k′(x)              | 1   |
//! | Exponential | 2   | φ_k′(x)                                           | 1   |
//! | Rayleigh    | 4   | x⁻¹ φ_k′(x)                                       | 1   |
//! | Weibull(α)  | 2α  | (α x^{α−1})⁻¹ φ_k′(x)                             | 1   |
//!
//! β is the norm-growth exponent: ∫ U_k² ≤ c (k^β ∨ 1).

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::basis;
use crate::error::{Error, Result};
use crate::quad;
use crate::special::ln_gamma;

/// Scale parameters of a Pareto mixing live in [1, θ_o]; keeping the domain
/// above 1 is what makes the U_k norm bound of the Pareto family apply.
pub const PARETO_THETA_LO: f64 = 1.0;

/// Default θ-interval for the uniform mixing.
pub const UNIFORM_THETA_DEFAULT: (f64, f64) = (0.5, 3.0);

/// Default upper scale bound θ_o for the Pareto mixing.
pub const PARETO_THETA_O_DEFAULT: f64 = 3.0;

/// Quadrature tolerance for the U_k integral transforms.
const U_QUAD_TOL: f64 = quad::DEFAULT_ABS_TOL;

/// Quadrature tolerance for identity/norm verification integrals.
const VERIFY_QUAD_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MixingSpec", into = "MixingSpec")]
pub enum MixingModel {
    Uniform { theta_lo: f64, theta_hi: f64 },
    Pareto { alpha: f64, theta_o: f64 },
    Beta { alpha: f64 },
    Exponential,
    Rayleigh,
    Weibull { alpha: f64 },
}

/// Serde-facing description of a mixing model, as written in config files.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixingSpec {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_o: Option<f64>,
}

impl TryFrom<MixingSpec> for MixingModel {
    type Error = Error;

    fn try_from(spec: MixingSpec) -> Result<Self> {
        let no_alpha = |kind: &str, alpha: &Option<f64>| -> Result<()> {
            if alpha.is_some() {
                return Err(Error::InvalidParameter(format!(
                    "{kind} mixing takes no alpha parameter"
                )));
            }
            Ok(())
        };
        let no_theta = |kind: &str, spec: &MixingSpec| -> Result<()> {
            if spec.theta_lo.is_some() || spec.theta_hi.is_some() || spec.theta_o.is_some() {
                return Err(Error::InvalidParameter(format!(
                    "{kind} mixing takes no theta bounds"
                )));
            }
            Ok(())
        };
        match spec.kind.as_str() {
            "uniform" => {
                no_alpha("uniform", &spec.alpha)?;
                if spec.theta_o.is_some() {
                    return Err(Error::InvalidParameter(
                        "uniform mixing uses theta_lo/theta_hi, not theta_o".into(),
                    ));
                }
                MixingModel::uniform(
                    spec.theta_lo.unwrap_or(UNIFORM_THETA_DEFAULT.0),
                    spec.theta_hi.unwrap_or(UNIFORM_THETA_DEFAULT.1),
                )
            }
            "pareto" => {
                if spec.theta_lo.is_some() || spec.theta_hi.is_some() {
                    return Err(Error::InvalidParameter(
                        "pareto mixing uses theta_o, not theta_lo/theta_hi".into(),
                    ));
                }
                let alpha = spec.alpha.ok_or_else(|| {
                    Error::InvalidParameter("pareto mixing requires alpha > 2".into())
                })?;
                MixingModel::pareto(alpha, spec.theta_o.unwrap_or(PARETO_THETA_O_DEFAULT))
            }
            "beta" => {
                no_theta("beta", &spec)?;
                let alpha = spec.alpha.ok_or_else(|| {
                    Error::InvalidParameter("beta mixing requires alpha > 0".into())
                })?;
                MixingModel::beta(alpha)
            }
            "exponential" => {
                no_alpha("exponential", &spec.alpha)?;
                no_theta("exponential", &spec)?;
                Ok(MixingModel::Exponential)
            }
            "rayleigh" => {
                no_alpha("rayleigh", &spec.alpha)?;
                no_theta("rayleigh", &spec)?;
                Ok(MixingModel::Rayleigh)
            }
            "weibull" => {
                no_theta("weibull", &spec)?;
                let alpha = spec.alpha.ok_or_else(|| {
                    Error::InvalidParameter("weibull mixing requires alpha > 0".into())
                })?;
                MixingModel::weibull(alpha)
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown mixing kind '{other}' (expected uniform, pareto, beta, exponential, rayleigh or weibull)"
            ))),
        }
    }
}

impl From<MixingModel> for MixingSpec {
    fn from(m: MixingModel) -> Self {
        let blank = MixingSpec {
            kind: m.kind_name().to_string(),
            alpha: None,
            theta_lo: None,
            theta_hi: None,
            theta_o: None,
        };
        match m {
            MixingModel::Uniform { theta_lo, theta_hi } => MixingSpec {
                theta_lo: Some(theta_lo),
                theta_hi: Some(theta_hi),
                ..blank
            },
            MixingModel::Pareto { alpha, theta_o } => MixingSpec {
                alpha: Some(alpha),
                theta_o: Some(theta_o),
                ..blank
            },
            MixingModel::Beta { alpha } | MixingModel::Weibull { alpha } => MixingSpec {
                alpha: Some(alpha),
                ..blank
            },
            _ => blank,
        }
    }
}

impl MixingModel {
    pub fn uniform(theta_lo: f64, theta_hi: f64) -> Result<Self> {
        if !(theta_lo.is_finite() && theta_hi.is_finite() && 0.0 < theta_lo && theta_lo < theta_hi)
        {
            return Err(Error::InvalidParameter(format!(
                "uniform mixing needs 0 < theta_lo < theta_hi, got [{theta_lo}, {theta_hi}]"
            )));
        }
        Ok(MixingModel::Uniform { theta_lo, theta_hi })
    }

    pub fn pareto(alpha: f64, theta_o: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 2.0) {
            return Err(Error::InvalidParameter(format!(
                "pareto mixing needs shape alpha > 2, got {alpha}"
            )));
        }
        if !(theta_o.is_finite() && theta_o > PARETO_THETA_LO) {
            return Err(Error::InvalidParameter(format!(
                "pareto mixing needs theta_o > {PARETO_THETA_LO}, got {theta_o}"
            )));
        }
        Ok(MixingModel::Pareto { alpha, theta_o })
    }

    pub fn beta(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta mixing needs shape alpha > 0, got {alpha}"
            )));
        }
        Ok(MixingModel::Beta { alpha })
    }

    pub fn weibull(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "weibull mixing needs shape alpha > 0, got {alpha}"
            )));
        }
        Ok(MixingModel::Weibull { alpha })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MixingModel::Uniform { .. } => "uniform",
            MixingModel::Pareto { .. } => "pareto",
            MixingModel::Beta { .. } => "beta",
            MixingModel::Exponential => "exponential",
            MixingModel::Rayleigh => "rayleigh",
            MixingModel::Weibull { .. } => "weibull",
        }
    }

    /// Basis parameter fixed per family (see module docs).
    pub fn recommended_a(&self) -> f64 {
        match self {
            MixingModel::Uniform { .. } | MixingModel::Pareto { .. } => 0.0,
            MixingModel::Beta { .. } | MixingModel::Exponential => 2.0,
            MixingModel::Rayleigh => 4.0,
            MixingModel::Weibull { alpha } => 2.0 * alpha,
        }
    }

    /// Norm-growth exponent β in ∫ U_k² ≤ c (k^β ∨ 1).
    pub fn beta_exponent(&self) -> f64 {
        match self {
            MixingModel::Uniform { .. } => 0.0,
            MixingModel::Pareto { .. } => 7.0 / 3.0,
            _ => 1.0,
        }
    }

    /// Interval of valid θ (closed where finite).
    pub fn theta_domain(&self) -> (f64, f64) {
        match self {
            MixingModel::Uniform { theta_lo, theta_hi } => (*theta_lo, *theta_hi),
            MixingModel::Pareto { theta_o, .. } => (PARETO_THETA_LO, *theta_o),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Support of the observations across the whole θ-domain.
    pub fn x_support(&self) -> (f64, f64) {
        match self {
            MixingModel::Uniform { theta_hi, .. } => (0.0, *theta_hi),
            MixingModel::Pareto { .. } => (PARETO_THETA_LO, f64::INFINITY),
            MixingModel::Beta { .. } => (0.0, 1.0),
            _ => (0.0, f64::INFINITY),
        }
    }

    pub fn check_theta(&self, theta: f64) -> Result<()> {
        let (lo, hi) = self.theta_domain();
        let ok = theta.is_finite() && theta > 0.0 && theta >= lo && theta <= hi;
        if !ok {
            return Err(Error::OutOfDomain(format!(
                "theta = {theta} outside the {} domain [{lo}, {hi}]",
                self.kind_name()
            )));
        }
        Ok(())
    }

    /// True when `x` can be observed for some θ in the domain.
    pub fn contains_x(&self, x: f64) -> bool {
        let (lo, hi) = self.x_support();
        x.is_finite() && x > lo && (x < hi || hi.is_infinite()) || (x == lo && self.x_at_lower_edge())
    }

    fn x_at_lower_edge(&self) -> bool {
        // x = 0 has positive density for the families supported on [0, ∞);
        // Pareto observations can sit exactly at the lower scale bound.
        matches!(
            self,
            MixingModel::Exponential
                | MixingModel::Rayleigh
                | MixingModel::Weibull { .. }
                | MixingModel::Pareto { .. }
        )
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if !self.contains_x(x) {
            let (lo, hi) = self.x_support();
            return Err(Error::OutOfDomain(format!(
                "x = {x} outside the {} observation support ({lo}, {hi})",
                self.kind_name()
            )));
        }
        Ok(())
    }

    /// q(x|θ); zero outside the conditional support.
    pub fn conditional_density(&self, x: f64, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        if !x.is_finite() {
            return Err(Error::OutOfDomain(format!("x must be finite, got {x}")));
        }
        Ok(match self {
            MixingModel::Uniform { .. } => {
                if x > 0.0 && x < theta {
                    1.0 / theta
                } else {
                    0.0
                }
            }
            MixingModel::Pareto { alpha, .. } => {
                if x >= theta {
                    alpha * theta.powf(*alpha) / x.powf(alpha + 1.0)
                } else {
                    0.0
                }
            }
            MixingModel::Beta { alpha } => {
                if x > 0.0 && x < 1.0 {
                    (ln_gamma(theta + alpha) - ln_gamma(theta) - ln_gamma(*alpha)
                        + (alpha - 1.0) * x.ln()
                        + (theta - 1.0) * (1.0 - x).ln())
                    .exp()
                } else {
                    0.0
                }
            }
            MixingModel::Exponential => {
                if x >= 0.0 {
                    theta * (-x * theta).exp()
                } else {
                    0.0
                }
            }
            MixingModel::Rayleigh => {
                if x >= 0.0 {
                    theta * x * (-x * x * theta / 2.0).exp()
                } else {
                    0.0
                }
            }
            MixingModel::Weibull { alpha } => {
                if x > 0.0 {
                    alpha * theta * x.powf(alpha - 1.0) * (-x.powf(*alpha) * theta).exp()
                } else if x == 0.0 {
                    // Density limit at 0: finite only for alpha ≥ 1.
                    match *alpha {
                        a if a > 1.0 => 0.0,
                        a if a == 1.0 => theta,
                        _ => f64::INFINITY,
                    }
                } else {
                    0.0
                }
            }
        })
    }

    /// One draw X ~ q(·|θ) by inverse-CDF transform (the Beta family, which
    /// has no closed-form inverse CDF, draws through the standard
    /// gamma-ratio construction).
    pub fn sample_conditional<R: Rng + ?Sized>(&self, theta: f64, rng: &mut R) -> Result<f64> {
        self.check_theta(theta)?;
        // 1 − U, clamped into (0, 1): keeps logs finite and draws strictly
        // interior to the support.
        let mut open_unit = || (1.0 - rng.gen::<f64>()).min(0.999_999_999_999_999_9);
        Ok(match self {
            MixingModel::Uniform { .. } => theta * rng.gen::<f64>().max(f64::MIN_POSITIVE),
            MixingModel::Pareto { alpha, .. } => theta * open_unit().powf(-1.0 / alpha),
            MixingModel::Beta { alpha } => {
                let dist = rand_distr::Beta::new(*alpha, theta).map_err(|e| {
                    Error::InvalidParameter(format!("beta sampler rejected parameters: {e}"))
                })?;
                dist.sample(rng)
            }
            MixingModel::Exponential => -open_unit().ln() / theta,
            MixingModel::Rayleigh => (-2.0 * open_unit().ln() / theta).sqrt(),
            MixingModel::Weibull { alpha } => (-open_unit().ln() / theta).powf(1.0 / alpha),
        })
    }

    /// U_k(x) for the family's recommended basis parameter.
    pub fn u_fn(&self, k: usize, x: f64) -> Result<f64> {
        self.check_x(x)?;
        let a = self.recommended_a();
        Ok(match self {
            MixingModel::Uniform { .. } => {
                basis::cumulative_integral(k, a, x)? + x * basis::laguerre_fn(k, a, x)?
            }
            MixingModel::Pareto { alpha, .. } => {
                -x.powf(alpha + 1.0) * basis::tail_weighted_integral(k, a, *alpha, x)?
                    + x * basis::laguerre_fn(k, a, x)?
            }
            MixingModel::Beta { alpha } => {
                (alpha - 1.0) * (1.0 - x) / x * basis::laguerre_fn(k, a, x)?
                    + (1.0 - x) * basis::laguerre_fn_deriv(k, a, x)?
            }
            MixingModel::Exponential => basis::laguerre_fn_deriv(k, a, x)?,
            MixingModel::Rayleigh => basis::laguerre_fn_deriv(k, a, x)? / x,
            MixingModel::Weibull { alpha } => {
                basis::laguerre_fn_deriv(k, a, x)? / (alpha * x.powf(alpha - 1.0))
            }
        })
    }

    /// Fills `out[k] = U_k(x)` for `k < out.len()` in one pass. For the
    /// derivative-based families this costs two basis sweeps; the
    /// integral-based ones (uniform, Pareto) run one vector quadrature.
    pub fn u_fn_sweep(&self, x: f64, out: &mut [f64]) -> Result<()> {
        self.check_x(x)?;
        let a = self.recommended_a();
        let m = out.len();
        if m == 0 {
            return Ok(());
        }
        match self {
            MixingModel::Uniform { .. } => {
                let integrals = quad::integrate_vec(
                    |z, buf| basis::laguerre_fn_sweep(a, z, buf).expect("valid arguments"),
                    m,
                    0.0,
                    x,
                    U_QUAD_TOL,
                )?;
                let mut phi = vec![0.0; m];
                basis::laguerre_fn_sweep(a, x, &mut phi)?;
                for k in 0..m {
                    out[k] = integrals[k] + x * phi[k];
                }
            }
            MixingModel::Pareto { alpha, .. } => {
                let tails = quad::integrate_vec_semi_infinite(
                    |z, buf| {
                        basis::laguerre_fn_sweep(a, z, buf).expect("valid arguments");
                        let w = z.powf(-alpha - 1.0);
                        for v in buf.iter_mut() {
                            *v *= w;
                        }
                    },
                    m,
                    x,
                    U_QUAD_TOL,
                )?;
                let mut phi = vec![0.0; m];
                basis::laguerre_fn_sweep(a, x, &mut phi)?;
                let xw = x.powf(alpha + 1.0);
                for k in 0..m {
                    out[k] = -xw * tails[k] + x * phi[k];
                }
            }
            MixingModel::Beta { alpha } => {
                let mut phi = vec![0.0; m];
                basis::laguerre_fn_sweep(a, x, &mut phi)?;
                basis::laguerre_fn_deriv_sweep(a, x, out)?;
                let lead = (alpha - 1.0) * (1.0 - x) / x;
                for k in 0..m {
                    out[k] = lead * phi[k] + (1.0 - x) * out[k];
                }
            }
            MixingModel::Exponential => basis::laguerre_fn_deriv_sweep(a, x, out)?,
            MixingModel::Rayleigh => {
                basis::laguerre_fn_deriv_sweep(a, x, out)?;
                for v in out.iter_mut() {
                    *v /= x;
                }
            }
            MixingModel::Weibull { alpha } => {
                basis::laguerre_fn_deriv_sweep(a, x, out)?;
                let w = alpha * x.powf(alpha - 1.0);
                for v in out.iter_mut() {
                    *v /= w;
                }
            }
        }
        Ok(())
    }

    /// Master correctness check for the U_k derivations: evaluates both
    /// sides of ∫ q(x|θ) U_k(x) dx = θ ∫ q(x|θ) φ⁽ᵃ⁾_k(x) dx by quadrature
    /// and returns the absolute difference.
    pub fn verify_u_identity(&self, k: usize, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        let a = self.recommended_a();
        let lhs_f = |x: f64| {
            self.conditional_density(x, theta).unwrap_or(0.0)
                * self.u_fn(k, x).unwrap_or(0.0)
        };
        let rhs_f = |x: f64| {
            theta
                * self.conditional_density(x, theta).unwrap_or(0.0)
                * basis::laguerre_fn(k, a, x).unwrap_or(0.0)
        };
        let (lhs, rhs) = match self {
            MixingModel::Uniform { .. } => (
                quad::integrate(lhs_f, 0.0, theta, VERIFY_QUAD_TOL)?,
                quad::integrate(rhs_f, 0.0, theta, VERIFY_QUAD_TOL)?,
            ),
            MixingModel::Beta { .. } => (
                quad::integrate(lhs_f, 0.0, 1.0, VERIFY_QUAD_TOL)?,
                quad::integrate(rhs_f, 0.0, 1.0, VERIFY_QUAD_TOL)?,
            ),
            MixingModel::Pareto { .. } => (
                quad::integrate_semi_infinite(lhs_f, theta, VERIFY_QUAD_TOL)?,
                quad::integrate_semi_infinite(rhs_f, theta, VERIFY_QUAD_TOL)?,
            ),
            _ => (
                quad::integrate_semi_infinite(lhs_f, 0.0, VERIFY_QUAD_TOL)?,
                quad::integrate_semi_infinite(rhs_f, 0.0, VERIFY_QUAD_TOL)?,
            ),
        };
        Ok((lhs - rhs).abs())
    }

    /// ∫ U_k²(x) dx over the family's observation support.
    pub fn u_norm(&self, k: usize) -> Result<f64> {
        let sq = |x: f64| {
            let u = self.u_fn(k, x).unwrap_or(0.0);
            u * u
        };
        match self {
            MixingModel::Uniform { theta_hi, .. } => {
                quad::integrate(sq, 0.0, *theta_hi, VERIFY_QUAD_TOL)
            }
            MixingModel::Beta { .. } => quad::integrate(sq, 0.0, 1.0, VERIFY_QUAD_TOL),
            MixingModel::Pareto { .. } => {
                quad::integrate_semi_infinite(sq, PARETO_THETA_LO, VERIFY_QUAD_TOL)
            }
            _ => quad::integrate_semi_infinite(sq, 0.0, VERIFY_QUAD_TOL),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streams;
    use rand::SeedableRng;

    fn all_defaults() -> Vec<MixingModel> {
        vec![
            MixingModel::uniform(0.5, 3.0).unwrap(),
            MixingModel::pareto(3.0, 3.0).unwrap(),
            MixingModel::beta(2.0).unwrap(),
            MixingModel::Exponential,
            MixingModel::Rayleigh,
            MixingModel::weibull(2.0).unwrap(),
        ]
    }

    #[test]
    fn recommended_parameters_match_derivations() {
        let table: Vec<(MixingModel, f64, f64)> = vec![
            (MixingModel::uniform(0.5, 3.0).unwrap(), 0.0, 0.0),
            (MixingModel::pareto(3.0, 3.0).unwrap(), 0.0, 7.0 / 3.0),
            (MixingModel::beta(2.0).unwrap(), 2.0, 1.0),
            (MixingModel::Exponential, 2.0, 1.0),
            (MixingModel::Rayleigh, 4.0, 1.0),
            (MixingModel::weibull(2.0).unwrap(), 4.0, 1.0),
            (MixingModel::weibull(0.75).unwrap(), 1.5, 1.0),
        ];
        for (model, a, beta) in table {
            assert_eq!(model.recommended_a(), a, "{}", model.kind_name());
            assert_eq!(model.beta_exponent(), beta, "{}", model.kind_name());
        }
    }

    #[test]
    fn constructor_guards() {
        assert!(MixingModel::pareto(2.0, 3.0).is_err()); // alpha must exceed 2
        assert!(MixingModel::pareto(3.0, 1.0).is_err()); // theta_o must exceed 1
        assert!(MixingModel::uniform(0.0, 1.0).is_err());
        assert!(MixingModel::uniform(2.0, 1.0).is_err());
        assert!(MixingModel::beta(0.0).is_err());
        assert!(MixingModel::weibull(-1.0).is_err());
    }

    #[test]
    fn density_exponential_at_origin() {
        let m = MixingModel::Exponential;
        assert_eq!(m.conditional_density(0.0, 2.0).unwrap(), 2.0);
    }

    #[test]
    fn density_uniform_outside_support() {
        let m = MixingModel::uniform(0.5, 3.0).unwrap();
        assert_eq!(m.conditional_density(1.5, 1.0).unwrap(), 0.0);
        assert_eq!(m.conditional_density(0.5, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn density_pareto_value() {
        let m = MixingModel::pareto(3.0, 3.0).unwrap();
        // α θ^α / x^{α+1} = 3·1³/2⁴.
        assert!((m.conditional_density(2.0, 1.0).unwrap() - 0.1875).abs() < 1e-15);
        assert_eq!(m.conditional_density(0.5, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn density_rejects_theta_outside_domain() {
        let m = MixingModel::uniform(0.5, 3.0).unwrap();
        assert!(m.conditional_density(1.0, 4.0).is_err());
        let p = MixingModel::pareto(3.0, 3.0).unwrap();
        assert!(p.conditional_density(2.0, 0.5).is_err());
    }

    #[test]
    fn densities_integrate_to_one() {
        for model in all_defaults() {
            let theta = match model {
                MixingModel::Uniform { .. } => 2.0,
                MixingModel::Pareto { .. } => 1.5,
                _ => 1.0,
            };
            let f = |x: f64| model.conditional_density(x, theta).unwrap_or(0.0);
            let total = match model {
                MixingModel::Uniform { .. } => quad::integrate(f, 0.0, theta, 1e-10).unwrap(),
                MixingModel::Beta { .. } => quad::integrate(f, 0.0, 1.0, 1e-10).unwrap(),
                MixingModel::Pareto { .. } => {
                    quad::integrate_semi_infinite(f, theta, 1e-10).unwrap()
                }
                _ => quad::integrate_semi_infinite(f, 0.0, 1e-10).unwrap(),
            };
            assert!(
                (total - 1.0).abs() < 1e-8,
                "{} density integrates to {total}",
                model.kind_name()
            );
        }
    }

    #[test]
    fn sampler_uniform_support() {
        let m = MixingModel::uniform(0.5, 3.0).unwrap();
        let mut rng = streams::replication_rng(11, 1, 0);
        for _ in 0..1000 {
            let x = m.sample_conditional(2.0, &mut rng).unwrap();
            assert!(x >= 0.0 && x < 2.0);
        }
    }

    #[test]
    fn sampler_exponential_mean() {
        // E X = 1/θ = 1; 10⁶ draws stay within 4σ = 4/√N.
        let m = MixingModel::Exponential;
        let mut rng = streams::replication_rng(12, 1, 0);
        let n = 1_000_000usize;
        let mut acc = crate::kahan::CompensatedSum::new();
        for _ in 0..n {
            acc.add(m.sample_conditional(1.0, &mut rng).unwrap());
        }
        let mean = acc.value() / n as f64;
        assert!((mean - 1.0).abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn sampler_weibull_mean() {
        // E X = θ^{−1/α} Γ(1 + 1/α) = Γ(1.5) for α = 2, θ = 1.
        let m = MixingModel::weibull(2.0).unwrap();
        let mut rng = streams::replication_rng(13, 1, 0);
        let n = 1_000_000usize;
        let mut acc = crate::kahan::CompensatedSum::new();
        let mut sq = crate::kahan::CompensatedSum::new();
        for _ in 0..n {
            let x = m.sample_conditional(1.0, &mut rng).unwrap();
            acc.add(x);
            sq.add(x * x);
        }
        let mean = acc.value() / n as f64;
        let expect = (ln_gamma(1.5)).exp();
        let var = sq.value() / n as f64 - mean * mean;
        let tol = 4.0 * (var / n as f64).sqrt();
        assert!((mean - expect).abs() < tol, "mean {mean} vs {expect}");
        assert!((expect - 0.886_227).abs() < 1e-6);
    }

    #[test]
    fn sampler_pareto_support() {
        let m = MixingModel::pareto(3.0, 3.0).unwrap();
        let mut rng = streams::replication_rng(14, 1, 0);
        for _ in 0..1000 {
            let x = m.sample_conditional(1.5, &mut rng).unwrap();
            assert!(x >= 1.5 && x.is_finite());
        }
    }

    #[test]
    fn u_fn_uniform_vanishes_at_origin() {
        let m = MixingModel::uniform(0.5, 3.0).unwrap();
        let v = m.u_fn(0, 1e-9).unwrap();
        assert!(v.abs() < 1e-8, "U_0(0+) = {v}");
    }

    #[test]
    fn u_fn_exponential_zero_at_two() {
        // (φ⁽²⁾_0)′(2) = 0.
        let m = MixingModel::Exponential;
        assert!(m.u_fn(0, 2.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn u_fn_beta_vanishes_at_one() {
        let m = MixingModel::beta(2.0).unwrap();
        let v = m.u_fn(3, 1.0 - 1e-12).unwrap();
        assert!(v.abs() < 1e-9, "U_3(1−) = {v}");
    }

    #[test]
    fn u_fn_rayleigh_zero_at_four() {
        // (φ⁽⁴⁾_0)′(4) = 0.
        let m = MixingModel::Rayleigh;
        assert!(m.u_fn(0, 4.0).unwrap().abs() < 1e-14);
    }

    #[test]
    fn u_fn_sweep_matches_pointwise() {
        for model in all_defaults() {
            let x = match model {
                MixingModel::Beta { .. } => 0.62,
                MixingModel::Pareto { .. } => 2.1,
                _ => 1.37,
            };
            let mut buf = vec![0.0; 6];
            model.u_fn_sweep(x, &mut buf).unwrap();
            for (k, &v) in buf.iter().enumerate() {
                let single = model.u_fn(k, x).unwrap();
                assert!(
                    (v - single).abs() < 1e-9 * single.abs().max(1.0),
                    "{} k={k}: sweep {v} vs pointwise {single}",
                    model.kind_name()
                );
            }
        }
    }

    #[test]
    fn u_identity_spot_checks() {
        let cases = [
            (MixingModel::Exponential, 0usize, 1.0),
            (MixingModel::uniform(0.5, 3.0).unwrap(), 3, 2.0),
            (MixingModel::pareto(3.0, 3.0).unwrap(), 2, 1.5),
        ];
        for (model, k, theta) in cases {
            let r = model.verify_u_identity(k, theta).unwrap();
            assert!(r < 1e-6, "{} k={k} θ={theta}: residual {r}", model.kind_name());
        }
    }

    #[test]
    fn u_norm_exponential_k0_matches_oracle() {
        // U_0 = (φ⁽²⁾_0)′ = e^{−x/2}(1 − x/2)/√2, so ∫ U_0² has the closed
        // form ∫ e^{−x}(1 − x/2)²/2 dx = 1/4.
        let m = MixingModel::Exponential;
        let got = m.u_norm(0).unwrap();
        let f = |x: f64| ((-x / 2.0f64).exp() * (1.0 - x / 2.0)).powi(2) / 2.0;
        let mut acc = crate::kahan::CompensatedSum::new();
        let (a, b, n) = (0.0, 120.0, 1_000_000usize);
        let h = (b - a) / n as f64;
        acc.add(0.5 * (f(a) + f(b)));
        for i in 1..n {
            acc.add(f(a + i as f64 * h));
        }
        let oracle = acc.value() * h;
        assert!((got - oracle).abs() < 1e-7, "{got} vs {oracle}");
        assert!((got - 0.25).abs() < 1e-7);
    }

    #[test]
    fn serde_round_trip_and_rejection() {
        let m = MixingModel::pareto(3.0, 3.0).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        let back: MixingModel = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);
        // alpha ≤ 2 must be rejected at parse time.
        let bad = r#"{"kind": "pareto", "alpha": 2.0}"#;
        assert!(serde_json::from_str::<MixingModel>(bad).is_err());
        // Unknown fields fail closed.
        let unknown = r#"{"kind": "exponential", "rate": 1.0}"#;
        assert!(serde_json::from_str::<MixingModel>(unknown).is_err());
    }

    #[test]
    fn marginal_expectation_identity() {
        // E_p[U_k(X)] = ∫ φ⁽ᵃ⁾_k Ψ for the exponential mixing under a
        // Gamma(2, 1) prior, using the conjugate closed forms
        // p(x) = 2/(1+x)³ and Ψ(x) = 6/(1+x)⁴.
        let m = MixingModel::Exponential;
        for k in 0..=4usize {
            let lhs = quad::integrate_semi_infinite(
                |x| m.u_fn(k, x).unwrap_or(0.0) * 2.0 / (1.0 + x).powi(3),
                0.0,
                1e-9,
            )
            .unwrap();
            let rhs = quad::integrate_semi_infinite(
                |x| basis::laguerre_fn(k, 2.0, x).unwrap() * 6.0 / (1.0 + x).powi(4),
                0.0,
                1e-9,
            )
            .unwrap();
            assert!((lhs - rhs).abs() < 1e-5, "k={k}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn deterministic_given_stream() {
        let m = MixingModel::Rayleigh;
        let mut a = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        let mut b = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        for _ in 0..64 {
            assert_eq!(
                m.sample_conditional(1.7, &mut a).unwrap(),
                m.sample_conditional(1.7, &mut b).unwrap()
            );
        }
    }
}
