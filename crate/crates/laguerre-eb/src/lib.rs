//! Empirical Bayes estimation of the posterior-mean rule by truncated
//! generalized Laguerre series.
//!
//! The Bayes rule t(y) = Ψ(y)/p(y) for mixed observations on the positive
//! half-line is approximated by a series in the orthonormal system
//! φ⁽ᵃ⁾_k(x) = [k!/Γ(k+a+1)]^{1/2} e^{−x/2} x^{a/2} L⁽ᵃ⁾_k(x) whose
//! coefficients are fitted from i.i.d. draws of the marginal through a
//! ridge-stabilized moment system. The crate bundles:
//!
//! - [`basis`] — the Laguerre function system and its integral transforms;
//! - [`mixing`] — six mixing families with their U_k representations;
//! - [`prior`] — simulation priors;
//! - [`estimator`] — moment construction, the regularized solve, and the
//!   truncation/ridge schedules;
//! - [`oracle`] — the quadrature Bayes rule used as ground truth;
//! - [`harness`] — the Monte Carlo risk study runner and report formats.

pub mod basis;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod kahan;
mod linalg;
pub mod mixing;
pub mod oracle;
pub mod prior;
pub mod quad;
pub mod special;
pub mod streams;

pub use basis::BasisSpec;
pub use error::{Error, Result};
pub use estimator::{EstimatorConfig, FittedEstimator, MomentMatrices};
pub use harness::{ExperimentReport, ReportFormat, StudyConfig};
pub use mixing::MixingModel;
pub use oracle::BayesOracle;
pub use prior::{PriorKind, PriorModel};
