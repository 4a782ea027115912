//! Weighted Ostrowski-type quadrature and bound auditing.
//!
//! The crate is organised bottom-up:
//!
//! * [`funcspace`] - registries of smooth test functions (with analytic first and second
//!   derivatives) and non-negative weights (with optional closed-form moments).
//! * [`oracle`] - adaptive Gauss-Kronrod reference integration and weighted seminorms. This is
//!   the independent ground truth every other module is checked against.
//! * [`kernel`] - moments `m(a,b)`, the weighted Peano kernel `P(x,t)` and its signed and
//!   absolute integrals.
//! * [`bounds`] - both sides of every one-point inequality (classical Ostrowski, L1, twice
//!   differentiable, weighted, perturbed midpoint and trapezoid) with a verdict.
//! * [`quadrature`] - the one-point weighted rule, the composite perturbed Riemann sum, its
//!   a-priori remainder bound and bound-driven adaptive integration.
//! * [`means`] - identric, logarithmic and generalised logarithmic means and the closed-form
//!   special-means instances of the weighted inequality.
//! * [`verify`] - randomized property suites, identity residuals and proof-step audits.
//!
//! Per-sample and per-subinterval work runs on rayon when the `parallel` feature is enabled
//! (the default); results are always aggregated by index, so the output is bit-identical to the
//! sequential path.

pub mod bounds;
mod error;
pub mod funcspace;
pub mod kernel;
pub mod means;
pub mod oracle;
mod par;
pub mod quadrature;
pub mod verify;

pub use bounds::{describe, evaluate_bound, BoundReport, InequalityId};
pub use error::{Error, Result};
pub use funcspace::{Domain, Registry, TestFunction, Weight};
pub use kernel::Interval;
pub use par::Execution;

use serde::{Deserialize, Serialize};

/// How the first-derivative correction coefficient of the weighted one-point rule is formed.
///
/// `Paper` uses `w(x)(b-a)(x-(a+b)/2)` as displayed; `Exact` uses the true kernel integral
/// `∫ P(x,t) dt`. The two agree when the weight is constant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrectionMode {
    #[default]
    Paper,
    Exact,
}

impl CorrectionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CorrectionMode::Paper => "paper",
            CorrectionMode::Exact => "exact",
        }
    }
}

impl std::str::FromStr for CorrectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paper" => Ok(CorrectionMode::Paper),
            "exact" => Ok(CorrectionMode::Exact),
            other => Err(Error::InvalidParameter(format!(
                "unknown correction mode `{other}` (expected paper|exact)"
            ))),
        }
    }
}

impl std::fmt::Display for CorrectionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
