//! Special means and their closed-form weighted-inequality instances.
//!
//! All cases use the weight `w(t) = 1/sqrt(t)`, for which `m(a,b) = 2(sqrt(b) - sqrt(a))`.
//! The means are fixed so that the integrals appearing in the cases are
//!
//! ```text
//! (b-a) ln I(a,b)   = ∫_a^b ln t dt
//! (b-a) / L_{-1}    = ∫_a^b dt / t      = ln(b/a)
//! (b-a) L_p^p       = ∫_a^b t^p dt
//! ```
//!
//! | case | f | point |
//! |------|---|-------|
//! | C3_1 / C3_2 | `sqrt(t) ln t` | `x` / `A` |
//! | C3_3 / C3_4 | `t^(-1/2)` | `x` / `A` |
//! | C3_5 / C3_6 | `t^p sqrt(t)` | `x` / `A` |
//!
//! The seminorm factors are taken as absolute-value integrals. They coincide with the signed
//! closed forms `(b-a)/(4ab) (1 - (a ln b - b ln a)/(b-a))` when `a ≥ 1` and
//! `(p² - 1/4)/(p - 1) (b^(p-1) - a^(p-1))` when `|p| ≥ 1/2`; outside those ranges the signed
//! forms would give a negative right-hand side.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{evaluate_bound, BoundReport, InequalityId};
use crate::error::{Error, Result};
use crate::funcspace::{Registry, TestFunction};
use crate::kernel::Interval;
use crate::CorrectionMode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MeanKind {
    Arithmetic,
    Identric,
    Logarithmic,
    GeneralizedLog(f64),
}

fn check_endpoints(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || a <= 0.0 || b <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "means need positive finite endpoints, got a={a}, b={b}"
        )));
    }
    Ok(())
}

/// The mean of `a, b > 0`; `a == b` returns the common value.
pub fn special_mean(kind: MeanKind, a: f64, b: f64) -> Result<f64> {
    check_endpoints(a, b)?;
    if let MeanKind::GeneralizedLog(p) = kind {
        if !p.is_finite() || p == 0.0 || p == -1.0 {
            return Err(Error::InvalidParameter(format!(
                "generalized logarithmic mean needs p not in {{-1, 0}}, got {p}"
            )));
        }
    }
    if a == b {
        return Ok(a);
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let l = hi - lo;
    Ok(match kind {
        MeanKind::Arithmetic => 0.5 * (a + b),
        MeanKind::Identric => ((hi * hi.ln() - lo * lo.ln()) / l - 1.0).exp(),
        MeanKind::Logarithmic => l / (hi.ln() - lo.ln()),
        MeanKind::GeneralizedLog(p) => {
            ((hi.powf(p + 1.0) - lo.powf(p + 1.0)) / ((p + 1.0) * l)).powf(1.0 / p)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseId {
    C3_1,
    C3_2,
    C3_3,
    C3_4,
    C3_5,
    C3_6,
}

impl CaseId {
    pub const ALL: [CaseId; 6] = [
        CaseId::C3_1,
        CaseId::C3_2,
        CaseId::C3_3,
        CaseId::C3_4,
        CaseId::C3_5,
        CaseId::C3_6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::C3_1 => "C3_1",
            CaseId::C3_2 => "C3_2",
            CaseId::C3_3 => "C3_3",
            CaseId::C3_4 => "C3_4",
            CaseId::C3_5 => "C3_5",
            CaseId::C3_6 => "C3_6",
        }
    }

    /// Evaluated at a free point `x` (odd cases) or at `A` (even cases).
    pub fn uses_point(self) -> bool {
        matches!(self, CaseId::C3_1 | CaseId::C3_3 | CaseId::C3_5)
    }

    pub fn uses_power(self) -> bool {
        matches!(self, CaseId::C3_5 | CaseId::C3_6)
    }

    /// Registry function id of the underlying `f`.
    pub fn function_id(self) -> &'static str {
        match self {
            CaseId::C3_1 | CaseId::C3_2 => "sqrt_ln",
            CaseId::C3_3 | CaseId::C3_4 => "inv_sqrt_f",
            CaseId::C3_5 | CaseId::C3_6 => "pow_p_half",
        }
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        CaseId::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::UnknownCase(s.to_string()))
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A case with its parameters. `x` defaults to `A` and is ignored by the even cases; `p` is
/// required by C3_5/C3_6.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeansCase {
    pub id: CaseId,
    pub a: f64,
    pub b: f64,
    pub x: Option<f64>,
    pub p: Option<f64>,
}

impl MeansCase {
    pub fn new(id: CaseId, a: f64, b: f64) -> Self {
        MeansCase {
            id,
            a,
            b,
            x: None,
            p: None,
        }
    }

    pub fn at(mut self, x: f64) -> Self {
        self.x = Some(x);
        self
    }

    pub fn power(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    fn validate(&self) -> Result<(f64, Option<f64>)> {
        check_endpoints(self.a, self.b)?;
        if self.a >= self.b {
            return Err(Error::InvalidInterval {
                a: self.a,
                b: self.b,
            });
        }
        let mean = 0.5 * (self.a + self.b);
        let x = if self.id.uses_point() {
            let x = self.x.unwrap_or(mean);
            if !(self.a <= x && x <= self.b) {
                return Err(Error::PointOutside {
                    x,
                    a: self.a,
                    b: self.b,
                });
            }
            x
        } else {
            mean
        };
        let p = if self.id.uses_power() {
            let p = self
                .p
                .ok_or_else(|| Error::InvalidParameter(format!("case {} needs p", self.id)))?;
            if !p.is_finite() || p == -1.0 || p == 0.0 || p == 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "case {} needs p not in {{-1, 0, 1}}, got {p}",
                    self.id
                )));
            }
            Some(p)
        } else {
            None
        };
        Ok((x, p))
    }

    /// The `(f, x)` the case instantiates.
    pub fn function(&self) -> Result<TestFunction> {
        let (_, p) = self.validate()?;
        Registry::standard().resolve_function(self.id.function_id(), p)
    }
}

/// `¼ ∫_a^b |ln t| / t² dt`.
fn sqrt_ln_factor(a: f64, b: f64) -> f64 {
    let l = b - a;
    if a >= 1.0 {
        l / (4.0 * a * b) * (1.0 - (a * b.ln() - b * a.ln()) / l)
    } else {
        // antiderivative of ln t / t² is -(ln t + 1)/t
        let anti = |t: f64| -(t.ln() + 1.0) / t;
        let split = b.min(1.0);
        let below = anti(split) - anti(a);
        let above = if b > 1.0 { anti(b) - anti(1.0) } else { 0.0 };
        0.25 * (above - below)
    }
}

/// `|p² - ¼| (b^(p-1) - a^(p-1)) / (p - 1)`.
fn pow_factor(p: f64, a: f64, b: f64) -> f64 {
    (p * p - 0.25).abs() / (p - 1.0) * (b.powf(p - 1.0) - a.powf(p - 1.0))
}

/// Evaluates the closed-form left- and right-hand sides of a case.
pub fn case_report(case: &MeansCase) -> Result<BoundReport> {
    let (x, p) = case.validate()?;
    let (a, b) = (case.a, case.b);
    let l = b - a;
    let mean_a = special_mean(MeanKind::Arithmetic, a, b)?;
    let root_gap = b.sqrt() - a.sqrt();
    let d = x - mean_a;
    // common shape of the free-point right-hand sides
    let shape = |t: f64| (0.5 * l * l + 2.0 * d * d) * (0.5 * l + d.abs()) / t.sqrt();

    let (lhs, rhs) = match case.id {
        CaseId::C3_1 => {
            let ident = special_mean(MeanKind::Identric, a, b)?;
            let lhs = x.sqrt() * x.ln()
                - l * d * (1.0 + 0.5 * x.ln()) / (2.0 * root_gap * x)
                - l * ident.ln() / (2.0 * root_gap);
            let rhs = shape(x) * sqrt_ln_factor(a, b) / (8.0 * root_gap * root_gap);
            (lhs.abs(), rhs)
        }
        CaseId::C3_2 => {
            let ident = special_mean(MeanKind::Identric, a, b)?;
            let lhs = mean_a.sqrt() * mean_a.ln() - l * ident.ln() / (2.0 * root_gap);
            let rhs =
                l * l * l * sqrt_ln_factor(a, b) / (32.0 * root_gap * root_gap * mean_a.sqrt());
            (lhs.abs(), rhs)
        }
        CaseId::C3_3 => {
            let log_mean = special_mean(MeanKind::Logarithmic, a, b)?;
            let lhs =
                1.0 / x.sqrt() + l * d / (4.0 * root_gap * x * x) - l / log_mean / (2.0 * root_gap);
            let rhs =
                shape(x) * 0.375 * (b * b - a * a) / (a * a * b * b) / (8.0 * root_gap * root_gap);
            (lhs.abs(), rhs)
        }
        CaseId::C3_4 => {
            let log_mean = special_mean(MeanKind::Logarithmic, a, b)?;
            let lhs = 1.0 / mean_a.sqrt() - l / log_mean / (2.0 * root_gap);
            let rhs = 3.0 * l * l * l * (b * b - a * a)
                / (256.0 * root_gap * root_gap * mean_a.sqrt() * a * a * b * b);
            (lhs.abs(), rhs)
        }
        CaseId::C3_5 => {
            let p = p.expect("validated");
            let lp = special_mean(MeanKind::GeneralizedLog(p), a, b)?.powf(p);
            let lhs = x.powf(p) * x.sqrt()
                - l * d * (p + 0.5) * x.powf(p) / (2.0 * root_gap * x)
                - l * lp / (2.0 * root_gap);
            let rhs = shape(x) * pow_factor(p, a, b) / (8.0 * root_gap * root_gap);
            (lhs.abs(), rhs)
        }
        CaseId::C3_6 => {
            let p = p.expect("validated");
            let lp = special_mean(MeanKind::GeneralizedLog(p), a, b)?.powf(p);
            let lhs = mean_a.powf(p) * mean_a.sqrt() - l * lp / (2.0 * root_gap);
            let rhs =
                l * l * l * pow_factor(p, a, b) / (32.0 * root_gap * root_gap * mean_a.sqrt());
            (lhs.abs(), rhs)
        }
    };
    let label = match p {
        Some(p) => format!("{}[p={}]", case.id.function_id(), p),
        None => case.id.function_id().to_string(),
    };
    BoundReport::new(
        case.id.name(),
        lhs,
        rhs,
        label,
        "inv_sqrt".to_string(),
        Interval::new(a, b)?,
        Some(x),
        CorrectionMode::Paper,
    )
}

/// The same instance through the general evaluator (weighted inequality at `x`, or the
/// midpoint inequality for the even cases).
pub fn cross_check(case: &MeansCase) -> Result<BoundReport> {
    let (x, _) = case.validate()?;
    let f = case.function()?;
    let w = Registry::standard().weight("inv_sqrt")?;
    let ineq = if case.id.uses_point() {
        InequalityId::Weighted2_1
    } else {
        InequalityId::Midpoint2_7
    };
    evaluate_bound(
        ineq,
        &f,
        w,
        Interval::new(case.a, case.b)?,
        x,
        CorrectionMode::Paper,
    )
}
