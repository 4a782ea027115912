//! Left- and right-hand sides of the one-point inequalities, with a verdict.
//!
//! Notation: `L = b - a`, `δ = x - (a+b)/2`, `m = m(a,b)`, `avg = (1/L) ∫ f`.
//!
//! | id | lhs | rhs |
//! |----|-----|-----|
//! | `OSTROWSKI_1_1` | `|f(x) - avg|` | `(1/4 + δ²/L²) L ‖f'‖∞` |
//! | `L1_1_2` | `|f(x) - avg|` | `(1/2 + |δ|/L) ‖f'‖₁` |
//! | `TWICE_1_3` | `|f(x) - avg - δ f'(x)|` | `(|δ| + L/2)² ‖f''‖₁ / (2L)` |
//! | `WEIGHTED_2_1` | `|f(x) - C f'(x)/m - ∫fw/m|` | `w(x)(L²/2 + 2δ²)(L/2 + |δ|) ‖f''‖_{w,1} / (2m²)` |
//! | `UNWEIGHTED_2_6` | 2.1 with `w ≡ 1` | 2.1 with `w ≡ 1` |
//! | `MIDPOINT_2_7` | 2.1 at `x = (a+b)/2` | `w(x) L³ ‖f''‖_{w,1} / (8m²)` |
//! | `TRAPEZOID_2_8` | `|(e(a) + e(b))/2|`, `e` the signed 2.1 bracket | `L³ (w(a)+w(b)) ‖f''‖_{w,1} / (4m²)` |
//!
//! `C` is `w(x) L δ` in [`CorrectionMode::Paper`] and the exact kernel integral
//! `∫ P(x,t) dt` in [`CorrectionMode::Exact`]. At the midpoint the paper-mode correction
//! vanishes; the exact one does not unless `w` is symmetric.
//!
//! The weighted seminorm is `‖f''‖_{w,1} = ∫ |f''(t)| w(t) dt`. This is the reading under which
//! the closed-form special-means instances come out exactly: e.g. for `f = t^(-1/2)`,
//! `w = t^(-1/2)` it gives `(3/8)(b²-a²)/(a²b²)`, checked in the tests below and in
//! [`crate::means`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{TestFunction, Weight};
use crate::kernel::{kernel_integral, moment, Interval};
use crate::oracle::Oracle;
use crate::CorrectionMode;

/// Relative slack used by the verdict: `holds ⇔ lhs ≤ rhs + 1e-9·max(1, rhs)`.
pub const HOLDS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InequalityId {
    #[serde(rename = "OSTROWSKI_1_1")]
    Ostrowski1_1,
    #[serde(rename = "L1_1_2")]
    L1_1_2,
    #[serde(rename = "TWICE_1_3")]
    Twice1_3,
    #[serde(rename = "WEIGHTED_2_1")]
    Weighted2_1,
    #[serde(rename = "UNWEIGHTED_2_6")]
    Unweighted2_6,
    #[serde(rename = "MIDPOINT_2_7")]
    Midpoint2_7,
    #[serde(rename = "TRAPEZOID_2_8")]
    Trapezoid2_8,
}

impl InequalityId {
    pub const ALL: [InequalityId; 7] = [
        InequalityId::Ostrowski1_1,
        InequalityId::L1_1_2,
        InequalityId::Twice1_3,
        InequalityId::Weighted2_1,
        InequalityId::Unweighted2_6,
        InequalityId::Midpoint2_7,
        InequalityId::Trapezoid2_8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InequalityId::Ostrowski1_1 => "OSTROWSKI_1_1",
            InequalityId::L1_1_2 => "L1_1_2",
            InequalityId::Twice1_3 => "TWICE_1_3",
            InequalityId::Weighted2_1 => "WEIGHTED_2_1",
            InequalityId::Unweighted2_6 => "UNWEIGHTED_2_6",
            InequalityId::Midpoint2_7 => "MIDPOINT_2_7",
            InequalityId::Trapezoid2_8 => "TRAPEZOID_2_8",
        }
    }

    /// Equation number, e.g. `"2.6"`.
    pub fn number(self) -> &'static str {
        match self {
            InequalityId::Ostrowski1_1 => "1.1",
            InequalityId::L1_1_2 => "1.2",
            InequalityId::Twice1_3 => "1.3",
            InequalityId::Weighted2_1 => "2.1",
            InequalityId::Unweighted2_6 => "2.6",
            InequalityId::Midpoint2_7 => "2.7",
            InequalityId::Trapezoid2_8 => "2.8",
        }
    }

    /// Stated for `w ≡ 1` only.
    pub fn requires_unit_weight(self) -> bool {
        matches!(
            self,
            InequalityId::Ostrowski1_1
                | InequalityId::L1_1_2
                | InequalityId::Twice1_3
                | InequalityId::Unweighted2_6
        )
    }

    /// Whether the `x` argument is used.
    pub fn uses_point(self) -> bool {
        !matches!(self, InequalityId::Midpoint2_7 | InequalityId::Trapezoid2_8)
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    /// Accepts both `"2.6"` and `"UNWEIGHTED_2_6"` (case-insensitive).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        InequalityId::ALL
            .into_iter()
            .find(|id| id.number() == t || id.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::UnknownInequality(s.to_string()))
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Human-readable statement of an inequality.
pub fn describe(ineq: InequalityId) -> String {
    let (title, body) = match ineq {
        InequalityId::Ostrowski1_1 => (
            "classical Ostrowski inequality, sup-norm of f'",
            "|f(x) - (1/(b-a)) ∫f| ≤ [1/4 + (x-(a+b)/2)²/(b-a)²] (b-a) ‖f'‖∞; the constant 1/4 is sharp",
        ),
        InequalityId::L1_1_2 => (
            "Ostrowski inequality for f' in L1",
            "|f(x) - (1/(b-a)) ∫f| ≤ [1/2 + |x-(a+b)/2|/(b-a)] ‖f'‖₁",
        ),
        InequalityId::Twice1_3 => (
            "Ostrowski inequality for twice differentiable f",
            "|f(x) - (1/(b-a)) ∫f - (x-(a+b)/2) f'(x)| ≤ (|x-(a+b)/2| + (b-a)/2)² ‖f''‖₁ / (2(b-a))",
        ),
        InequalityId::Weighted2_1 => (
            "weighted Ostrowski inequality",
            "|f(x) - w(x)(b-a)(x-(a+b)/2) f'(x)/m - ∫fw/m| ≤ w(x)((b-a)²/2 + 2(x-(a+b)/2)²)((b-a)/2 + |x-(a+b)/2|) ‖f''‖_{w,1} / (2m²)",
        ),
        InequalityId::Unweighted2_6 => (
            "weighted inequality specialised to w ≡ 1",
            "|f(x) - (x-(a+b)/2) f'(x) - (1/(b-a)) ∫f| ≤ ((b-a)²/2 + 2(x-(a+b)/2)²)((b-a)/2 + |x-(a+b)/2|) ‖f''‖₁ / (2(b-a)²)",
        ),
        InequalityId::Midpoint2_7 => (
            "perturbed midpoint inequality",
            "|f((a+b)/2) - ∫fw/m| ≤ w((a+b)/2) (b-a)³ ‖f''‖_{w,1} / (8m²)",
        ),
        InequalityId::Trapezoid2_8 => (
            "perturbed trapezoid inequality",
            "|(f(a)+f(b))/2 - ∫fw/m + (b-a)²(w(a)f'(a) - w(b)f'(b))/(4m)| ≤ (b-a)³ (w(a)+w(b)) ‖f''‖_{w,1} / (4m²)",
        ),
    };
    let weight = if ineq.requires_unit_weight() {
        "requires weight `unit`"
    } else {
        "any registered weight"
    };
    format!("{} (Eq. ({})): {}; {}", title, ineq.number(), body, weight)
}

/// Parse an id then describe it.
pub fn describe_str(id: &str) -> Result<String> {
    Ok(describe(id.parse()?))
}

/// One evaluated inequality instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`
    pub margin: f64,
    pub holds: bool,
    /// `lhs / rhs` when `rhs > 0`
    pub ratio: Option<f64>,
    pub function: String,
    pub weight: String,
    pub a: f64,
    pub b: f64,
    /// Evaluation point; `None` for the trapezoid inequality.
    pub x: Option<f64>,
    pub mode: CorrectionMode,
}

impl BoundReport {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        inequality: impl Into<String>,
        lhs: f64,
        rhs: f64,
        function: String,
        weight: String,
        iv: Interval,
        x: Option<f64>,
        mode: CorrectionMode,
    ) -> Result<Self> {
        if !lhs.is_finite() || !rhs.is_finite() {
            return Err(Error::NonFinite(format!(
                "bound sides lhs={lhs}, rhs={rhs}"
            )));
        }
        Ok(BoundReport {
            inequality: inequality.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            holds: verdict(lhs, rhs),
            ratio: (rhs > 0.0).then(|| lhs / rhs),
            function,
            weight,
            a: iv.a,
            b: iv.b,
            x,
            mode,
        })
    }

    /// The verdict tolerance `1e-9·max(1, rhs)`.
    pub fn tolerance(&self) -> f64 {
        HOLDS_TOL * self.rhs.max(1.0)
    }
}

pub fn verdict(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + HOLDS_TOL * rhs.max(1.0)
}

/// Shared quantities for one `(f, w, [a,b])`, computed once.
pub(crate) struct Setting<'a> {
    pub f: &'a TestFunction,
    pub w: &'a Weight,
    pub iv: Interval,
    pub oracle: Oracle,
}

impl<'a> Setting<'a> {
    pub fn new(f: &'a TestFunction, w: &'a Weight, iv: Interval) -> Result<Self> {
        for t in [iv.a, iv.b] {
            if !f.domain().contains(t) {
                return Err(Error::Domain {
                    what: f.label(),
                    t,
                    domain: f.domain().to_string(),
                });
            }
        }
        iv.check_weight(w)?;
        Ok(Setting {
            f,
            w,
            iv,
            oracle: Oracle::default(),
        })
    }

    pub fn moment(&self) -> Result<f64> {
        let m = moment(self.w, self.iv.a, self.iv.b)?;
        if m > 0.0 {
            Ok(m)
        } else {
            Err(Error::ZeroMoment {
                a: self.iv.a,
                b: self.iv.b,
            })
        }
    }

    pub fn weighted_integral(&self) -> Result<f64> {
        self.oracle
            .integrate_weighted(self.f, self.w, 0, self.iv.a, self.iv.b)
    }

    /// `‖f^(order)‖` in L1 with the setting's weight.
    pub fn l1(&self, order: u8) -> Result<f64> {
        self.oracle.l1_seminorm(self.f, self.w, self.iv, order)
    }

    /// Correction coefficient `C` at `x`.
    pub fn coefficient(&self, x: f64, mode: CorrectionMode) -> Result<f64> {
        match mode {
            CorrectionMode::Paper => {
                Ok(self.w.eval(x)? * self.iv.length() * (x - self.iv.midpoint()))
            }
            CorrectionMode::Exact => kernel_integral(self.w, self.iv, x),
        }
    }

    /// Signed bracket `f(x) - C f'(x)/m - ∫fw/m` of the weighted inequality.
    pub fn weighted_bracket(
        &self,
        x: f64,
        mode: CorrectionMode,
        m: f64,
        integral: f64,
    ) -> Result<f64> {
        let c = self.coefficient(x, mode)?;
        let d1 = if c == 0.0 { 0.0 } else { self.f.eval(1, x)? };
        Ok(self.f.eval(0, x)? - c * d1 / m - integral / m)
    }

    /// Right-hand side of the weighted inequality at `x`.
    pub fn weighted_rhs(&self, x: f64, m: f64, norm: f64) -> Result<f64> {
        let l = self.iv.length();
        let d = x - self.iv.midpoint();
        Ok(
            self.w.eval(x)? * (0.5 * l * l + 2.0 * d * d) * (0.5 * l + d.abs()) * norm
                / (2.0 * m * m),
        )
    }
}

/// Evaluate both sides of `ineq` for `f`, `w` on `iv` at `x`.
///
/// `x` is ignored by the midpoint and trapezoid inequalities (pass anything in `[a,b]`, e.g. the
/// midpoint). Ids stated for the unit weight reject any other weight.
pub fn evaluate_bound(
    ineq: InequalityId,
    f: &TestFunction,
    w: &Weight,
    iv: Interval,
    x: f64,
    mode: CorrectionMode,
) -> Result<BoundReport> {
    if ineq.requires_unit_weight() && !w.is_unit() {
        return Err(Error::WeightMismatch {
            ineq: ineq.name().to_string(),
            weight: w.id().to_string(),
        });
    }
    if ineq.uses_point() {
        iv.check_point(x)?;
    }
    let s = Setting::new(f, w, iv)?;
    let (a, b) = (iv.a, iv.b);
    let l = iv.length();
    let mid = iv.midpoint();
    let d = x - mid;

    let (lhs, rhs, at) = match ineq {
        InequalityId::Ostrowski1_1 | InequalityId::L1_1_2 => {
            let avg = s.weighted_integral()? / l;
            let lhs = (f.eval(0, x)? - avg).abs();
            let rhs = if ineq == InequalityId::Ostrowski1_1 {
                let sup = s.oracle.sup_norm(f, iv, 1)?;
                (0.25 + d * d / (l * l)) * l * sup
            } else {
                (0.5 + d.abs() / l) * s.l1(1)?
            };
            (lhs, rhs, Some(x))
        }
        InequalityId::Twice1_3 => {
            let avg = s.weighted_integral()? / l;
            let lhs = (f.eval(0, x)? - avg - d * f.eval(1, x)?).abs();
            let r = d.abs() + 0.5 * l;
            (lhs, r * r * s.l1(2)? / (2.0 * l), Some(x))
        }
        InequalityId::Unweighted2_6 => {
            let avg = s.weighted_integral()? / l;
            let lhs = (f.eval(0, x)? - d * f.eval(1, x)? - avg).abs();
            let rhs = (0.5 * l * l + 2.0 * d * d) * (0.5 * l + d.abs()) * s.l1(2)? / (2.0 * l * l);
            (lhs, rhs, Some(x))
        }
        InequalityId::Weighted2_1 => {
            let m = s.moment()?;
            let lhs = s
                .weighted_bracket(x, mode, m, s.weighted_integral()?)?
                .abs();
            (lhs, s.weighted_rhs(x, m, s.l1(2)?)?, Some(x))
        }
        InequalityId::Midpoint2_7 => {
            let m = s.moment()?;
            let lhs = s
                .weighted_bracket(mid, mode, m, s.weighted_integral()?)?
                .abs();
            let rhs = w.eval(mid)? * l * l * l * s.l1(2)? / (8.0 * m * m);
            (lhs, rhs, Some(mid))
        }
        InequalityId::Trapezoid2_8 => {
            let m = s.moment()?;
            let integral = s.weighted_integral()?;
            let ea = s.weighted_bracket(a, mode, m, integral)?;
            let eb = s.weighted_bracket(b, mode, m, integral)?;
            let lhs = (0.5 * (ea + eb)).abs();
            let rhs = l * l * l * (w.eval(a)? + w.eval(b)?) * s.l1(2)? / (4.0 * m * m);
            (lhs, rhs, None)
        }
    };
    BoundReport::new(
        ineq.name(),
        lhs,
        rhs,
        f.label(),
        w.id().to_string(),
        iv,
        at,
        mode,
    )
}
