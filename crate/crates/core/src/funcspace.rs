//! Registries of test functions and weight functions.
//!
//! Every registered function carries closed forms for `f`, `f'` and `f''` and an open domain of
//! validity; evaluating outside the domain is an [`Error::Domain`], never a NaN. Weights carry
//! their evaluator and, when available, closed forms for the moment antiderivative `M` (`M' = w`)
//! and its own antiderivative `G` (`G'' = w`). The kernel module uses `M`/`G` for exact moments
//! and kernel integrals; weights without them fall back to the oracle.
//!
//! Function ids are stable strings shared with the CLI.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Open interval `(lo, hi)` of validity; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub const REAL: Domain = Domain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    pub const POSITIVE: Domain = Domain {
        lo: 0.0,
        hi: f64::INFINITY,
    };

    pub fn contains(&self, t: f64) -> bool {
        t.is_finite() && self.lo < t && t < self.hi
    }

    /// `[a, b]` lies inside the (open) domain.
    pub fn contains_closed(&self, a: f64, b: f64) -> bool {
        self.contains(a) && self.contains(b)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: f64| {
            if v == f64::INFINITY {
                "inf".to_string()
            } else if v == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                format!("{v}")
            }
        };
        write!(f, "({}, {})", show(self.lo), show(self.hi))
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum FnKind {
    Constant,
    Identity,
    Square,
    Cubic,
    Quartic,
    Sextic,
    Exp,
    Sin,
    SqrtLn,
    InvSqrt,
    PowPHalf(f64),
    Custom {
        f0: RealFn,
        f1: Option<RealFn>,
        f2: Option<RealFn>,
    },
}

/// A smooth real function with evaluators for orders 0, 1 and 2.
#[derive(Clone)]
pub struct TestFunction {
    id: String,
    description: String,
    domain: Domain,
    kind: FnKind,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("id", &self.label())
            .field("domain", &self.domain)
            .finish()
    }
}

/// Central-difference step `cbrt(eps) * max(1, |t|)`, shrunk to stay inside the domain.
fn fd_step(domain: &Domain, t: f64, base: f64) -> f64 {
    let mut h = base * t.abs().max(1.0);
    let room = (t - domain.lo).min(domain.hi - t);
    if room.is_finite() && h >= room {
        h = 0.5 * room;
    }
    h
}

fn central_diff(g: &dyn Fn(f64) -> f64, domain: &Domain, t: f64) -> f64 {
    let h = fd_step(domain, t, f64::EPSILON.cbrt());
    (g(t + h) - g(t - h)) / (2.0 * h)
}

fn second_diff(g: &dyn Fn(f64) -> f64, domain: &Domain, t: f64) -> f64 {
    let h = fd_step(domain, t, f64::EPSILON.powf(0.25));
    (g(t + h) - 2.0 * g(t) + g(t - h)) / (h * h)
}

impl TestFunction {
    fn builtin(id: &str, description: &str, domain: Domain, kind: FnKind) -> Self {
        TestFunction {
            id: id.to_string(),
            description: description.to_string(),
            domain,
            kind,
        }
    }

    /// `f(t) = t^p * sqrt(t) = t^(p + 1/2)` on `(0, inf)`; `p` must avoid `-1` and `0`.
    pub fn pow_p_half(p: f64) -> Result<Self> {
        if !p.is_finite() || p == -1.0 || p == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "pow_p_half requires finite p not in {{-1, 0}}, got {p}"
            )));
        }
        Ok(Self::builtin(
            "pow_p_half",
            "t^p * sqrt(t)",
            Domain::POSITIVE,
            FnKind::PowPHalf(p),
        ))
    }

    /// A user-supplied function. Missing derivatives are approximated by central differences
    /// with step `cbrt(eps) * max(1, |t|)` (second differences use `eps^(1/4)` when only `f` is
    /// known).
    pub fn custom<F0>(
        id: impl Into<String>,
        domain: Domain,
        f0: F0,
        f1: Option<RealFn>,
        f2: Option<RealFn>,
    ) -> Self
    where
        F0: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        TestFunction {
            id: id.into(),
            description: "user supplied".to_string(),
            domain,
            kind: FnKind::Custom {
                f0: Arc::new(f0),
                f1,
                f2,
            },
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Id plus parameters, used in reports (`pow_p_half[p=2]`).
    pub fn label(&self) -> String {
        match self.kind {
            FnKind::PowPHalf(p) => format!("{}[p={}]", self.id, p),
            _ => self.id.clone(),
        }
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// The `p` of `pow_p_half`, if this is one.
    pub fn power(&self) -> Option<f64> {
        match self.kind {
            FnKind::PowPHalf(p) => Some(p),
            _ => None,
        }
    }

    /// `f''` vanishes identically.
    pub fn is_affine(&self) -> bool {
        matches!(self.kind, FnKind::Constant | FnKind::Identity)
    }

    /// `f(t)`, `f'(t)` or `f''(t)` for `order` 0, 1, 2.
    pub fn eval(&self, order: u8, t: f64) -> Result<f64> {
        if order > 2 {
            return Err(Error::InvalidOrder(order));
        }
        if !self.domain.contains(t) {
            return Err(Error::Domain {
                what: self.label(),
                t,
                domain: self.domain.to_string(),
            });
        }
        let v = self.raw(order, t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!(
                "{} order {order} at t = {t}",
                self.label()
            )))
        }
    }

    fn raw(&self, order: u8, t: f64) -> f64 {
        use FnKind::*;
        match (&self.kind, order) {
            (Constant, 0) => 1.0,
            (Constant, _) => 0.0,
            (Identity, 0) => t,
            (Identity, 1) => 1.0,
            (Identity, _) => 0.0,
            (Square, 0) => t * t,
            (Square, 1) => 2.0 * t,
            (Square, _) => 2.0,
            (Cubic, 0) => t * t * t,
            (Cubic, 1) => 3.0 * t * t,
            (Cubic, _) => 6.0 * t,
            (Quartic, 0) => t.powi(4),
            (Quartic, 1) => 4.0 * t.powi(3),
            (Quartic, _) => 12.0 * t * t,
            (Sextic, 0) => t.powi(6),
            (Sextic, 1) => 6.0 * t.powi(5),
            (Sextic, _) => 30.0 * t.powi(4),
            (Exp, _) => t.exp(),
            (Sin, 0) => t.sin(),
            (Sin, 1) => t.cos(),
            (Sin, _) => -t.sin(),
            (SqrtLn, 0) => t.sqrt() * t.ln(),
            (SqrtLn, 1) => (0.5 * t.ln() + 1.0) / t.sqrt(),
            (SqrtLn, _) => -0.25 * t.ln() / (t * t.sqrt()),
            (InvSqrt, 0) => 1.0 / t.sqrt(),
            (InvSqrt, 1) => -0.5 / (t * t.sqrt()),
            (InvSqrt, _) => 0.75 / (t * t * t.sqrt()),
            (PowPHalf(p), 0) => t.powf(p + 0.5),
            (PowPHalf(p), 1) => (p + 0.5) * t.powf(p - 0.5),
            (PowPHalf(p), _) => (p + 0.5) * (p - 0.5) * t.powf(p - 1.5),
            (Custom { f0, .. }, 0) => f0(t),
            (Custom { f0, f1, .. }, 1) => match f1 {
                Some(g) => g(t),
                None => central_diff(&|s| f0(s), &self.domain, t),
            },
            (Custom { f0, f1, f2 }, _) => match (f2, f1) {
                (Some(g), _) => g(t),
                (None, Some(g)) => central_diff(&|s| g(s), &self.domain, t),
                (None, None) => second_diff(&|s| f0(s), &self.domain, t),
            },
        }
    }
}

#[derive(Clone)]
enum WeightKind {
    Unit,
    InvSqrt,
    Gauss,
    Custom(RealFn),
}

/// A non-negative density on an open domain.
#[derive(Clone)]
pub struct Weight {
    id: String,
    description: String,
    domain: Domain,
    kind: WeightKind,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Weight")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .finish()
    }
}

impl Weight {
    fn builtin(id: &str, description: &str, domain: Domain, kind: WeightKind) -> Self {
        Weight {
            id: id.to_string(),
            description: description.to_string(),
            domain,
            kind,
        }
    }

    /// A user-supplied weight without closed-form moments. Negative values are reported as
    /// errors at evaluation time.
    pub fn custom<W>(id: impl Into<String>, domain: Domain, w: W) -> Self
    where
        W: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Weight {
            id: id.into(),
            description: "user supplied".to_string(),
            domain,
            kind: WeightKind::Custom(Arc::new(w)),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.kind, WeightKind::Unit)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !self.domain.contains(t) {
            return Err(Error::Domain {
                what: format!("weight {}", self.id),
                t,
                domain: self.domain.to_string(),
            });
        }
        let v = match &self.kind {
            WeightKind::Unit => 1.0,
            WeightKind::InvSqrt => 1.0 / t.sqrt(),
            WeightKind::Gauss => (-t * t).exp(),
            WeightKind::Custom(w) => w(t),
        };
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("weight {} at t = {t}", self.id)));
        }
        if v < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "weight {} is negative ({v}) at t = {t}",
                self.id
            )));
        }
        Ok(v)
    }

    pub fn has_closed_form_moments(&self) -> bool {
        matches!(self.kind, WeightKind::Unit | WeightKind::InvSqrt)
    }

    /// Closed-form `M` with `M' = w`, when registered.
    pub fn moment_antiderivative(&self, t: f64) -> Option<f64> {
        match self.kind {
            WeightKind::Unit => Some(t),
            WeightKind::InvSqrt => Some(2.0 * t.sqrt()),
            _ => None,
        }
    }

    /// Closed-form `G` with `G' = M`, when registered.
    pub fn moment_second_antiderivative(&self, t: f64) -> Option<f64> {
        match self.kind {
            WeightKind::Unit => Some(0.5 * t * t),
            WeightKind::InvSqrt => Some(4.0 / 3.0 * t * t.sqrt()),
            _ => None,
        }
    }
}

/// Immutable registry of the built-in functions and weights.
#[derive(Debug)]
pub struct Registry {
    functions: Vec<TestFunction>,
    weights: Vec<Weight>,
}

/// Default `p` used when `pow_p_half` is looked up without a parameter.
pub const DEFAULT_POW_P: f64 = 2.0;

/// Id listing returned by [`Registry::list`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub id: String,
    pub domain: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistryListing {
    pub functions: Vec<RegistryEntry>,
    pub weights: Vec<RegistryEntry>,
}

impl Registry {
    fn build() -> Self {
        use FnKind::*;
        let r = Domain::REAL;
        let pos = Domain::POSITIVE;
        let functions = vec![
            TestFunction::builtin("constant", "1", r, Constant),
            TestFunction::builtin("identity", "t", r, Identity),
            TestFunction::builtin("square", "t^2", r, Square),
            TestFunction::builtin("cubic", "t^3", r, Cubic),
            TestFunction::builtin("quartic", "t^4", r, Quartic),
            TestFunction::builtin("sextic", "t^6", r, Sextic),
            TestFunction::builtin("exp", "exp(t)", r, Exp),
            TestFunction::builtin("sin", "sin(t)", r, Sin),
            TestFunction::builtin("sqrt_ln", "sqrt(t) * ln(t)", pos, SqrtLn),
            TestFunction::builtin("inv_sqrt_f", "t^(-1/2)", pos, InvSqrt),
            TestFunction::builtin("pow_p_half", "t^p * sqrt(t)", pos, PowPHalf(DEFAULT_POW_P)),
        ];
        let weights = vec![
            Weight::builtin("unit", "1", r, WeightKind::Unit),
            Weight::builtin("inv_sqrt", "1/sqrt(t)", pos, WeightKind::InvSqrt),
            Weight::builtin(
                "gauss",
                "exp(-t^2), no closed-form moments",
                r,
                WeightKind::Gauss,
            ),
        ];
        Registry { functions, weights }
    }

    /// The process-wide registry.
    pub fn standard() -> &'static Registry {
        static REGISTRY: OnceLock<Registry> = OnceLock::new();
        REGISTRY.get_or_init(Registry::build)
    }

    pub fn functions(&self) -> &[TestFunction] {
        &self.functions
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn function(&self, id: &str) -> Result<&TestFunction> {
        self.functions
            .iter()
            .find(|f| f.id == id)
            .ok_or_else(|| Error::UnknownFunction(id.to_string()))
    }

    /// Look up a function, applying `p` to `pow_p_half` (and rejecting it for anything else).
    pub fn resolve_function(&self, id: &str, p: Option<f64>) -> Result<TestFunction> {
        let f = self.function(id)?;
        match (p, f.power()) {
            (None, _) => Ok(f.clone()),
            (Some(p), Some(_)) => TestFunction::pow_p_half(p),
            (Some(_), None) => Err(Error::InvalidParameter(format!(
                "function `{id}` takes no parameter p"
            ))),
        }
    }

    pub fn weight(&self, id: &str) -> Result<&Weight> {
        self.weights
            .iter()
            .find(|w| w.id == id)
            .ok_or_else(|| Error::UnknownWeight(id.to_string()))
    }

    pub fn unit_weight(&self) -> &Weight {
        &self.weights[0]
    }

    pub fn list(&self) -> RegistryListing {
        RegistryListing {
            functions: self
                .functions
                .iter()
                .map(|f| RegistryEntry {
                    id: f.id.clone(),
                    domain: f.domain.to_string(),
                    description: f.description.clone(),
                })
                .collect(),
            weights: self
                .weights
                .iter()
                .map(|w| RegistryEntry {
                    id: w.id.clone(),
                    domain: w.domain.to_string(),
                    description: w.description.clone(),
                })
                .collect(),
        }
    }
}

/// Free-function form of [`Registry::list`] on the standard registry.
pub fn list_registry() -> RegistryListing {
    Registry::standard().list()
}

/// Free-function form of [`TestFunction::eval`] that resolves the id first.
pub fn eval(id: &str, order: u8, t: f64) -> Result<f64> {
    Registry::standard().function(id)?.eval(order, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> &'static Registry {
        Registry::standard()
    }

    #[test]
    fn spot_values() {
        assert_eq!(eval("sqrt_ln", 0, 1.0).unwrap(), 0.0);
        assert_eq!(eval("square", 2, 0.3).unwrap(), 2.0);
        let f = TestFunction::pow_p_half(2.0).unwrap();
        assert_eq!(f.eval(1, 1.0).unwrap(), 2.5);
    }

    #[test]
    fn listing_contains_required_ids() {
        let l = list_registry();
        let fids: Vec<_> = l.functions.iter().map(|e| e.id.as_str()).collect();
        let wids: Vec<_> = l.weights.iter().map(|e| e.id.as_str()).collect();
        for id in [
            "square",
            "cubic",
            "exp",
            "sin",
            "sqrt_ln",
            "inv_sqrt_f",
            "pow_p_half",
        ] {
            assert!(fids.contains(&id), "{id}");
        }
        assert!(wids.contains(&"unit"));
        assert!(wids.contains(&"inv_sqrt"));
    }

    #[test]
    fn domain_violations_are_errors() {
        assert!(matches!(eval("sqrt_ln", 0, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(
            eval("inv_sqrt_f", 2, -1.0),
            Err(Error::Domain { .. })
        ));
        assert!(reg().weight("inv_sqrt").unwrap().eval(0.0).is_err());
        assert!(matches!(
            eval("nope", 0, 1.0),
            Err(Error::UnknownFunction(_))
        ));
        assert!(matches!(
            eval("square", 3, 1.0),
            Err(Error::InvalidOrder(3))
        ));
    }

    #[test]
    fn pow_p_half_rejects_excluded_powers() {
        assert!(TestFunction::pow_p_half(0.0).is_err());
        assert!(TestFunction::pow_p_half(-1.0).is_err());
        assert!(TestFunction::pow_p_half(1.0).is_ok());
        let f = reg().resolve_function("pow_p_half", Some(3.0)).unwrap();
        assert_eq!(f.label(), "pow_p_half[p=3]");
        assert!(reg().resolve_function("square", Some(3.0)).is_err());
    }

    #[test]
    fn lookups_are_stable() {
        let a = reg().function("exp").unwrap() as *const _;
        let b = reg().function("exp").unwrap() as *const _;
        assert_eq!(a, b);
    }

    #[test]
    fn closed_form_moments_differentiate_to_weight() {
        for w in reg()
            .weights()
            .iter()
            .filter(|w| w.has_closed_form_moments())
        {
            for &t in &[0.7, 1.3, 2.9] {
                let h = 1e-5;
                let dm = (w.moment_antiderivative(t + h).unwrap()
                    - w.moment_antiderivative(t - h).unwrap())
                    / (2.0 * h);
                let dg = (w.moment_second_antiderivative(t + h).unwrap()
                    - w.moment_second_antiderivative(t - h).unwrap())
                    / (2.0 * h);
                assert!((dm - w.eval(t).unwrap()).abs() < 1e-8);
                assert!((dg - w.moment_antiderivative(t).unwrap()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn custom_function_uses_finite_differences() {
        let f = TestFunction::custom("cosh", Domain::REAL, f64::cosh, None, None);
        let t = 0.8;
        assert!((f.eval(1, t).unwrap() - t.sinh()).abs() < 1e-9);
        assert!((f.eval(2, t).unwrap() - t.cosh()).abs() < 1e-6);
        let g = TestFunction::custom(
            "cosh1",
            Domain::REAL,
            f64::cosh,
            Some(Arc::new(f64::sinh)),
            None,
        );
        assert!((g.eval(2, t).unwrap() - t.cosh()).abs() < 1e-9);
    }

    #[test]
    fn custom_weight_rejects_negative_values() {
        let w = Weight::custom("neg", Domain::REAL, |t| t);
        assert!(w.eval(-1.0).is_err());
        assert_eq!(w.eval(2.0).unwrap(), 2.0);
        assert!(!w.has_closed_form_moments());
    }
}
