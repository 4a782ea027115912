//! Property suites, identity residuals and proof-step audits.
//!
//! The integration-by-parts identity `m f(x) - ∫ f w = ∫ P(x,t) f'(t) dt` holds for every
//! weight and is the strongest always-true check here. The audited intermediate steps
//!
//! * S1: `∫ P(x,t) dt = w(x)(b-a)(x-(a+b)/2)`
//! * S2: `∫ f'(s) w(s) ds = f'(x) m(a,b)`
//! * S3: `∫ |P(x,s)| ds = ½ w(x)[(x-a)² + (x-b)²]`
//!
//! are compared against exact values and reported as discrepancies, never asserted. S1 and S3
//! are identities for constant weights; S2 is a mean-value statement and holds for constant
//! weights only at particular `x` (or for affine `f`).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{evaluate_bound, BoundReport, InequalityId};
use crate::error::{Error, Result};
use crate::funcspace::{Domain, Registry, TestFunction, Weight};
use crate::kernel::{kernel_abs_integral, kernel_integral, moment, peano_kernel, Interval};
use crate::oracle::Oracle;
use crate::{CorrectionMode, Execution};

/// Relative threshold for the identity residual, scaled by `max(1, m |f(x)|)`.
pub const IDENTITY_TOL: f64 = 1e-8;

/// `max(1, m(a,b) |f(x)|)`, the scale the identity residual is judged against.
pub fn identity_scale(f: &TestFunction, w: &Weight, iv: Interval, x: f64) -> Result<f64> {
    Ok((moment(w, iv.a, iv.b)? * f.eval(0, x)?.abs()).max(1.0))
}

/// `|m f(x) - ∫ f w - ∫ P(x,·) f'|` with both integrals from the oracle.
pub fn identity_residual(f: &TestFunction, w: &Weight, iv: Interval, x: f64) -> Result<f64> {
    iv.check_point(x)?;
    let oracle = Oracle::default();
    let m = moment(w, iv.a, iv.b)?;
    let fw = oracle.integrate_weighted(f, w, 0, iv.a, iv.b)?;
    // P(x,·) jumps at x, so integrate the two branches separately
    let kernel_term = |lo: f64, hi: f64| {
        oracle.integrate(|t| Ok(peano_kernel(w, iv, x, t)? * f.eval(1, t)?), lo, hi)
    };
    let pf = kernel_term(iv.a, x)?.value + kernel_term(x, iv.b)?.value;
    Ok((m * f.eval(0, x)? - fw - pf).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProofStep {
    #[serde(rename = "S1_kernel_integral")]
    S1KernelIntegral,
    #[serde(rename = "S2_meanvalue")]
    S2MeanValue,
    #[serde(rename = "S3_abs_kernel")]
    S3AbsKernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofStepAudit {
    pub step: ProofStep,
    /// Exact value.
    pub lhs_value: f64,
    /// Claimed closed form.
    pub rhs_value: f64,
    pub discrepancy: f64,
}

impl ProofStepAudit {
    fn new(step: ProofStep, lhs_value: f64, rhs_value: f64) -> Result<Self> {
        if !lhs_value.is_finite() || !rhs_value.is_finite() {
            return Err(Error::NonFinite(format!("audit of {step:?}")));
        }
        Ok(ProofStepAudit {
            step,
            lhs_value,
            rhs_value,
            discrepancy: (lhs_value - rhs_value).abs(),
        })
    }
}

/// Exact vs claimed values of the three intermediate steps at `x`.
pub fn audit_proof_steps(
    f: &TestFunction,
    w: &Weight,
    iv: Interval,
    x: f64,
) -> Result<Vec<ProofStepAudit>> {
    iv.check_point(x)?;
    let wx = w.eval(x)?;
    let (a, b) = (iv.a, iv.b);
    let m = moment(w, a, b)?;

    let s1 = ProofStepAudit::new(
        ProofStep::S1KernelIntegral,
        kernel_integral(w, iv, x)?,
        wx * iv.length() * (x - iv.midpoint()),
    )?;
    let s2 = ProofStepAudit::new(
        ProofStep::S2MeanValue,
        Oracle::default().integrate_weighted(f, w, 1, a, b)?,
        f.eval(1, x)? * m,
    )?;
    let s3 = ProofStepAudit::new(
        ProofStep::S3AbsKernel,
        kernel_abs_integral(w, iv, x)?,
        0.5 * wx * ((x - a).powi(2) + (x - b).powi(2)),
    )?;
    Ok(vec![s1, s2, s3])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    UnweightedDefault,
    WeightedInvsqrt,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::UnweightedDefault => "unweighted_default",
            Suite::WeightedInvsqrt => "weighted_invsqrt",
        }
    }

    pub fn inequalities(self) -> &'static [InequalityId] {
        match self {
            Suite::UnweightedDefault => &[
                InequalityId::Ostrowski1_1,
                InequalityId::L1_1_2,
                InequalityId::Twice1_3,
                InequalityId::Unweighted2_6,
                InequalityId::Midpoint2_7,
                InequalityId::Trapezoid2_8,
            ],
            Suite::WeightedInvsqrt => &[
                InequalityId::Weighted2_1,
                InequalityId::Midpoint2_7,
                InequalityId::Trapezoid2_8,
            ],
        }
    }

    fn weight_id(self) -> &'static str {
        match self {
            Suite::UnweightedDefault => "unit",
            Suite::WeightedInvsqrt => "inv_sqrt",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unweighted_default" => Ok(Suite::UnweightedDefault),
            "weighted_invsqrt" => Ok(Suite::WeightedInvsqrt),
            other => Err(Error::UnknownSuite(other.to_string())),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sampling window for functions defined on the whole line.
pub const REAL_WINDOW: (f64, f64) = (-3.0, 3.0);
/// Sampling window for functions (or weights) that need `t > 0`.
pub const POSITIVE_WINDOW: (f64, f64) = (0.5, 4.0);
/// Interval lengths are drawn uniformly from this range.
pub const LENGTH_RANGE: (f64, f64) = (0.2, 2.0);

/// One drawn `(f, [a,b], x)`.
#[derive(Debug, Clone)]
pub struct Draw {
    pub function: TestFunction,
    pub iv: Interval,
    pub x: f64,
}

fn window(f: &TestFunction, w: &Weight) -> (f64, f64) {
    if f.domain() == Domain::REAL && w.domain() == Domain::REAL {
        REAL_WINDOW
    } else {
        POSITIVE_WINDOW
    }
}

/// Draw `(f, [a,b], x)` with `f` uniform over the registry, length uniform in
/// [`LENGTH_RANGE`], `a` uniform so that `[a,b]` fits the function's window and `x` uniform in
/// `[a,b]`.
pub fn draw(rng: &mut ChaCha8Rng, w: &Weight) -> Draw {
    let fs = Registry::standard().functions();
    let function = fs[rng.random_range(0..fs.len())].clone();
    let (lo, hi) = window(&function, w);
    let len = rng.random_range(LENGTH_RANGE.0..=LENGTH_RANGE.1);
    let a = rng.random_range(lo..=hi - len);
    let b = a + len;
    let x = rng.random_range(a..=b);
    Draw {
        function,
        iv: Interval { a, b },
        x,
    }
}

/// The draws a suite uses. For `weighted_invsqrt`, sample 0 is always
/// `(sqrt_ln, [1,2], x = 1.5)`.
pub fn suite_draws(suite: Suite, samples: usize, seed: u64) -> Result<Vec<Draw>> {
    let reg = Registry::standard();
    let w = reg.weight(suite.weight_id())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(samples);
    if suite == Suite::WeightedInvsqrt && samples > 0 {
        draws.push(Draw {
            function: reg.function("sqrt_ln")?.clone(),
            iv: Interval::new(1.0, 2.0)?,
            x: 1.5,
        });
    }
    while draws.len() < samples {
        draws.push(draw(&mut rng, w));
    }
    Ok(draws)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityTally {
    pub checked: usize,
    pub held: usize,
    pub violated: usize,
    /// Report with the smallest margin.
    pub worst: Option<BoundReport>,
}

impl InequalityTally {
    fn new() -> Self {
        InequalityTally {
            checked: 0,
            held: 0,
            violated: 0,
            worst: None,
        }
    }

    fn record(&mut self, r: &BoundReport) {
        self.checked += 1;
        if r.holds {
            self.held += 1;
        } else {
            self.violated += 1;
        }
        if self.worst.as_ref().is_none_or(|w| r.margin < w.margin) {
            self.worst = Some(r.clone());
        }
    }
}

/// One `(sample, inequality)` row of the log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEntry {
    pub sample: usize,
    #[serde(flatten)]
    pub report: BoundReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub samples: usize,
    pub per_inequality: BTreeMap<InequalityId, InequalityTally>,
    pub log: Vec<SampleEntry>,
}

impl SuiteReport {
    pub fn total_violations(&self) -> usize {
        self.per_inequality.values().map(|t| t.violated).sum()
    }
}

/// Evaluate every inequality of `suite` on `samples` seeded draws.
///
/// Violations are data, not errors. Samples run through `exec` and are aggregated by index, so
/// the report is the same for every execution strategy.
pub fn run_suite(suite: Suite, samples: usize, seed: u64, exec: Execution) -> Result<SuiteReport> {
    let w = Registry::standard().weight(suite.weight_id())?;
    let draws = suite_draws(suite, samples, seed)?;
    let rows = exec.try_map(&draws, |_, d| {
        suite
            .inequalities()
            .iter()
            .map(|&id| evaluate_bound(id, &d.function, w, d.iv, d.x, CorrectionMode::Paper))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut per_inequality: BTreeMap<InequalityId, InequalityTally> = suite
        .inequalities()
        .iter()
        .map(|&id| (id, InequalityTally::new()))
        .collect();
    let mut log = Vec::with_capacity(rows.len() * suite.inequalities().len());
    for (sample, reports) in rows.into_iter().enumerate() {
        for (&id, report) in suite.inequalities().iter().zip(reports) {
            per_inequality
                .get_mut(&id)
                .expect("tally per id")
                .record(&report);
            log.push(SampleEntry { sample, report });
        }
    }
    Ok(SuiteReport {
        suite,
        seed,
        samples,
        per_inequality,
        log,
    })
}
