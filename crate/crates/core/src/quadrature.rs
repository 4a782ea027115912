//! Weighted one-point rule, composite perturbed Riemann sum and its a-priori bound.
//!
//! On each subinterval `[x_i, x_{i+1}]` with intermediate point `ξ_i`:
//!
//! ```text
//! estimate_i = m(x_i, x_{i+1}) f(ξ_i) - C_i f'(ξ_i)
//! bound_i    = ‖f''‖_{w,1,[x_i,x_{i+1}]} / (2 m_i) · w(ξ_i) (h_i²/2 + 2δ_i²)(h_i/2 + |δ_i|)
//! ```
//!
//! with `δ_i = ξ_i - (x_i + x_{i+1})/2` and `C_i = w(ξ_i) h_i δ_i` (paper mode) or the exact
//! kernel integral on the subinterval (exact mode). The composite estimate and bound are the
//! sums of the local terms; the local seminorm is computed by the oracle on each subinterval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{TestFunction, Weight};
use crate::kernel::{kernel_integral, moment, Interval};
use crate::oracle::Oracle;
use crate::{CorrectionMode, Execution};

/// Bisection depth cap for [`adaptive_integrate`].
pub const MAX_DEPTH: u32 = 60;
/// Subinterval cap for [`adaptive_integrate`].
pub const MAX_SUBINTERVALS: usize = 100_000;

/// Strictly increasing nodes `a = x_0 < x_1 < ... < x_n = b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    nodes: Vec<f64>,
}

impl Partition {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidPartition(
                "need at least two nodes".to_string(),
            ));
        }
        if nodes.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidPartition("non-finite node".to_string()));
        }
        if let Some(w) = nodes.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition(format!(
                "nodes not strictly increasing at {} >= {}",
                w[0], w[1]
            )));
        }
        Ok(Partition { nodes })
    }

    /// `n` equal subintervals of `iv`; the last node is exactly `b`.
    pub fn uniform(iv: Interval, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPartition("n must be positive".to_string()));
        }
        let h = iv.length() / n as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| iv.a + i as f64 * h).collect();
        nodes.push(iv.b);
        Partition::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of subintervals.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn subinterval(&self, i: usize) -> Interval {
        Interval {
            a: self.nodes[i],
            b: self.nodes[i + 1],
        }
    }

    pub fn subintervals(&self) -> Vec<Interval> {
        (0..self.len()).map(|i| self.subinterval(i)).collect()
    }

    pub fn span(&self) -> Interval {
        Interval {
            a: self.nodes[0],
            b: *self.nodes.last().expect("non-empty"),
        }
    }
}

/// How intermediate points are chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XiRule {
    #[default]
    Midpoint,
    Left,
    Right,
    Random,
}

impl std::str::FromStr for XiRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "midpoint" => Ok(XiRule::Midpoint),
            "left" => Ok(XiRule::Left),
            "right" => Ok(XiRule::Right),
            "random" => Ok(XiRule::Random),
            other => Err(Error::InvalidParameter(format!(
                "unknown xi rule `{other}` (expected midpoint|left|right|random)"
            ))),
        }
    }
}

/// One intermediate point per subinterval, `ξ_i ∈ [x_i, x_{i+1}]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Xi {
    points: Vec<f64>,
}

impl Xi {
    pub fn new(points: Vec<f64>, part: &Partition) -> Result<Self> {
        if points.len() != part.len() {
            return Err(Error::InvalidPartition(format!(
                "{} intermediate points for {} subintervals",
                points.len(),
                part.len()
            )));
        }
        for (i, &p) in points.iter().enumerate() {
            if !part.subinterval(i).contains(p) {
                return Err(Error::InvalidPartition(format!(
                    "xi[{i}] = {p} outside [{}, {}]",
                    part.nodes[i],
                    part.nodes[i + 1]
                )));
            }
        }
        Ok(Xi { points })
    }

    /// Points from a rule; `seed` only matters for [`XiRule::Random`].
    pub fn from_rule(part: &Partition, rule: XiRule, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = part
            .subintervals()
            .into_iter()
            .map(|s| match rule {
                XiRule::Midpoint => s.midpoint(),
                XiRule::Left => s.a,
                XiRule::Right => s.b,
                XiRule::Random => rng.random_range(s.a..=s.b),
            })
            .collect();
        Xi { points }
    }

    pub fn midpoints(part: &Partition) -> Self {
        Xi::from_rule(part, XiRule::Midpoint, 0)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// Per-subinterval piece of a [`QuadratureResult`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalContribution {
    pub a: f64,
    pub b: f64,
    pub xi: f64,
    pub estimate: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    /// Number of subintervals.
    pub n: usize,
    pub estimate: f64,
    pub reference: Option<f64>,
    pub actual_error: Option<f64>,
    pub bound: f64,
    pub per_interval: Vec<LocalContribution>,
}

impl QuadratureResult {
    fn from_locals(per_interval: Vec<LocalContribution>) -> Self {
        let estimate = per_interval.iter().map(|c| c.estimate).sum();
        let bound = per_interval.iter().map(|c| c.bound).sum();
        QuadratureResult {
            n: per_interval.len(),
            estimate,
            reference: None,
            actual_error: None,
            bound,
            per_interval,
        }
    }

    pub fn with_reference(mut self, reference: f64) -> Self {
        self.reference = Some(reference);
        self.actual_error = Some((self.estimate - reference).abs());
        self
    }
}

fn check_setting(f: &TestFunction, w: &Weight, iv: Interval) -> Result<()> {
    for t in [iv.a, iv.b] {
        if !f.domain().contains(t) {
            return Err(Error::Domain {
                what: f.label(),
                t,
                domain: f.domain().to_string(),
            });
        }
    }
    iv.check_weight(w)
}

fn coefficient(w: &Weight, iv: Interval, x: f64, mode: CorrectionMode) -> Result<f64> {
    match mode {
        CorrectionMode::Paper => Ok(w.eval(x)? * iv.length() * (x - iv.midpoint())),
        CorrectionMode::Exact => kernel_integral(w, iv, x),
    }
}

fn local_estimate(
    f: &TestFunction,
    w: &Weight,
    iv: Interval,
    x: f64,
    mode: CorrectionMode,
) -> Result<f64> {
    iv.check_point(x)?;
    check_setting(f, w, iv)?;
    let m = moment(w, iv.a, iv.b)?;
    let c = coefficient(w, iv, x, mode)?;
    let d1 = if c == 0.0 { 0.0 } else { f.eval(1, x)? };
    Ok(m * f.eval(0, x)? - c * d1)
}

fn local_bound(f: &TestFunction, w: &Weight, iv: Interval, x: f64) -> Result<f64> {
    iv.check_point(x)?;
    check_setting(f, w, iv)?;
    let m = moment(w, iv.a, iv.b)?;
    if m.is_nan() || m <= 0.0 {
        return Err(Error::ZeroMoment { a: iv.a, b: iv.b });
    }
    let norm = Oracle::default().l1_seminorm(f, w, iv, 2)?;
    if norm == 0.0 {
        return Ok(0.0);
    }
    let h = iv.length();
    let d = x - iv.midpoint();
    Ok(norm / (2.0 * m) * w.eval(x)? * (0.5 * h * h + 2.0 * d * d) * (0.5 * h + d.abs()))
}

fn local(
    f: &TestFunction,
    w: &Weight,
    iv: Interval,
    x: f64,
    mode: CorrectionMode,
) -> Result<LocalContribution> {
    Ok(LocalContribution {
        a: iv.a,
        b: iv.b,
        xi: x,
        estimate: local_estimate(f, w, iv, x, mode)?,
        bound: local_bound(f, w, iv, x)?,
    })
}

/// `m(a,b) f(x) - C f'(x)`, an approximation of `∫_a^b f w`.
pub fn one_point_estimate(
    f: &TestFunction,
    w: &Weight,
    iv: Interval,
    x: f64,
    mode: CorrectionMode,
) -> Result<f64> {
    local_estimate(f, w, iv, x, mode)
}

/// The single-interval remainder bound at `x`.
pub fn one_point_bound(f: &TestFunction, w: &Weight, iv: Interval, x: f64) -> Result<f64> {
    local_bound(f, w, iv, x)
}

/// The composite sum `A` (estimate only).
pub fn composite_estimate(
    f: &TestFunction,
    w: &Weight,
    part: &Partition,
    xi: &Xi,
    mode: CorrectionMode,
    exec: Execution,
) -> Result<f64> {
    let xi = Xi::new(xi.points.clone(), part)?;
    let parts = part.subintervals();
    let locals = exec.try_map(&parts, |i, &s| local_estimate(f, w, s, xi.points[i], mode))?;
    Ok(locals.iter().sum())
}

/// The composite remainder bound (sum of local bounds).
pub fn composite_bound(
    f: &TestFunction,
    w: &Weight,
    part: &Partition,
    xi: &Xi,
    exec: Execution,
) -> Result<f64> {
    let xi = Xi::new(xi.points.clone(), part)?;
    let parts = part.subintervals();
    let locals = exec.try_map(&parts, |i, &s| local_bound(f, w, s, xi.points[i]))?;
    Ok(locals.iter().sum())
}

/// Estimate, bound and per-subinterval breakdown (no reference value).
pub fn composite(
    f: &TestFunction,
    w: &Weight,
    part: &Partition,
    xi: &Xi,
    mode: CorrectionMode,
    exec: Execution,
) -> Result<QuadratureResult> {
    let xi = Xi::new(xi.points.clone(), part)?;
    let parts = part.subintervals();
    let locals = exec.try_map(&parts, |i, &s| local(f, w, s, xi.points[i], mode))?;
    Ok(QuadratureResult::from_locals(locals))
}

/// `∫_a^b f w` from the oracle.
pub fn reference_value(f: &TestFunction, w: &Weight, iv: Interval) -> Result<f64> {
    check_setting(f, w, iv)?;
    Oracle::default().integrate_weighted(f, w, 0, iv.a, iv.b)
}

#[derive(Debug, Clone, Copy)]
struct Pending {
    bound: f64,
    slot: usize,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        // largest bound first, ties to the oldest slot
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.slot.cmp(&self.slot))
    }
}

/// Greedy bound-driven refinement with midpoint `ξ`.
///
/// Bisects the subinterval with the largest local bound until the summed bound is at most
/// `tol`. Fails with [`Error::ToleranceUnreachable`] (carrying the achieved bound) when the
/// worst subinterval is already at depth [`MAX_DEPTH`] or [`MAX_SUBINTERVALS`] is hit.
/// `a == b` returns an empty result with estimate and bound 0.
pub fn adaptive_integrate(
    f: &TestFunction,
    w: &Weight,
    a: f64,
    b: f64,
    tol: f64,
    mode: CorrectionMode,
) -> Result<QuadratureResult> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if a == b && a.is_finite() {
        return Ok(QuadratureResult::from_locals(Vec::new()).with_reference(0.0));
    }
    let iv = Interval::new(a, b)?;
    let mut slab = vec![(local(f, w, iv, iv.midpoint(), mode)?, 0u32)];
    let mut heap = BinaryHeap::new();
    heap.push(Pending {
        bound: slab[0].0.bound,
        slot: 0,
    });
    let total = |slab: &[(LocalContribution, u32)]| -> f64 { slab.iter().map(|s| s.0.bound).sum() };
    let mut running = slab[0].0.bound;
    loop {
        if running <= tol {
            // re-sum exactly before accepting
            running = total(&slab);
            if running <= tol {
                break;
            }
        }
        let Some(top) = heap.pop() else {
            break;
        };
        let (cur, depth) = slab[top.slot];
        if depth >= MAX_DEPTH || slab.len() >= MAX_SUBINTERVALS {
            return Err(Error::ToleranceUnreachable {
                tol,
                achieved: total(&slab),
                intervals: slab.len(),
            });
        }
        let mid = 0.5 * (cur.a + cur.b);
        let halves = [Interval { a: cur.a, b: mid }, Interval { a: mid, b: cur.b }];
        let kids =
            Execution::Sequential.try_map(&halves, |_, &s| local(f, w, s, s.midpoint(), mode))?;
        running += kids[0].bound + kids[1].bound - cur.bound;
        slab[top.slot] = (kids[0], depth + 1);
        heap.push(Pending {
            bound: kids[0].bound,
            slot: top.slot,
        });
        slab.push((kids[1], depth + 1));
        heap.push(Pending {
            bound: kids[1].bound,
            slot: slab.len() - 1,
        });
    }
    let mut locals: Vec<LocalContribution> = slab.into_iter().map(|s| s.0).collect();
    locals.sort_by(|p, q| p.a.total_cmp(&q.a));
    let reference = reference_value(f, w, iv)?;
    Ok(QuadratureResult::from_locals(locals).with_reference(reference))
}

/// Uniform partitions with midpoint `ξ` for each `n`, with oracle reference and actual error.
pub fn convergence_table(
    f: &TestFunction,
    w: &Weight,
    iv: Interval,
    ns: &[usize],
    mode: CorrectionMode,
    exec: Execution,
) -> Result<Vec<QuadratureResult>> {
    if ns.is_empty() {
        return Err(Error::InvalidParameter("ns must be non-empty".to_string()));
    }
    let reference = reference_value(f, w, iv)?;
    ns.iter()
        .map(|&n| {
            let part = Partition::uniform(iv, n)?;
            let xi = Xi::midpoints(&part);
            Ok(composite(f, w, &part, &xi, mode, exec)?.with_reference(reference))
        })
        .collect()
}

/// `log2(error_k / error_{k+1})` for consecutive rows whose `n` doubles; `None` otherwise or
/// when an error is zero.
pub fn observed_orders(rows: &[QuadratureResult]) -> Vec<Option<f64>> {
    rows.windows(2)
        .map(|p| match (p[0].actual_error, p[1].actual_error) {
            (Some(e0), Some(e1)) if p[1].n == 2 * p[0].n && e0 > 0.0 && e1 > 0.0 => {
                Some((e0 / e1).log2())
            }
            _ => None,
        })
        .collect()
}
