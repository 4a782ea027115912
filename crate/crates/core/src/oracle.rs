//! Reference integration and weighted seminorms.
//!
//! Integrals are computed by globally adaptive bisection driven by the nested
//! Gauss(10)/Kronrod(21) pair. The raw difference `|K21 - G10|` is used as the local error
//! estimate, which is pessimistic for smooth integrands but never optimistic. Everything is
//! deterministic: the same integrand and interval always produce the same bits.
//!
//! Endpoint-singular integrands are refused. Singular weights (such as `1/sqrt(t)` near 0) have
//! to enter through their closed-form moments instead.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspace::{TestFunction, Weight};
use crate::kernel::Interval;

/// Default tolerance, relative to `max(1, |value|)`.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Uniform scan resolution for locating sign changes before integrating `|g|`.
const SIGN_SCAN: usize = 64;
/// Grid size for sup-norms.
const SUP_GRID: usize = 1025;
const MAX_DEPTH: u32 = 60;

#[rustfmt::skip]
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[rustfmt::skip]
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[rustfmt::skip]
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    resabs: f64,
    depth: u32,
}

impl Segment {
    fn splittable(&self) -> bool {
        self.depth < MAX_DEPTH && self.err > 50.0 * f64::EPSILON * self.resabs
    }
}

fn gk21<G>(g: &G, a: f64, b: f64) -> Result<Segment>
where
    G: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let check = |t: f64| -> Result<f64> {
        let v = g(t)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("integrand at t = {t}")))
        }
    };
    let fc = check(center)?;
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut resabs = kronrod.abs();
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = check(center - dx)?;
        let f2 = check(center + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        // odd Kronrod abscissae are the Gauss nodes
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        err: ((kronrod - gauss) * half).abs(),
        resabs: resabs * half.abs(),
        depth: 0,
    })
}

/// Adaptive reference integrator.
#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    /// Accept when the summed error estimate is below `tol * max(1, |value|)`.
    pub tol: f64,
    pub max_segments: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            tol: DEFAULT_TOL,
            max_segments: 4000,
        }
    }
}

impl Oracle {
    pub fn with_tol(tol: f64) -> Self {
        Oracle {
            tol,
            ..Oracle::default()
        }
    }

    /// `∫_a^b g` for a fallible integrand. `a == b` yields 0.
    pub fn integrate<G>(&self, g: G, a: f64, b: f64) -> Result<OracleResult>
    where
        G: Fn(f64) -> Result<f64>,
    {
        if !(a.is_finite() && b.is_finite()) || a > b {
            return Err(Error::InvalidInterval { a, b });
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "oracle tolerance must be positive, got {}",
                self.tol
            )));
        }
        if a == b {
            return Ok(OracleResult {
                value: 0.0,
                error_estimate: 0.0,
                evaluations: 0,
            });
        }
        for t in [a, b] {
            if !g(t)?.is_finite() {
                return Err(Error::SingularEndpoint(t));
            }
        }
        let mut evaluations = 2;
        let mut segments = vec![gk21(&g, a, b)?];
        evaluations += 21;
        loop {
            let value: f64 = segments.iter().map(|s| s.value).sum();
            let err: f64 = segments.iter().map(|s| s.err).sum();
            let target = self.tol * value.abs().max(1.0);
            if err <= target {
                return Ok(OracleResult {
                    value,
                    error_estimate: err,
                    evaluations,
                });
            }
            let worst = segments
                .iter()
                .enumerate()
                .filter(|(_, s)| s.splittable())
                .max_by(|(_, x), (_, y)| x.err.total_cmp(&y.err))
                .map(|(i, _)| i);
            let Some(i) = worst else {
                // Every remaining segment sits at the roundoff floor: nothing more to gain.
                if segments.iter().all(|s| s.depth < MAX_DEPTH) {
                    return Ok(OracleResult {
                        value,
                        error_estimate: err,
                        evaluations,
                    });
                }
                return Err(Error::OracleTolerance {
                    a,
                    b,
                    requested: target,
                    achieved: err,
                });
            };
            if segments.len() >= self.max_segments {
                return Err(Error::OracleTolerance {
                    a,
                    b,
                    requested: target,
                    achieved: err,
                });
            }
            let s = segments[i];
            let mid = 0.5 * (s.a + s.b);
            let mut left = gk21(&g, s.a, mid)?;
            let mut right = gk21(&g, mid, s.b)?;
            evaluations += 42;
            left.depth = s.depth + 1;
            right.depth = s.depth + 1;
            segments[i] = left;
            segments.insert(i + 1, right);
        }
    }

    /// `∫_a^b f^(order)(t) w(t) dt`.
    pub fn integrate_weighted(
        &self,
        f: &TestFunction,
        w: &Weight,
        order: u8,
        a: f64,
        b: f64,
    ) -> Result<f64> {
        Ok(self
            .integrate(|t| Ok(f.eval(order, t)? * w.eval(t)?), a, b)?
            .value)
    }

    /// `∫ |f^(order)| w` over `iv`, splitting at sign changes of `f^(order)` first.
    pub fn l1_seminorm(
        &self,
        f: &TestFunction,
        w: &Weight,
        iv: Interval,
        order: u8,
    ) -> Result<f64> {
        let g = |t: f64| f.eval(order, t);
        let breaks = sign_change_points(&g, iv.a, iv.b)?;
        let mut total = 0.0;
        for pair in breaks.windows(2) {
            let piece = self.integrate(|t| Ok(g(t)?.abs() * w.eval(t)?), pair[0], pair[1])?;
            total += piece.value;
        }
        Ok(total)
    }

    /// `sup |f^(order)|` over a 1025-point grid, refined at sign changes of `f^(order+1)` when
    /// that derivative is registered. Not a certified enclosure.
    pub fn sup_norm(&self, f: &TestFunction, iv: Interval, order: u8) -> Result<f64> {
        if order > 2 {
            return Err(Error::InvalidOrder(order));
        }
        let step = iv.length() / (SUP_GRID - 1) as f64;
        let mut best = 0.0f64;
        for i in 0..SUP_GRID {
            let t = if i == SUP_GRID - 1 {
                iv.b
            } else {
                iv.a + i as f64 * step
            };
            best = best.max(f.eval(order, t)?.abs());
        }
        if order < 2 {
            let d = |t: f64| f.eval(order + 1, t);
            for t in sign_change_points(&d, iv.a, iv.b)? {
                best = best.max(f.eval(order, t)?.abs());
            }
        }
        Ok(best)
    }
}

/// `[a, roots..., b]`: endpoints plus every located sign change of `g` on a uniform scan.
fn sign_change_points<G>(g: &G, a: f64, b: f64) -> Result<Vec<f64>>
where
    G: Fn(f64) -> Result<f64>,
{
    let mut pts = vec![a];
    if a == b {
        return Ok(pts);
    }
    let step = (b - a) / SIGN_SCAN as f64;
    let node = |i: usize| {
        if i == SIGN_SCAN {
            b
        } else {
            a + i as f64 * step
        }
    };
    let mut t0 = a;
    let mut g0 = g(a)?;
    for i in 1..=SIGN_SCAN {
        let t1 = node(i);
        let g1 = g(t1)?;
        if g0 == 0.0 && t0 > a {
            push_break(&mut pts, t0);
        } else if g0 * g1 < 0.0 {
            push_break(&mut pts, bisect_root(g, t0, t1, g0)?);
        }
        t0 = t1;
        g0 = g1;
    }
    push_break(&mut pts, b);
    Ok(pts)
}

fn push_break(pts: &mut Vec<f64>, t: f64) {
    if t > *pts.last().expect("non-empty") {
        pts.push(t);
    }
}

fn bisect_root<G>(g: &G, mut lo: f64, mut hi: f64, glo: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let neg_lo = glo < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `∫_a^b g` to tolerance `tol` for an infallible integrand.
pub fn reference_integral<G>(g: G, a: f64, b: f64, tol: f64) -> Result<OracleResult>
where
    G: Fn(f64) -> f64,
{
    Oracle::with_tol(tol).integrate(|t| Ok(g(t)), a, b)
}

/// Which seminorm [`weighted_seminorm`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// `∫ |f^(k)| w`
    L1,
    /// `sup |f^(k)|` (the weight is ignored)
    Sup,
}

/// `‖f^(order)‖_{w,1}` or `‖f^(order)‖_∞` on `iv` with the default oracle.
pub fn weighted_seminorm(
    f: &TestFunction,
    w: &Weight,
    iv: Interval,
    order: u8,
    kind: NormKind,
) -> Result<f64> {
    let oracle = Oracle::default();
    match kind {
        NormKind::L1 => oracle.l1_seminorm(f, w, iv, order),
        NormKind::Sup => oracle.sup_norm(f, iv, order),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::Registry;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn reference_values() {
        let r = reference_integral(f64::ln, 1.0, 2.0, 1e-12).unwrap();
        assert!((r.value - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-12);
        assert!(r.error_estimate <= 1e-12);
        let r = reference_integral(|_| 1.0, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
        // antiderivative -ln t / t - 1/t
        let exact = (-(2f64.ln()) / 2.0 - 0.5) - (-1.0);
        let r = reference_integral(|t| t.ln() / (t * t), 1.0, 2.0, 1e-12).unwrap();
        assert!((r.value - exact).abs() < 1e-12);
        assert!((r.value - 0.153_426_4).abs() < 1e-7);
    }

    #[test]
    fn deterministic() {
        let f = |t: f64| (3.0 * t).sin() * t.exp();
        let a = reference_integral(f, -1.0, 2.5, 1e-12).unwrap();
        let b = reference_integral(f, -1.0, 2.5, 1e-12).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn endpoint_singularity_rejected() {
        let r = reference_integral(|t: f64| 1.0 / t.sqrt(), 0.0, 1.0, 1e-12);
        assert!(matches!(r, Err(Error::SingularEndpoint(_))));
    }

    #[test]
    fn degenerate_and_reversed_intervals() {
        assert_eq!(
            reference_integral(|t| t, 1.0, 1.0, 1e-12).unwrap().value,
            0.0
        );
        assert!(reference_integral(|t| t, 2.0, 1.0, 1e-12).is_err());
        assert!(reference_integral(|t| t, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn seminorm_examples() {
        let reg = Registry::standard();
        let unit = reg.weight("unit").unwrap();
        let isq = reg.weight("inv_sqrt").unwrap();
        let sq = reg.function("square").unwrap();
        let v = weighted_seminorm(sq, unit, iv(0.0, 1.0), 2, NormKind::L1).unwrap();
        assert!((v - 2.0).abs() < 1e-13);

        let sl = reg.function("sqrt_ln").unwrap();
        let v = weighted_seminorm(sl, isq, iv(1.0, 2.0), 2, NormKind::L1).unwrap();
        let closed = 0.25 * (1.0 - 0.5 + 0.0 - 2f64.ln() / 2.0);
        assert!((v - closed).abs() < 1e-13, "{v} vs {closed}");
        assert!((v - 0.038_356_6).abs() < 1e-7);

        let isf = reg.function("inv_sqrt_f").unwrap();
        let v = weighted_seminorm(isf, isq, iv(1.0, 2.0), 2, NormKind::L1).unwrap();
        assert!((v - 0.281_25).abs() < 1e-13);
    }

    #[test]
    fn seminorm_handles_sign_changes() {
        let reg = Registry::standard();
        let unit = reg.weight("unit").unwrap();
        // ∫_0^{2π} |sin| = 4
        let sin = reg.function("sin").unwrap();
        let v = weighted_seminorm(
            sin,
            unit,
            iv(0.0, 2.0 * std::f64::consts::PI),
            0,
            NormKind::L1,
        )
        .unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        // ∫_{-1}^{2} |6t| = 3 + 12
        let cubic = reg.function("cubic").unwrap();
        let v = weighted_seminorm(cubic, unit, iv(-1.0, 2.0), 2, NormKind::L1).unwrap();
        assert!((v - 15.0).abs() < 1e-12);
    }

    #[test]
    fn sup_norm_finds_interior_extremum() {
        let reg = Registry::standard();
        let unit = reg.weight("unit").unwrap();
        let sin = reg.function("sin").unwrap();
        // |cos| peaks at t = π inside [3, 3.3]
        let v = weighted_seminorm(sin, unit, iv(3.0, 3.3), 1, NormKind::Sup).unwrap();
        assert_eq!(v, 1.0);
        let sq = reg.function("square").unwrap();
        let v = weighted_seminorm(sq, unit, iv(-2.0, 1.0), 1, NormKind::Sup).unwrap();
        assert_eq!(v, 4.0);
    }

    #[test]
    fn gauss_weight_goes_through_oracle() {
        let reg = Registry::standard();
        let g = reg.weight("gauss").unwrap();
        let one = reg.function("constant").unwrap();
        // ∫_{-3}^{3} e^{-t^2} = sqrt(pi) * erf(3)
        let v = Oracle::default()
            .integrate_weighted(one, g, 0, -3.0, 3.0)
            .unwrap();
        let erf3 = 0.999_977_909_503_001_4;
        assert!((v - std::f64::consts::PI.sqrt() * erf3).abs() < 1e-12);
    }
}
