//! Moments, the weighted Peano kernel and its integrals.
//!
//! For `x` in `[a, b]` the kernel is
//!
//! ```text
//! P(x, t) =  ∫_a^t w        t in [a, x]
//! P(x, t) = -∫_t^b w        t in (x, b]
//! ```
//!
//! and integration by parts gives `m(a,b) f(x) - ∫ f w = ∫ P(x,t) f'(t) dt` for every weight.
//! Swapping the order of integration, the two halves of `∫ P(x,t) dt` are
//!
//! ```text
//! left(x)  = ∫_a^x w(u) (x - u) du = G(x) - G(a) - M(a)(x - a)
//! right(x) = ∫_x^b w(u) (u - x) du = M(b)(b - x) - G(b) + G(x)
//! ```
//!
//! with `M' = w`, `G' = M`. The signed integral is `left - right`, the absolute one
//! `left + right`. Weights without closed forms use the oracle on the first-moment integrands.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspace::Weight;
use crate::oracle::Oracle;

/// A closed interval `[a, b]` with finite `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Interval { a, b })
        } else {
            Err(Error::InvalidInterval { a, b })
        }
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    pub(crate) fn check_point(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::PointOutside {
                x,
                a: self.a,
                b: self.b,
            })
        }
    }

    pub(crate) fn check_weight(&self, w: &Weight) -> Result<()> {
        for t in [self.a, self.b] {
            if !w.domain().contains(t) {
                return Err(Error::Domain {
                    what: format!("weight {}", w.id()),
                    t,
                    domain: w.domain().to_string(),
                });
            }
        }
        Ok(())
    }
}

fn check_range(w: &Weight, a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidInterval { a, b });
    }
    for t in [a, b] {
        if !w.domain().contains(t) {
            return Err(Error::Domain {
                what: format!("weight {}", w.id()),
                t,
                domain: w.domain().to_string(),
            });
        }
    }
    Ok(())
}

/// `m(a, b) = ∫_a^b w`. Accepts `a == b` (returns 0).
pub fn moment(w: &Weight, a: f64, b: f64) -> Result<f64> {
    check_range(w, a, b)?;
    if a == b {
        return Ok(0.0);
    }
    let m = match (w.moment_antiderivative(b), w.moment_antiderivative(a)) {
        (Some(mb), Some(ma)) => mb - ma,
        _ => Oracle::default().integrate(|t| w.eval(t), a, b)?.value,
    };
    if m.is_finite() {
        Ok(m)
    } else {
        Err(Error::NonFinite(format!(
            "moment of {} on [{a}, {b}]",
            w.id()
        )))
    }
}

/// `P(x, t)`; the point `t = x` belongs to the left branch.
pub fn peano_kernel(w: &Weight, iv: Interval, x: f64, t: f64) -> Result<f64> {
    iv.check_point(x)?;
    iv.check_point(t)?;
    if t <= x {
        moment(w, iv.a, t)
    } else {
        Ok(-moment(w, t, iv.b)?)
    }
}

/// `(left(x), right(x))`, both non-negative.
fn kernel_halves(w: &Weight, iv: Interval, x: f64) -> Result<(f64, f64)> {
    iv.check_point(x)?;
    iv.check_weight(w)?;
    let (a, b) = (iv.a, iv.b);
    let closed = (|| {
        let ma = w.moment_antiderivative(a)?;
        let mb = w.moment_antiderivative(b)?;
        let ga = w.moment_second_antiderivative(a)?;
        let gb = w.moment_second_antiderivative(b)?;
        let gx = w.moment_second_antiderivative(x)?;
        Some((gx - ga - ma * (x - a), mb * (b - x) - gb + gx))
    })();
    let (left, right) = match closed {
        Some(v) => v,
        None => {
            let oracle = Oracle::default();
            let left = oracle.integrate(|u| Ok(w.eval(u)? * (x - u)), a, x)?.value;
            let right = oracle.integrate(|u| Ok(w.eval(u)? * (u - x)), x, b)?.value;
            (left, right)
        }
    };
    // both halves are integrals of non-negative functions; clip cancellation noise
    Ok((left.max(0.0), right.max(0.0)))
}

/// The exact `∫_a^b P(x,t) dt`, used as the correction coefficient in exact mode.
pub fn kernel_integral(w: &Weight, iv: Interval, x: f64) -> Result<f64> {
    let (l, r) = kernel_halves(w, iv, x)?;
    Ok(l - r)
}

/// `∫_a^b |P(x,t)| dt`.
pub fn kernel_abs_integral(w: &Weight, iv: Interval, x: f64) -> Result<f64> {
    let (l, r) = kernel_halves(w, iv, x)?;
    Ok(l + r)
}
