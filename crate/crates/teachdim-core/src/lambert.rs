//! Principal-branch Lambert W and the logistic coefficient map.
//!
//! `lambert_w0` inverts `w * exp(w)` on the principal branch via Halley
//! iteration from a piecewise initial guess (a branch-point series near
//! `-1/e`, a log-based guess for large arguments). The logistic teaching
//! constructions need the maximum `tau_max` of `t / (1 + exp(t))` and the
//! inverse `tau_inverse` of that map on its rising branch, both of which
//! reduce to `lambert_w0`.

use crate::error::{Error, Result};

/// `-1/e`, the left end of the principal branch's domain.
pub const BRANCH_POINT: f64 = -0.36787944117144233;

const MAX_HALLEY_STEPS: usize = 50;
/// Convergence threshold on the defining residual `|w e^w - x|`.
const RESIDUAL_TOL: f64 = 1e-14;
/// Arguments within this distance of `-1/e` are treated as the branch point.
const BRANCH_GUARD: f64 = 1e-15;

/// Principal-branch Lambert W: the solution `w >= -1` of `w e^w = x`.
///
/// Defined for `x >= -1/e`; the residual `|w e^w - x|` is driven below
/// `1e-14 * max(1, |x|)`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain { arg: x, domain: "[-1/e, inf)" });
    }
    if x < BRANCH_POINT {
        if x >= BRANCH_POINT - BRANCH_GUARD {
            return Ok(-1.0);
        }
        return Err(Error::Domain { arg: x, domain: "[-1/e, inf)" });
    }
    if x - BRANCH_POINT <= BRANCH_GUARD {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }

    let mut w = initial_guess(x);
    let tol = RESIDUAL_TOL * libm::fabs(x).max(1.0);
    for _ in 0..MAX_HALLEY_STEPS {
        let ew = libm::exp(w);
        let f = w * ew - x;
        if libm::fabs(f) <= tol {
            break;
        }
        // Halley step: w - f / (f' - f f'' / (2 f')).
        let f1 = ew * (w + 1.0);
        let f2 = ew * (w + 2.0);
        let denom = f1 - f * f2 / (2.0 * f1);
        let mut next = if denom != 0.0 { w - f / denom } else { w - f / f1 };
        if next < -1.0 {
            // Stay on the principal branch; halve the distance to -1 instead.
            next = -1.0 + 0.5 * (w + 1.0);
        }
        if next == w {
            break;
        }
        w = next;
    }
    Ok(w)
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        // Series around the branch point in p = sqrt(2 (e x + 1)).
        let p = libm::sqrt(2.0 * (core::f64::consts::E * x + 1.0));
        -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0
    } else if x < 2.0 {
        x / (1.0 + x)
    } else {
        // w ~ ln x - ln ln x for large x.
        let l1 = libm::log(x);
        let l2 = libm::log(l1);
        l1 - l2 + l2 / l1
    }
}

/// Maximum of `t / (1 + exp(t))` over the reals, equal to `W(1/e)`.
pub fn tau_max() -> f64 {
    // 1/e is strictly inside the domain; the unwrap cannot fire.
    lambert_w0(libm::exp(-1.0)).unwrap()
}

/// Location of that maximum, `1 + tau_max`.
pub fn tau_argmax() -> f64 {
    1.0 + tau_max()
}

/// Inverse of `a = t / (1 + exp(t))` on the rising branch, expressed as
/// `a - W(-a e^a)`. Of the up to two solutions this returns the smaller one,
/// which lies in `(0, 1 + tau_max]`.
pub fn tau_inverse(a: f64) -> Result<f64> {
    let tmax = tau_max();
    if !a.is_finite() || a <= 0.0 || a > tmax + 1e-13 {
        return Err(Error::Domain { arg: a, domain: "(0, tau_max]" });
    }
    let a = a.min(tmax);
    // -a e^a reaches -1/e exactly at a = tau_max; floating point may
    // undershoot, which lambert_w0's branch guard absorbs.
    let arg = (-a * libm::exp(a)).max(BRANCH_POINT);
    Ok(a - lambert_w0(arg)?)
}

/// A solved pair `(a, t)` with `a = t / (1 + exp(t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauValue {
    pub a: f64,
    pub t: f64,
}

impl TauValue {
    pub fn new(a: f64) -> Result<Self> {
        let t = tau_inverse(a)?;
        let back = t / (1.0 + libm::exp(t));
        if libm::fabs(back - a) > 1e-10 {
            return Err(Error::Domain { arg: a, domain: "(0, tau_max]" });
        }
        Ok(TauValue { a, t })
    }
}
