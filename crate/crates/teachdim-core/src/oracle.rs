//! Independent cross-checks: randomized falsification of sub-bound teaching
//! sets, a bisection route to the logistic coefficient inverse, and
//! finite-difference gradient validation.
//!
//! These deliberately avoid the implementation paths they check: the
//! bisection oracle never touches the Lambert W routine, and the gradient
//! check compares analytic subgradients against central differences of the
//! loss values alone.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::bounds::lower_bound;
use crate::error::{Error, Result};
use crate::model::{
    loss_subdifferential, loss_value, Example, LearnerSpec, LossKind, Provenance, TargetModel,
    TeachingSet, Vector,
};
use crate::rng::Rng;
use crate::verify::{verify_teaching_set, VerifyConfig};

/// Outcome of a falsification sweep over random candidate sets.
#[derive(Debug, Clone, PartialEq)]
pub struct FalsificationReport {
    pub trials: usize,
    pub size_tested: usize,
    /// Candidate sets that fully passed verification; the bounds say this
    /// must be zero, so any success is a bug in the bounds or the verifier.
    pub successes: usize,
    pub sampled_region: String,
}

/// Sample `trials` random training sets of the given size (inputs uniform in
/// a box, labels uniform over the loss's label set) and count how many teach
/// the target. The size must be strictly below the combined lower bound,
/// otherwise the sweep would be vacuous.
pub fn falsify_smaller_sets(
    spec: &LearnerSpec,
    target: &TargetModel,
    size: usize,
    trials: usize,
    box_radius: Option<f64>,
    seed: u64,
) -> Result<FalsificationReport> {
    if trials == 0 {
        return Err(Error::Domain { arg: 0.0, domain: "trials >= 1" });
    }
    let bound = lower_bound(spec, target)?;
    if size >= bound {
        return Err(Error::SizeNotBelowBound { size, bound });
    }
    let d = target.weight_dim();
    let radius = box_radius.unwrap_or(5.0 * (1.0 + target.params().effective_norm()));
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain { arg: radius, domain: "(0, inf)" });
    }

    let config = VerifyConfig {
        fail_fast: true,
        restarts: 2,
        ..VerifyConfig::default()
    };
    let classification = spec.loss.is_classification();
    let mut successes = 0;
    for trial in 0..trials {
        let mut rng = Rng::derive(seed, trial as u64);
        let mut items = Vec::with_capacity(size);
        for _ in 0..size {
            let x = Vector::new((0..d).map(|_| rng.range(-radius, radius)).collect())?;
            let y = if classification { rng.pm_one() } else { rng.range(-radius, radius) };
            items.push(Example::new(x, y)?);
        }
        let set = TeachingSet::new(items, Provenance::External, 1.0)?;
        let mut cfg = config.clone();
        cfg.solver.seed = crate::rng::splitmix64(seed ^ (trial as u64));
        if verify_teaching_set(spec, &set, target, &cfg)?.passed {
            successes += 1;
        }
    }

    let label_set = if classification { "{-1, +1}" } else { "uniform box" };
    Ok(FalsificationReport {
        trials,
        size_tested: size,
        successes,
        sampled_region: format!("x uniform in [-{radius}, {radius}]^{d}, y in {label_set}"),
    })
}

/// Location of the maximum of `t / (1 + exp(t))`, found independently of the
/// Lambert W routine as the root of the derivative numerator `1 + e^t (1 - t)`.
fn peak_by_bisection() -> f64 {
    let h = |t: f64| 1.0 + libm::exp(t) * (1.0 - t);
    let (mut lo, mut hi) = (1.0, 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Bisection solution of `t / (1 + exp(t)) = a` on the rising branch,
/// converged to a bracket width of `1e-12`. Independent oracle for
/// `lambert::tau_inverse`.
pub fn tau_inverse_bisection(a: f64) -> Result<f64> {
    let tstar = peak_by_bisection();
    let tau = |t: f64| t / (1.0 + libm::exp(t));
    let peak = tau(tstar);
    if !a.is_finite() || a <= 0.0 || a > peak + 1e-11 {
        return Err(Error::Domain { arg: a, domain: "(0, tau_max]" });
    }
    if a >= peak {
        return Ok(tstar);
    }
    let (mut lo, mut hi) = (0.0, tstar);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if tau(mid) < a {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maximum absolute disagreement between the analytic subgradient and a
/// central finite difference of the loss over `samples` random `(u, y)`
/// pairs. The hinge is checked only away from its kink (`|1 - y u| > 1e-3`),
/// where it is differentiable.
pub fn finite_difference_grad_check(loss: LossKind, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = Rng::derive(seed, 0xfd);
    let h = 1e-6;
    let mut worst = 0.0f64;
    let mut drawn = 0;
    while drawn < samples {
        let u = rng.range(-10.0, 10.0);
        let y = if loss.is_classification() { rng.pm_one() } else { rng.range(-10.0, 10.0) };
        if loss == LossKind::Hinge && libm::fabs(1.0 - y * u) <= 1e-3 {
            continue;
        }
        drawn += 1;
        let analytic = loss_subdifferential(loss, u, y)?;
        let fd = (loss_value(loss, u + h, y)? - loss_value(loss, u - h, y)?) / (2.0 * h);
        worst = worst.max(libm::fabs(analytic.lo - fd));
    }
    Ok(worst)
}
