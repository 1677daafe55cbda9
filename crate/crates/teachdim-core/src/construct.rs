//! Minimal teaching-set constructions.
//!
//! Each constructor emits a training set on which the learner's unique
//! minimizer is the requested target. The constructions assume the identity
//! regularizer; `teach` rejects anything else. Free choices left open by the
//! theory (the nonzero scale `a` of the ridge constructions, the component
//! of `x_+` orthogonal to `w*` for the inhomogeneous margin learners) are
//! surfaced in [`ConstructionOptions`] and default to the symmetric /
//! minimal-norm resolutions.

use alloc::vec;
use alloc::vec::Vec;

use crate::bounds::{margin_count, nudged_ceil};
use crate::error::{Error, Result};
use crate::lambert::{tau_inverse, tau_max};
use crate::model::{
    validate_pair, Example, LearnerSpec, LossKind, Provenance, TargetModel, TeachingGoal,
    TeachingSet, Vector,
};

/// Free parameters of the constructions.
#[derive(Debug, Clone)]
pub struct ConstructionOptions {
    /// The nonzero scale of the ridge constructions (default 1).
    pub scale_a: f64,
    /// Component orthogonal to `w*` added to `x_+` in the inhomogeneous
    /// margin constructions (default zero, the minimal-norm choice).
    pub orthogonal_offset: Option<Vector>,
    /// The positive scaling applied to a decision-boundary target before
    /// construction; defaults to [`boundary_scale`], the largest scaling
    /// realizing the boundary-row teaching dimension.
    pub boundary_scale: Option<f64>,
}

impl Default for ConstructionOptions {
    fn default() -> Self {
        ConstructionOptions { scale_a: 1.0, orthogonal_offset: None, boundary_scale: None }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidLambda(lambda));
    }
    Ok(())
}

fn check_scale(a: f64) -> Result<()> {
    if !a.is_finite() || a == 0.0 {
        return Err(Error::InvalidScale);
    }
    Ok(())
}

/// Resolve the orthogonal offset option against `w`; zero when absent.
fn resolve_offset(opts: &ConstructionOptions, w: &Vector) -> Result<Vector> {
    match &opts.orthogonal_offset {
        None => Vector::zeros(w.dim()),
        Some(o) => {
            if o.dim() != w.dim() {
                return Err(Error::DimensionMismatch { expected: w.dim(), got: o.dim() });
            }
            if libm::fabs(o.dot(w)?) > 1e-10 * o.norm() * w.norm() {
                return Err(Error::OffsetNotOrthogonal);
            }
            Ok(o.clone())
        }
    }
}

/// Homogeneous ridge: the single item `(a theta*, (lambda + a^2 ||theta*||^2) / a)`
/// for any nonzero `a`; the empty set for a zero target.
pub fn teach_hom_ridge(
    theta_star: &Vector,
    lambda: f64,
    opts: &ConstructionOptions,
) -> Result<TeachingSet> {
    check_lambda(lambda)?;
    check_scale(opts.scale_a)?;
    if theta_star.is_zero() {
        return Ok(TeachingSet::empty(Provenance::HomRidge));
    }
    let a = opts.scale_a;
    let x = theta_star.scale(a);
    let y = (lambda + x.norm_sq()) / a;
    TeachingSet::new(vec![Example::new(x, y)?], Provenance::HomRidge, 1.0)
}

/// Homogeneous SVM: `n = ceil(lambda ||theta*||^2)` identical positive items
/// at `lambda theta* / n`.
pub fn teach_hom_svm(theta_star: &Vector, lambda: f64) -> Result<TeachingSet> {
    check_lambda(lambda)?;
    if theta_star.is_zero() {
        return Err(Error::ZeroTarget);
    }
    let n = nudged_ceil(lambda * theta_star.norm_sq());
    let x = theta_star.scale(lambda / n as f64);
    let items = (0..n)
        .map(|_| Example::new(x.clone(), 1.0))
        .collect::<Result<Vec<_>>>()?;
    TeachingSet::new(items, Provenance::HomSvm, 1.0)
}

/// Homogeneous logistic: `n = ceil(lambda ||theta*||^2 / tau_max)` identical
/// positive items at `tau_inverse(lambda ||theta*||^2 / n) theta* / ||theta*||^2`.
pub fn teach_hom_logistic(theta_star: &Vector, lambda: f64) -> Result<TeachingSet> {
    check_lambda(lambda)?;
    if theta_star.is_zero() {
        return Err(Error::ZeroTarget);
    }
    let s = theta_star.norm_sq();
    let n = margin_count(LossKind::Logistic, lambda, s).expect("margin loss");
    // lambda s / n <= tau_max by the choice of n, up to float noise that
    // tau_inverse clamps.
    let t = tau_inverse(lambda * s / n as f64)?;
    let x = theta_star.scale(t / s);
    let items = (0..n)
        .map(|_| Example::new(x.clone(), 1.0))
        .collect::<Result<Vec<_>>>()?;
    TeachingSet::new(items, Provenance::HomLogistic, 1.0)
}

/// Inhomogeneous ridge: the single item `(0, b*)` when `w* = 0`; otherwise
/// the symmetric pair `x_1 = (a/2) w*`, `x_2 = x_1 - a w*` with
/// `y_1 = x_1' w* + b* + lambda/a` and `y_2 = y_1 - a ||w*||^2 - 2 lambda/a`.
pub fn teach_inhom_ridge(
    w_star: &Vector,
    b_star: f64,
    lambda: f64,
    opts: &ConstructionOptions,
) -> Result<TeachingSet> {
    check_lambda(lambda)?;
    check_scale(opts.scale_a)?;
    if !b_star.is_finite() {
        return Err(Error::NonFinite);
    }
    if w_star.is_zero() {
        let x = Vector::zeros(w_star.dim())?;
        return TeachingSet::new(
            vec![Example::new(x, b_star)?],
            Provenance::InhomRidge,
            1.0,
        );
    }
    let a = opts.scale_a;
    let x1 = w_star.scale(a / 2.0);
    let x2 = x1.sub(&w_star.scale(a))?;
    let y1 = x1.dot(w_star)? + b_star + lambda / a;
    let y2 = y1 - a * w_star.norm_sq() - 2.0 * lambda / a;
    TeachingSet::new(
        vec![Example::new(x1, y1)?, Example::new(x2, y2)?],
        Provenance::InhomRidge,
        1.0,
    )
}

/// Inhomogeneous SVM: `n = 2 ceil(lambda ||w*||^2 / 2)` items, half positive
/// at `x_+` and half negative at `x_- = x_+ - 2 w*/||w*||^2`, where `x_+` is
/// any vector with `x_+' w* + b* = 1` (minimal-norm along `w*` by default,
/// plus the optional orthogonal offset).
pub fn teach_inhom_svm(
    w_star: &Vector,
    b_star: f64,
    lambda: f64,
    opts: &ConstructionOptions,
) -> Result<TeachingSet> {
    check_lambda(lambda)?;
    if !b_star.is_finite() {
        return Err(Error::NonFinite);
    }
    if w_star.is_zero() {
        return Err(Error::ZeroTarget);
    }
    let s = w_star.norm_sq();
    let n = 2 * nudged_ceil(lambda * s / 2.0);
    let offset = resolve_offset(opts, w_star)?;
    let x_pos = w_star.scale((1.0 - b_star) / s).add(&offset)?;
    let x_neg = x_pos.sub(&w_star.scale(2.0 / s))?;
    let mut items = Vec::with_capacity(n);
    for _ in 0..n / 2 {
        items.push(Example::new(x_pos.clone(), 1.0)?);
    }
    for _ in 0..n / 2 {
        items.push(Example::new(x_neg.clone(), -1.0)?);
    }
    TeachingSet::new(items, Provenance::InhomSvm, 1.0)
}

/// Inhomogeneous logistic: `n = 2 ceil(lambda ||w*||^2 / (2 tau_max))` items
/// split between `x_+` and `x_- = x_+ - (2t/||w*||^2) w*`, where
/// `t = tau_inverse(lambda ||w*||^2 / n)` and `x_+' w* + b* = t`.
pub fn teach_inhom_logistic(
    w_star: &Vector,
    b_star: f64,
    lambda: f64,
    opts: &ConstructionOptions,
) -> Result<TeachingSet> {
    check_lambda(lambda)?;
    if !b_star.is_finite() {
        return Err(Error::NonFinite);
    }
    if w_star.is_zero() {
        return Err(Error::ZeroTarget);
    }
    let s = w_star.norm_sq();
    let n = 2 * nudged_ceil(lambda * s / (2.0 * tau_max()));
    let t = tau_inverse(lambda * s / n as f64)?;
    let offset = resolve_offset(opts, w_star)?;
    let x_pos = w_star.scale((t - b_star) / s).add(&offset)?;
    let x_neg = x_pos.sub(&w_star.scale(2.0 * t / s))?;
    let mut items = Vec::with_capacity(n);
    for _ in 0..n / 2 {
        items.push(Example::new(x_pos.clone(), 1.0)?);
    }
    for _ in 0..n / 2 {
        items.push(Example::new(x_neg.clone(), -1.0)?);
    }
    TeachingSet::new(items, Provenance::InhomLogistic, 1.0)
}

/// The largest scaling `t` of a decision-boundary target for which the
/// scaled construction realizes the boundary-row teaching dimension
/// (1 for homogeneous SVM/logistic, 2 for inhomogeneous): any `t` at or
/// below this threshold works.
pub fn boundary_scale(spec: &LearnerSpec, target: &TargetModel) -> Result<f64> {
    if !spec.loss.is_classification() {
        return Err(Error::BoundaryForRidge);
    }
    if target.weights.is_zero() {
        return Err(Error::ZeroTarget);
    }
    if spec.homogeneous != target.bias.is_none() {
        return Err(Error::BiasMismatch);
    }
    let norm = target.weights.norm();
    let sqrt_lambda = libm::sqrt(spec.lambda);
    Ok(match (spec.loss, spec.homogeneous) {
        (LossKind::Hinge, true) => 1.0 / (sqrt_lambda * norm),
        (LossKind::Logistic, true) => libm::sqrt(tau_max()) / (sqrt_lambda * norm),
        (LossKind::Hinge, false) => libm::sqrt(2.0) / (sqrt_lambda * norm),
        (LossKind::Logistic, false) => libm::sqrt(2.0 * tau_max()) / (sqrt_lambda * norm),
        (LossKind::Squared, _) => unreachable!(),
    })
}

/// Construct a teaching set for `(spec, target)`.
///
/// Routes to the matching construction; decision-boundary targets are scaled
/// by [`boundary_scale`] (or the override in `opts`) first, and the applied
/// scaling is recorded in the returned set's `scale_factor`. A homogeneous
/// zero target needs no data at all and yields the empty set. Requires the
/// identity regularizer.
pub fn teach(
    spec: &LearnerSpec,
    target: &TargetModel,
    opts: &ConstructionOptions,
) -> Result<TeachingSet> {
    validate_pair(spec, target)?;
    if !spec.regularizer_is_identity() {
        return Err(Error::NonIdentityRegularizer);
    }

    let (params, scale) = match target.goal {
        TeachingGoal::ExactParameter => (target.params(), 1.0),
        TeachingGoal::DecisionBoundary => {
            let t = match opts.boundary_scale {
                Some(t) if t.is_finite() && t > 0.0 => t,
                Some(_) => return Err(Error::InvalidScale),
                None => boundary_scale(spec, target)?,
            };
            (target.params().scale(t), t)
        }
    };

    let mut set = if spec.homogeneous {
        if params.weights.is_zero() {
            // No data needed: the regularizer alone pins the zero model.
            let prov = match spec.loss {
                LossKind::Squared => Provenance::HomRidge,
                LossKind::Hinge => Provenance::HomSvm,
                LossKind::Logistic => Provenance::HomLogistic,
            };
            return Ok(TeachingSet::empty(prov));
        }
        match spec.loss {
            LossKind::Squared => teach_hom_ridge(&params.weights, spec.lambda, opts)?,
            LossKind::Hinge => teach_hom_svm(&params.weights, spec.lambda)?,
            LossKind::Logistic => teach_hom_logistic(&params.weights, spec.lambda)?,
        }
    } else {
        let b = params.bias.expect("validated");
        match spec.loss {
            LossKind::Squared => teach_inhom_ridge(&params.weights, b, spec.lambda, opts)?,
            LossKind::Hinge => teach_inhom_svm(&params.weights, b, spec.lambda, opts)?,
            LossKind::Logistic => teach_inhom_logistic(&params.weights, b, spec.lambda, opts)?,
        }
    };
    set.scale_factor = scale;
    Ok(set)
}
