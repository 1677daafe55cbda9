//! Lower bounds on teaching dimension and closed-form TD values.
//!
//! Three lower bounds apply to the regularized-ERM family and are used
//! together by taking their maximum:
//!
//! - `lb1`, a degree-of-freedom bound from the rank of the regularizer;
//! - `lb2`, a strength-of-regularization bound for homogeneous learners
//!   with a full-rank regularizer;
//! - `lb3`, the analogous bound for inhomogeneous margin learners, where
//!   the bias is unregularized.
//!
//! `td_formula` returns the closed-form teaching dimension for the six
//! ridge/SVM/logistic variants (an interval for the inhomogeneous margin
//! learners, whose exact value is open up to a rounding effect of one).

use crate::error::{Error, Result};
use crate::lambert::tau_max;
use crate::model::{
    validate_pair, LearnerSpec, LossKind, TargetModel, TeachingGoal, DEFAULT_RANK_TOL,
};

use nalgebra::DMatrix;

/// Ceiling with a `1e-12` downward nudge so that products like
/// `lambda * ||theta||^2` that are integers up to floating-point noise do
/// not round up spuriously. Intended for strictly positive arguments; the
/// result is clamped to at least 1.
pub fn nudged_ceil(z: f64) -> usize {
    let c = libm::ceil(z - 1e-12);
    if c < 1.0 {
        1
    } else {
        c as usize
    }
}

/// Item count `ceil(lambda * s / cap)` for margin losses, where `cap` is the
/// largest per-item coefficient (`1` for hinge, `tau_max` for logistic).
/// `None` for the squared loss, whose per-item coefficient is unbounded.
pub(crate) fn margin_count(loss: LossKind, lambda: f64, s: f64) -> Option<usize> {
    let z = match loss {
        LossKind::Hinge => lambda * s,
        LossKind::Logistic => lambda * s / tau_max(),
        LossKind::Squared => return None,
    };
    Some(nudged_ceil(z))
}

fn rank_of(m: &DMatrix<f64>, tol: f64) -> usize {
    let eigs = m.clone().symmetric_eigen().eigenvalues;
    let max = eigs.iter().fold(0.0f64, |acc, e| acc.max(libm::fabs(*e)));
    if max == 0.0 {
        return 0;
    }
    eigs.iter().filter(|e| **e > tol * max).count()
}

/// The supremum `sup alpha * g` appearing in the denominators of `lb2` and
/// `lb3`, where `g` ranges over negated subgradients at `alpha * s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupCoefficient {
    /// Positive, possibly infinite.
    pub value: f64,
}

/// Closed form of the supremum for `s = ||theta*||_A^2 > 0`: `1/s` for the
/// hinge, `tau_max/s` for the logistic, unbounded for the squared loss.
pub fn sup_coefficient(loss: LossKind, s: f64) -> Result<SupCoefficient> {
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::Domain { arg: s, domain: "(0, inf)" });
    }
    let value = match loss {
        LossKind::Hinge => 1.0 / s,
        LossKind::Logistic => tau_max() / s,
        LossKind::Squared => f64::INFINITY,
    };
    Ok(SupCoefficient { value })
}

/// Degree-of-freedom lower bound: `d_eff - rank(A_eff)`, plus one when
/// `A_eff theta*` is (numerically) nonzero. For inhomogeneous learners the
/// effective parameter is `[w; b]` and the regularizer is padded with a zero
/// row and column for the bias.
pub fn lb1(spec: &LearnerSpec, target: &TargetModel) -> Result<usize> {
    validate_pair(spec, target)?;
    let d = target.weight_dim();
    let a_eff = spec.effective_regularizer(d)?;
    let theta = target.params().effective();
    let d_eff = a_eff.nrows();
    let r = rank_of(&a_eff, DEFAULT_RANK_TOL);
    let a_theta = &a_eff * &theta;
    let nonzero = a_theta.norm() > 1e-10 * a_eff.norm() * theta.norm();
    Ok(d_eff - r + usize::from(nonzero))
}

/// Strength-of-regularization lower bound `ceil(lambda / sup)`. Zero unless
/// the learner is homogeneous with a full-rank regularizer and a nonzero
/// target (the padded inhomogeneous regularizer is always rank-deficient),
/// and zero for the squared loss, whose supremum is infinite.
pub fn lb2(spec: &LearnerSpec, target: &TargetModel) -> Result<usize> {
    validate_pair(spec, target)?;
    if !spec.homogeneous {
        return Ok(0);
    }
    let d = target.weight_dim();
    let a = spec.regularizer_matrix(d)?;
    if rank_of(&a, DEFAULT_RANK_TOL) != d || target.weights.is_zero() {
        return Ok(0);
    }
    let s = spec.weight_norm_sq(&target.weights)?;
    Ok(margin_count(spec.loss, spec.lambda, s).unwrap_or(0))
}

/// Inhomogeneous-margin lower bound `ceil(lambda / sup)` on `||w*||_A^2`.
/// Applicable only to inhomogeneous hinge/logistic learners with a full-rank
/// regularizer and nonzero weights.
pub fn lb3(spec: &LearnerSpec, target: &TargetModel) -> Result<usize> {
    validate_pair(spec, target)?;
    if spec.homogeneous {
        return Err(Error::NotApplicable("homogeneous learner"));
    }
    if spec.loss == LossKind::Squared {
        return Err(Error::NotApplicable("squared loss"));
    }
    if target.weights.is_zero() {
        return Err(Error::NotApplicable("zero weight vector"));
    }
    let d = target.weight_dim();
    let a = spec.regularizer_matrix(d)?;
    if rank_of(&a, DEFAULT_RANK_TOL) != d {
        return Err(Error::NotApplicable("rank-deficient regularizer"));
    }
    let s = spec.weight_norm_sq(&target.weights)?;
    Ok(margin_count(spec.loss, spec.lambda, s).expect("margin loss"))
}

/// The bounds used in conjunction: the maximum of `lb1`, `lb2`, and, where
/// applicable, `lb3`.
pub fn lower_bound(spec: &LearnerSpec, target: &TargetModel) -> Result<usize> {
    let a = lb1(spec, target)?;
    let b = lb2(spec, target)?;
    let c = lb3(spec, target).unwrap_or(0);
    Ok(a.max(b).max(c))
}

/// A teaching dimension: exact, or an interval of width at most one for the
/// inhomogeneous margin learners (the exact value there is open; the
/// interval is reported as-is and never collapsed).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdValue {
    Exact(usize),
    Interval { lo: usize, hi: usize },
}

impl TdValue {
    pub fn lo(&self) -> usize {
        match *self {
            TdValue::Exact(n) => n,
            TdValue::Interval { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> usize {
        match *self {
            TdValue::Exact(n) => n,
            TdValue::Interval { hi, .. } => hi,
        }
    }
}

fn require_identity(spec: &LearnerSpec) -> Result<()> {
    if !spec.regularizer_is_identity() {
        return Err(Error::NonIdentityRegularizer);
    }
    Ok(())
}

/// Closed-form teaching dimension. Requires the identity regularizer, for
/// which the formulas are established.
///
/// Exact parameter: homogeneous ridge teaches with one item (zero items for
/// a zero target), homogeneous SVM with `ceil(lambda ||theta*||^2)` items,
/// homogeneous logistic with `ceil(lambda ||theta*||^2 / tau_max)`;
/// inhomogeneous ridge needs two items (one when `w* = 0`), and the
/// inhomogeneous margin learners get an interval whose upper end is the
/// symmetric-pair construction size `2 ceil(z/2)` and whose lower end is the
/// larger of `ceil(z)` and the degree-of-freedom bound 2.
///
/// Decision boundary: 1 for homogeneous SVM/logistic, 2 for inhomogeneous.
pub fn td_formula(spec: &LearnerSpec, target: &TargetModel) -> Result<TdValue> {
    validate_pair(spec, target)?;
    require_identity(spec)?;
    if target.goal == TeachingGoal::DecisionBoundary {
        return Ok(TdValue::Exact(if spec.homogeneous { 1 } else { 2 }));
    }
    if spec.homogeneous {
        if target.weights.is_zero() {
            return Ok(TdValue::Exact(0));
        }
        let s = target.weights.norm_sq();
        Ok(match spec.loss {
            LossKind::Squared => TdValue::Exact(1),
            _ => TdValue::Exact(margin_count(spec.loss, spec.lambda, s).expect("margin loss")),
        })
    } else {
        match spec.loss {
            LossKind::Squared => {
                Ok(TdValue::Exact(if target.weights.is_zero() { 1 } else { 2 }))
            }
            _ => {
                if target.weights.is_zero() {
                    return Err(Error::ZeroTarget);
                }
                let s = target.weights.norm_sq();
                let z = match spec.loss {
                    LossKind::Hinge => spec.lambda * s,
                    LossKind::Logistic => spec.lambda * s / tau_max(),
                    LossKind::Squared => unreachable!(),
                };
                let lo = nudged_ceil(z).max(2);
                let hi = 2 * nudged_ceil(z / 2.0);
                Ok(TdValue::Interval { lo, hi })
            }
        }
    }
}

/// All three bounds, their maximum, and the formula TD in one record.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub lb1: usize,
    pub lb2: usize,
    /// `None` where the inhomogeneous-margin bound does not apply.
    pub lb3: Option<usize>,
    pub combined: usize,
    pub td: TdValue,
}

/// Assemble a [`BoundReport`]. For a decision-boundary goal the bounds are
/// evaluated at the threshold scaling of the target (the scaling whose
/// construction realizes the boundary-row TD), so that `combined` and `td`
/// describe the same teaching problem.
pub fn bound_report(spec: &LearnerSpec, target: &TargetModel) -> Result<BoundReport> {
    validate_pair(spec, target)?;
    require_identity(spec)?;
    let td = td_formula(spec, target)?;
    let eval_target = match target.goal {
        TeachingGoal::ExactParameter => target.clone(),
        TeachingGoal::DecisionBoundary => {
            let t = crate::construct::boundary_scale(spec, target)?;
            let p = target.params().scale(t);
            TargetModel::exact(p.weights, p.bias)?
        }
    };
    let b1 = lb1(spec, &eval_target)?;
    let b2 = lb2(spec, &eval_target)?;
    let b3 = lb3(spec, &eval_target).ok();
    let combined = b1.max(b2).max(b3.unwrap_or(0));
    Ok(BoundReport { lb1: b1, lb2: b2, lb3: b3, combined, td })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PsdMatrix, Vector};
    use alloc::vec;

    fn v(entries: &[f64]) -> Vector {
        Vector::from_slice(entries).unwrap()
    }

    fn hom(loss: LossKind, lambda: f64) -> LearnerSpec {
        LearnerSpec::new(loss, true, lambda).unwrap()
    }

    fn inhom(loss: LossKind, lambda: f64) -> LearnerSpec {
        LearnerSpec::new(loss, false, lambda).unwrap()
    }

    fn exact(weights: &[f64], bias: Option<f64>) -> TargetModel {
        TargetModel::exact(v(weights), bias).unwrap()
    }

    #[test]
    fn lb1_identity_cases() {
        // Full-rank identity, nonzero target: d - d + 1 = 1.
        let spec = hom(LossKind::Squared, 1.0);
        assert_eq!(lb1(&spec, &exact(&[1.0, 2.0], None)).unwrap(), 1);
        // Zero target: A theta* = 0.
        assert_eq!(lb1(&spec, &exact(&[0.0, 0.0], None)).unwrap(), 0);
        // Inhomogeneous: padded regularizer has rank d, so (d+1) - d + 1 = 2.
        let spec = inhom(LossKind::Squared, 1.0);
        assert_eq!(lb1(&spec, &exact(&[1.0], Some(3.0))).unwrap(), 2);
        // Inhomogeneous with w* = 0: A_eff theta* = 0, bound drops to 1.
        assert_eq!(lb1(&spec, &exact(&[0.0], Some(3.0))).unwrap(), 1);
    }

    #[test]
    fn lb1_general_psd() {
        let a = PsdMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let spec = hom(LossKind::Squared, 1.0).with_regularizer(a);
        // A theta* nonzero: 2 - 1 + 1 = 2.
        assert_eq!(lb1(&spec, &exact(&[1.0, 0.0], None)).unwrap(), 2);
        // theta* in the null space of A: 2 - 1 = 1.
        assert_eq!(lb1(&spec, &exact(&[0.0, 1.0], None)).unwrap(), 1);
    }

    #[test]
    fn lb1_scale_invariant_under_identity() {
        let spec = hom(LossKind::Hinge, 2.0);
        for c in [0.1, 1.0, 55.0] {
            assert_eq!(lb1(&spec, &exact(&[0.3 * c, -0.4 * c], None)).unwrap(), 1);
        }
    }

    #[test]
    fn lb2_cases() {
        assert_eq!(lb2(&hom(LossKind::Hinge, 2.0), &exact(&[1.0, 0.0], None)).unwrap(), 2);
        assert_eq!(lb2(&hom(LossKind::Squared, 5.0), &exact(&[1.0], None)).unwrap(), 0);
        assert_eq!(lb2(&inhom(LossKind::Hinge, 9.0), &exact(&[1.0], Some(0.0))).unwrap(), 0);
        // Logistic: ceil(lambda s / tau_max).
        assert_eq!(lb2(&hom(LossKind::Logistic, 1.0), &exact(&[1.0], None)).unwrap(), 4);
        // Rank-deficient regularizer: 0.
        let a = PsdMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let spec = hom(LossKind::Hinge, 2.0).with_regularizer(a);
        assert_eq!(lb2(&spec, &exact(&[1.0, 0.0], None)).unwrap(), 0);
    }

    #[test]
    fn lb3_cases() {
        assert_eq!(lb3(&inhom(LossKind::Hinge, 3.0), &exact(&[1.0], Some(0.5))).unwrap(), 3);
        assert_eq!(lb3(&inhom(LossKind::Hinge, 0.5), &exact(&[1.0], Some(0.0))).unwrap(), 1);
        assert_eq!(lb3(&inhom(LossKind::Logistic, 1.0), &exact(&[1.0], Some(0.0))).unwrap(), 4);
        assert!(lb3(&hom(LossKind::Hinge, 1.0), &exact(&[1.0], None)).is_err());
        assert!(lb3(&inhom(LossKind::Squared, 1.0), &exact(&[1.0], Some(0.0))).is_err());
        assert!(lb3(&inhom(LossKind::Hinge, 1.0), &exact(&[0.0], Some(0.0))).is_err());
    }

    #[test]
    fn lb3_matches_hom_lb2_numerically() {
        for lambda in [0.3, 1.0, 2.5, 7.7] {
            for s in [0.25, 1.0, 4.0] {
                let w = v(&[libm::sqrt(s)]);
                let inh = lb3(
                    &inhom(LossKind::Logistic, lambda),
                    &TargetModel::exact(w.clone(), Some(1.0)).unwrap(),
                )
                .unwrap();
                let hom_b = lb2(
                    &hom(LossKind::Logistic, lambda),
                    &TargetModel::exact(w, None).unwrap(),
                )
                .unwrap();
                assert_eq!(inh, hom_b);
            }
        }
    }

    #[test]
    fn combined_bound_examples() {
        assert_eq!(lower_bound(&hom(LossKind::Hinge, 3.0), &exact(&[1.0], None)).unwrap(), 3);
        assert_eq!(
            lower_bound(&inhom(LossKind::Squared, 1.0), &exact(&[2.0], Some(1.0))).unwrap(),
            2
        );
        assert_eq!(lower_bound(&hom(LossKind::Squared, 1.0), &exact(&[2.0], None)).unwrap(), 1);
    }

    #[test]
    fn sup_coefficient_closed_forms() {
        assert_eq!(sup_coefficient(LossKind::Hinge, 1.0).unwrap().value, 1.0);
        let s = sup_coefficient(LossKind::Logistic, 2.0).unwrap().value;
        assert!((s - tau_max() / 2.0).abs() < 1e-15);
        assert!((s - 0.13923).abs() < 5e-5);
        assert!(sup_coefficient(LossKind::Squared, 3.0).unwrap().value.is_infinite());
        assert!(sup_coefficient(LossKind::Hinge, 0.0).is_err());
    }

    #[test]
    fn td_formula_exact_parameter() {
        assert_eq!(
            td_formula(&hom(LossKind::Squared, 1.0), &exact(&[3.0, 4.0], None)).unwrap(),
            TdValue::Exact(1)
        );
        assert_eq!(
            td_formula(&hom(LossKind::Logistic, 1.0), &exact(&[1.0], None)).unwrap(),
            TdValue::Exact(4)
        );
        assert_eq!(
            td_formula(&hom(LossKind::Hinge, 1.0), &exact(&[0.0, 0.0], None)).unwrap(),
            TdValue::Exact(0)
        );
        assert_eq!(
            td_formula(&inhom(LossKind::Squared, 1.0), &exact(&[1.0], Some(2.0))).unwrap(),
            TdValue::Exact(2)
        );
        assert_eq!(
            td_formula(&inhom(LossKind::Squared, 1.0), &exact(&[0.0], Some(2.0))).unwrap(),
            TdValue::Exact(1)
        );
        assert_eq!(
            td_formula(&inhom(LossKind::Hinge, 3.0), &exact(&[1.0], Some(0.0))).unwrap(),
            TdValue::Interval { lo: 3, hi: 4 }
        );
        // Small lambda: the degree-of-freedom floor keeps the interval at [2, 2].
        assert_eq!(
            td_formula(&inhom(LossKind::Hinge, 0.5), &exact(&[1.0], Some(0.0))).unwrap(),
            TdValue::Interval { lo: 2, hi: 2 }
        );
    }

    #[test]
    fn td_formula_boundary() {
        let b = TargetModel::boundary(v(&[2.0, 1.0]), None).unwrap();
        assert_eq!(td_formula(&hom(LossKind::Hinge, 4.0), &b).unwrap(), TdValue::Exact(1));
        let b = TargetModel::boundary(v(&[2.0]), Some(1.0)).unwrap();
        assert_eq!(td_formula(&inhom(LossKind::Logistic, 4.0), &b).unwrap(), TdValue::Exact(2));
    }

    #[test]
    fn td_formula_rejects_non_identity() {
        let a = PsdMatrix::diagonal(&[2.0, 1.0]).unwrap();
        let spec = hom(LossKind::Hinge, 1.0).with_regularizer(a);
        assert!(matches!(
            td_formula(&spec, &exact(&[1.0, 0.0], None)),
            Err(Error::NonIdentityRegularizer)
        ));
    }

    #[test]
    fn report_matches_tables() {
        let r = bound_report(&inhom(LossKind::Hinge, 3.0), &exact(&[1.0], Some(0.0))).unwrap();
        assert_eq!((r.lb1, r.lb2, r.lb3, r.combined), (2, 0, Some(3), 3));
        assert_eq!(r.td, TdValue::Interval { lo: 3, hi: 4 });

        let r = bound_report(&hom(LossKind::Squared, 1.0), &exact(&[1.0, 1.0], None)).unwrap();
        assert_eq!((r.lb1, r.combined), (1, 1));
        assert_eq!(r.td, TdValue::Exact(1));
    }

    #[test]
    fn nudged_ceil_handles_float_noise() {
        assert_eq!(nudged_ceil(3.0000000000000004), 3);
        assert_eq!(nudged_ceil(3.0), 3);
        assert_eq!(nudged_ceil(3.1), 4);
        assert_eq!(nudged_ceil(1e-15), 1);
        let z = 9.7 * (libm::sqrt(2.0) * libm::sqrt(2.0)); // 19.400000000000002
        assert_eq!(nudged_ceil(z), 20);
    }
}
