//! Certification that a training set teaches a target.
//!
//! Three independent checks back every certificate:
//!
//! 1. `kkt_residual`: first-order optimality of the target on the set. For
//!    smooth losses this is the gradient norm; for the hinge it is the
//!    distance from `-lambda A theta` to the set of achievable subgradient
//!    combinations, a box-constrained least-squares problem solved by
//!    projected gradient descent.
//! 2. solver recovery: retraining from random initialization must land on
//!    the target.
//! 3. `uniqueness_probe`: multi-start agreement, plus, for the
//!    inhomogeneous SVM, a direct witness that perturbing the bias strictly
//!    increases the objective.
//!
//! Tolerances are tiered by smoothness and surfaced in [`VerifyConfig`].

use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{
    loss_subdifferential, objective, LearnerSpec, LossKind, Parameters, TargetModel, TeachingGoal,
    TeachingSet, Vector,
};
use crate::rng::{splitmix64, Rng};
use crate::solvers::{train, SolverConfig};

/// KKT tolerance for smooth losses.
pub const KKT_TOL_SMOOTH: f64 = 1e-9;
/// KKT tolerance for the hinge (subgradient feasibility is itself solved
/// numerically).
pub const KKT_TOL_HINGE: f64 = 1e-8;
/// Parameter-recovery tolerance for smooth losses.
pub const RECOVERY_TOL_SMOOTH: f64 = 1e-6;
/// Parameter-recovery tolerance for the hinge.
pub const RECOVERY_TOL_HINGE: f64 = 1e-3;
/// Objective-gap tolerance (binding for the hinge).
pub const GAP_TOL: f64 = 1e-6;

const BOX_LS_ITER_CAP: usize = 10_000;
const BOX_LS_TOL: f64 = 1e-11;

/// Verification knobs; `None` tolerances resolve per-loss.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub kkt_tol: Option<f64>,
    pub recovery_tol: Option<f64>,
    pub gap_tol: f64,
    pub spread_tol: Option<f64>,
    pub restarts: usize,
    pub solver: SolverConfig,
    /// Stop at the first failed check (used by falsification sweeps).
    pub fail_fast: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            kkt_tol: None,
            recovery_tol: None,
            gap_tol: GAP_TOL,
            spread_tol: None,
            restarts: 5,
            solver: SolverConfig::default(),
            fail_fast: false,
        }
    }
}

impl VerifyConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.solver.seed = seed;
        self
    }

    fn kkt_tol_for(&self, loss: LossKind) -> f64 {
        self.kkt_tol.unwrap_or(match loss {
            LossKind::Hinge => KKT_TOL_HINGE,
            _ => KKT_TOL_SMOOTH,
        })
    }

    fn recovery_tol_for(&self, loss: LossKind) -> f64 {
        self.recovery_tol.unwrap_or(match loss {
            LossKind::Hinge => RECOVERY_TOL_HINGE,
            _ => RECOVERY_TOL_SMOOTH,
        })
    }

    fn spread_tol_for(&self, loss: LossKind) -> f64 {
        self.spread_tol.unwrap_or(self.recovery_tol_for(loss))
    }
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Outcome of the full verification pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub kkt_residual: f64,
    pub recovery_distance: f64,
    pub objective_gap: f64,
    pub uniqueness_spread: f64,
    pub passed: bool,
    pub details: Vec<CheckRecord>,
}

/// Hinge subdifferential with the kink widened by a relative tolerance:
/// at the construction optima the margin equals 1 exactly in real
/// arithmetic, and a few ulps of rounding must not collapse the interval
/// to one of its endpoints.
fn hinge_interval_tolerant(u: f64, y: f64) -> crate::model::SubgradientInterval {
    use crate::model::SubgradientInterval;
    let m = y * u;
    if libm::fabs(m - 1.0) <= 1e-9 * (1.0 + libm::fabs(m)) {
        SubgradientInterval { lo: (-y).min(0.0), hi: (-y).max(0.0) }
    } else if m < 1.0 {
        SubgradientInterval::singleton(-y)
    } else {
        SubgradientInterval::singleton(0.0)
    }
}

/// Minimize `||M g + c||` over the box `lo <= g <= hi` by projected gradient
/// descent with a Barzilai-Borwein step, returning the best feasible
/// residual found.
fn box_least_squares(
    m: &DMatrix<f64>,
    c: &DVector<f64>,
    lo: &[f64],
    hi: &[f64],
) -> f64 {
    let n = lo.len();
    let lip = m.norm_squared().max(1e-300);
    let clamp = |g: &mut DVector<f64>| {
        for i in 0..n {
            g[i] = g[i].clamp(lo[i], hi[i]);
        }
    };
    let mut g = DVector::from_iterator(n, lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)));
    clamp(&mut g);
    let scale = c.norm().max(1.0);
    let mut best = (m * &g + c).norm();
    let mut prev_g: Option<(DVector<f64>, DVector<f64>)> = None;
    let mut step = 1.0 / lip;
    for _ in 0..BOX_LS_ITER_CAP {
        let r = m * &g + c;
        let grad = m.transpose() * &r;
        if let Some((pg, pgrad)) = &prev_g {
            let s = &g - pg;
            let y = &grad - pgrad;
            let sy = s.dot(&y);
            if sy > 1e-300 {
                step = (s.dot(&s) / sy).clamp(1e-6 / lip, 1e6 / lip);
            } else {
                step = 1.0 / lip;
            }
        }
        prev_g = Some((g.clone(), grad.clone()));
        let mut next = &g - &grad * step;
        clamp(&mut next);
        let moved = (&next - &g).norm();
        g = next;
        let resid = (m * &g + c).norm();
        if resid < best {
            best = resid;
        }
        if best <= BOX_LS_TOL * scale || moved <= 1e-17 * (1.0 + g.norm()) {
            break;
        }
    }
    best
}

/// First-order optimality residual of `params` on the set: the minimum over
/// feasible per-item subgradients `g_i` of
/// `|| sum_i g_i x_i_eff + lambda A_eff theta ||` (with `x_i_eff = [x_i; 1]`
/// and the zero-padded regularizer in the inhomogeneous case).
pub fn kkt_residual(spec: &LearnerSpec, set: &TeachingSet, params: &Parameters) -> Result<f64> {
    if spec.homogeneous != params.bias.is_none() {
        return Err(Error::BiasMismatch);
    }
    let d = params.weight_dim();
    set.validate_for(spec, d)?;
    let has_bias = !spec.homogeneous;
    let a_eff = spec.effective_regularizer(d)?;
    let theta = params.effective();
    let c = &a_eff * &theta * spec.lambda;

    let n = set.size();
    if n == 0 {
        return Ok(c.norm());
    }
    let d_eff = theta.len();
    let mut m = DMatrix::zeros(d_eff, n);
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    let mut all_singleton = true;
    for (j, item) in set.items.iter().enumerate() {
        let u = params.predict(&item.x)?;
        let interval = if spec.loss == LossKind::Hinge {
            spec.loss.validate_label(item.y)?;
            hinge_interval_tolerant(u, item.y)
        } else {
            loss_subdifferential(spec.loss, u, item.y)?
        };
        all_singleton &= interval.is_singleton();
        lo.push(interval.lo);
        hi.push(interval.hi);
        for i in 0..d {
            m[(i, j)] = item.x.as_slice()[i];
        }
        if has_bias {
            m[(d, j)] = 1.0;
        }
    }
    if all_singleton {
        let g = DVector::from_vec(lo);
        return Ok((&m * &g + &c).norm());
    }
    Ok(box_least_squares(&m, &c, &lo, &hi))
}

/// Detailed outcome of a uniqueness probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOutcome {
    /// Max pairwise distance among the converged restart solutions.
    pub spread: f64,
    pub all_converged: bool,
    /// For the inhomogeneous SVM: whether every bias perturbation
    /// `b* +/- eps`, `eps` in `{1e-2, 1e-1}`, strictly increased the
    /// objective. `None` where the witness does not apply.
    pub bias_witness: Option<bool>,
}

/// Run `train` from explicit per-restart seeds and report the spread.
pub fn uniqueness_probe_with_seeds(
    spec: &LearnerSpec,
    set: &TeachingSet,
    theta_star: &Parameters,
    seeds: &[u64],
    config: &VerifyConfig,
) -> Result<ProbeOutcome> {
    if seeds.len() < 2 {
        return Err(Error::TooFewRestarts);
    }
    let mut solver = config.solver.clone();
    solver.init_radius = 2.0 * (1.0 + theta_star.effective_norm());
    let mut solutions = Vec::with_capacity(seeds.len());
    let mut all_converged = true;
    for &seed in seeds {
        let mut cfg = solver.clone();
        cfg.seed = seed;
        if set.is_empty() {
            solutions.push(Parameters::zeros(theta_star.weight_dim(), theta_star.bias.is_some())?);
            continue;
        }
        let r = train(spec, set, &cfg)?;
        all_converged &= r.converged;
        solutions.push(r.params);
    }
    let mut spread = 0.0f64;
    for i in 0..solutions.len() {
        for j in (i + 1)..solutions.len() {
            spread = spread.max(solutions[i].distance(&solutions[j])?);
        }
    }

    let bias_witness = if spec.loss == LossKind::Hinge && !spec.homogeneous && !set.is_empty() {
        let f_star = objective(spec, set, theta_star)?;
        let mut ok = true;
        for eps in [1e-2, 1e-1] {
            for sign in [1.0, -1.0] {
                let perturbed = Parameters::new(
                    theta_star.weights.clone(),
                    theta_star.bias.map(|b| b + sign * eps),
                )?;
                let f = objective(spec, set, &perturbed)?;
                ok &= f - f_star > 1e-12;
            }
        }
        Some(ok)
    } else {
        None
    };

    Ok(ProbeOutcome { spread, all_converged, bias_witness })
}

/// Train from `restarts` random initializations (seeds derived from the
/// config's solver seed) and return the max pairwise distance among the
/// solutions. Errors when a restart fails to converge or, for the
/// inhomogeneous SVM, when the bias-perturbation witness fails.
pub fn uniqueness_probe(
    spec: &LearnerSpec,
    set: &TeachingSet,
    theta_star: &Parameters,
    restarts: usize,
    config: &VerifyConfig,
) -> Result<f64> {
    if restarts < 2 {
        return Err(Error::TooFewRestarts);
    }
    let seeds: Vec<u64> =
        (0..restarts).map(|i| splitmix64(config.solver.seed ^ (i as u64 + 0x9E37))).collect();
    let outcome = uniqueness_probe_with_seeds(spec, set, theta_star, &seeds, config)?;
    if !outcome.all_converged {
        return Err(Error::ProbeInconclusive("a restart did not converge"));
    }
    if outcome.bias_witness == Some(false) {
        return Err(Error::ProbeInconclusive(
            "bias perturbation did not strictly increase the objective",
        ));
    }
    Ok(outcome.spread)
}

fn push_check(details: &mut Vec<CheckRecord>, name: &str, value: f64, tolerance: f64) -> bool {
    let passed = value <= tolerance;
    details.push(CheckRecord { name: String::from(name), value, tolerance, passed });
    passed
}

/// Full certification pipeline: KKT membership, solver recovery (parameter
/// distance and objective gap), and uniqueness probing. `passed` holds
/// exactly when every check is within its tolerance.
pub fn verify_teaching_set(
    spec: &LearnerSpec,
    set: &TeachingSet,
    target: &TargetModel,
    config: &VerifyConfig,
) -> Result<VerifyReport> {
    if target.goal != TeachingGoal::ExactParameter {
        return Err(Error::NotApplicable(
            "decision-boundary targets are scaled before verification",
        ));
    }
    crate::model::validate_pair(spec, target)?;
    let theta_star = target.params();
    set.validate_for(spec, theta_star.weight_dim())?;

    let mut details = Vec::new();
    let mut passed = true;

    let kkt = kkt_residual(spec, set, &theta_star)?;
    passed &= push_check(&mut details, "kkt_residual", kkt, config.kkt_tol_for(spec.loss));

    if config.fail_fast && !passed {
        return Ok(VerifyReport {
            kkt_residual: kkt,
            recovery_distance: f64::INFINITY,
            objective_gap: f64::INFINITY,
            uniqueness_spread: f64::INFINITY,
            passed: false,
            details,
        });
    }

    // Recovery by independent training.
    let mut solver = config.solver.clone();
    solver.init_radius = 2.0 * (1.0 + theta_star.effective_norm());
    let f_star = objective(spec, set, &theta_star)?;
    let (recovery, gap, converged) = if set.is_empty() {
        let zero = Parameters::zeros(theta_star.weight_dim(), theta_star.bias.is_some())?;
        let f_hat = objective(spec, set, &zero)?;
        (zero.distance(&theta_star)?, libm::fabs(f_hat - f_star), true)
    } else {
        let r = train(spec, set, &solver)?;
        (
            r.params.distance(&theta_star)?,
            libm::fabs(r.objective_value - f_star),
            r.converged,
        )
    };
    passed &= push_check(
        &mut details,
        "recovery_distance",
        recovery,
        config.recovery_tol_for(spec.loss),
    );
    passed &= push_check(&mut details, "objective_gap", gap, config.gap_tol);
    if !converged {
        details.push(CheckRecord {
            name: String::from("solver_converged"),
            value: 0.0,
            tolerance: 0.0,
            passed: false,
        });
        passed = false;
    }

    if config.fail_fast && !passed {
        return Ok(VerifyReport {
            kkt_residual: kkt,
            recovery_distance: recovery,
            objective_gap: gap,
            uniqueness_spread: f64::INFINITY,
            passed: false,
            details,
        });
    }

    // Uniqueness.
    let seeds: Vec<u64> = (0..config.restarts.max(2))
        .map(|i| splitmix64(config.solver.seed ^ (i as u64 + 0x9E37)))
        .collect();
    let outcome = uniqueness_probe_with_seeds(spec, set, &theta_star, &seeds, config)?;
    passed &= push_check(
        &mut details,
        "uniqueness_spread",
        outcome.spread,
        config.spread_tol_for(spec.loss),
    );
    if !outcome.all_converged {
        details.push(CheckRecord {
            name: String::from("probe_converged"),
            value: 0.0,
            tolerance: 0.0,
            passed: false,
        });
        passed = false;
    }
    if let Some(witness) = outcome.bias_witness {
        details.push(CheckRecord {
            name: String::from("bias_perturbation_increases_objective"),
            value: if witness { 1.0 } else { 0.0 },
            tolerance: 1.0,
            passed: witness,
        });
        passed &= witness;
    }

    Ok(VerifyReport {
        kkt_residual: kkt,
        recovery_distance: recovery,
        objective_gap: gap,
        uniqueness_spread: outcome.spread,
        passed,
        details,
    })
}

/// Sign-agreement diagnostic for decision-boundary teaching: random probes
/// compared between the trained model and the reference boundary, excluding
/// probes whose distance to the reference boundary is below `1e-9`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    pub agreeing: usize,
    pub checked: usize,
    pub excluded: usize,
}

pub fn boundary_sign_agreement(
    trained: &Parameters,
    reference: &Parameters,
    probes: usize,
    box_radius: f64,
    seed: u64,
) -> Result<AgreementReport> {
    if trained.weight_dim() != reference.weight_dim() {
        return Err(Error::DimensionMismatch {
            expected: reference.weight_dim(),
            got: trained.weight_dim(),
        });
    }
    let d = reference.weight_dim();
    let w_norm = reference.weights.norm().max(1e-300);
    let mut rng = Rng::derive(seed, 0xb0);
    let mut agreeing = 0;
    let mut checked = 0;
    let mut excluded = 0;
    for _ in 0..probes {
        let x = Vector::new((0..d).map(|_| rng.range(-box_radius, box_radius)).collect())?;
        let ref_margin = reference.predict(&x)?;
        if libm::fabs(ref_margin) / w_norm < 1e-9 {
            excluded += 1;
            continue;
        }
        checked += 1;
        let trained_margin = trained.predict(&x)?;
        if trained_margin * ref_margin > 0.0 {
            agreeing += 1;
        }
    }
    Ok(AgreementReport { agreeing, checked, excluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{teach_hom_ridge, teach_hom_svm, ConstructionOptions};
    use crate::model::{Example, Provenance};
    use alloc::vec;

    fn v(entries: &[f64]) -> Vector {
        Vector::from_slice(entries).unwrap()
    }

    fn spec(loss: LossKind, homogeneous: bool, lambda: f64) -> LearnerSpec {
        LearnerSpec::new(loss, homogeneous, lambda).unwrap()
    }

    #[test]
    fn kkt_zero_at_hom_ridge_construction() {
        let theta = v(&[2.0, -1.0]);
        let set = teach_hom_ridge(&theta, 1.5, &ConstructionOptions::default()).unwrap();
        let sp = spec(LossKind::Squared, true, 1.5);
        let params = Parameters::new(theta, None).unwrap();
        assert!(kkt_residual(&sp, &set, &params).unwrap() <= 1e-10);
    }

    #[test]
    fn kkt_zero_at_hom_svm_construction() {
        let theta = v(&[1.0, 1.0]);
        let set = teach_hom_svm(&theta, 2.3).unwrap();
        let sp = spec(LossKind::Hinge, true, 2.3);
        let params = Parameters::new(theta, None).unwrap();
        let r = kkt_residual(&sp, &set, &params).unwrap();
        assert!(r <= 1e-9, "residual {r}");
    }

    #[test]
    fn kkt_positive_at_scaled_svm_target() {
        // At 2 theta* the margins exceed 1, all subgradients vanish, and the
        // residual is the full regularizer gradient.
        let theta = v(&[1.0, 0.0]);
        let lambda = 2.0;
        let set = teach_hom_svm(&theta, lambda).unwrap();
        let sp = spec(LossKind::Hinge, true, lambda);
        let doubled = Parameters::new(theta.scale(2.0), None).unwrap();
        let r = kkt_residual(&sp, &set, &doubled).unwrap();
        assert!(r >= lambda * theta.norm() * 0.1, "residual {r}");
        assert!((r - 2.0 * lambda * theta.norm()).abs() < 1e-9);
    }

    #[test]
    fn kkt_permutation_invariant() {
        let sp = spec(LossKind::Hinge, false, 1.0);
        let items = vec![
            Example::new(v(&[1.0, 0.2]), 1.0).unwrap(),
            Example::new(v(&[-0.7, 0.4]), -1.0).unwrap(),
            Example::new(v(&[0.3, -1.0]), -1.0).unwrap(),
        ];
        let set1 = TeachingSet::new(items.clone(), Provenance::External, 1.0).unwrap();
        let mut rev = items;
        rev.reverse();
        let set2 = TeachingSet::new(rev, Provenance::External, 1.0).unwrap();
        let p = Parameters::new(v(&[0.5, 0.5]), Some(0.1)).unwrap();
        let a = kkt_residual(&sp, &set1, &p).unwrap();
        let b = kkt_residual(&sp, &set2, &p).unwrap();
        assert!((a - b).abs() <= 1e-9 * (1.0 + a));
    }

    #[test]
    fn verify_passes_on_construction_and_fails_on_truncation() {
        let theta = v(&[1.0, 0.5]);
        let lambda = 2.5;
        let set = teach_hom_svm(&theta, lambda).unwrap();
        let sp = spec(LossKind::Hinge, true, lambda);
        let target = TargetModel::exact(theta, None).unwrap();
        let cfg = VerifyConfig::default().with_seed(7);
        let report = verify_teaching_set(&sp, &set, &target, &cfg).unwrap();
        assert!(report.passed, "{:?}", report.details);

        let mut truncated = set.clone();
        truncated.items.pop();
        let report = verify_teaching_set(&sp, &truncated, &target, &cfg).unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn verify_fails_on_flipped_label() {
        let theta = v(&[1.5]);
        let set = teach_hom_ridge(&theta, 1.0, &ConstructionOptions::default()).unwrap();
        let mut bad = set.clone();
        bad.items[0].y = -bad.items[0].y;
        let sp = spec(LossKind::Squared, true, 1.0);
        let target = TargetModel::exact(theta, None).unwrap();
        let report =
            verify_teaching_set(&sp, &bad, &target, &VerifyConfig::default()).unwrap();
        assert!(!report.passed);
        assert!(report.recovery_distance > 1.0);
    }

    #[test]
    fn verify_empty_set_teaches_zero() {
        let sp = spec(LossKind::Hinge, true, 1.0);
        let target = TargetModel::exact(v(&[0.0, 0.0]), None).unwrap();
        let set = TeachingSet::empty(Provenance::HomSvm);
        let report =
            verify_teaching_set(&sp, &set, &target, &VerifyConfig::default()).unwrap();
        assert!(report.passed, "{:?}", report.details);
    }

    #[test]
    fn probe_identical_seeds_zero_spread() {
        let theta = v(&[1.0, 0.0]);
        let set = teach_hom_svm(&theta, 1.0).unwrap();
        let sp = spec(LossKind::Hinge, true, 1.0);
        let params = Parameters::new(theta, None).unwrap();
        let outcome = uniqueness_probe_with_seeds(
            &sp,
            &set,
            &params,
            &[11, 11],
            &VerifyConfig::default(),
        )
        .unwrap();
        assert_eq!(outcome.spread, 0.0);
    }

    #[test]
    fn probe_requires_two_restarts() {
        let theta = v(&[1.0]);
        let set = teach_hom_svm(&theta, 1.0).unwrap();
        let sp = spec(LossKind::Hinge, true, 1.0);
        let params = Parameters::new(theta, None).unwrap();
        assert!(matches!(
            uniqueness_probe(&sp, &set, &params, 1, &VerifyConfig::default()),
            Err(Error::TooFewRestarts)
        ));
    }

    #[test]
    fn boundary_agreement_full_for_aligned_models() {
        let reference = Parameters::new(v(&[1.0, -0.5]), Some(0.2)).unwrap();
        let trained = reference.scale(0.3);
        let r = boundary_sign_agreement(&trained, &reference, 1000, 5.0, 3).unwrap();
        assert_eq!(r.agreeing, r.checked);
        let opposite = reference.scale(-1.0);
        let r = boundary_sign_agreement(&opposite, &reference, 1000, 5.0, 3).unwrap();
        assert_eq!(r.agreeing, 0);
    }
}
