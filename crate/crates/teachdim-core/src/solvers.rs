//! Independent trainers for the three learners.
//!
//! Teaching sets are certified by retraining, so each solver is built on a
//! route independent of the constructions: ridge solves its normal equations
//! in closed form, logistic regression runs damped Newton, and the SVM runs
//! projected subgradient descent with tail averaging followed by an exact
//! polish on the dual box QP (coordinate ascent in the homogeneous case, a
//! pairwise working-set method when an unregularized bias is present). The
//! polish brings the hinge solution to near machine precision, which the
//! decision-boundary checks require.
//!
//! Every solve is deterministic given its seed.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{
    objective, LearnerSpec, LossKind, Parameters, TeachingSet, DEFAULT_RANK_TOL,
};
use crate::rng::Rng;

/// Iteration budget for the pure subgradient method.
pub const DEFAULT_SUBGRADIENT_ITERS: usize = 200_000;
/// Iteration budget for Newton.
pub const DEFAULT_NEWTON_ITERS: usize = 100;
/// Gradient-norm tolerance for smooth solvers.
pub const DEFAULT_SMOOTH_TOL: f64 = 1e-10;
/// Relative optimality tolerance for the hinge dual polish.
pub const DEFAULT_HINGE_TOL: f64 = 1e-12;

const SUBGRADIENT_PHASE_ITERS: usize = 1000;
const DUAL_EPOCH_CAP: usize = 20_000;
const SMO_ITER_CAP: usize = 400_000;

/// Solver knobs. `None` fields fall back to per-solver defaults
/// ([`DEFAULT_NEWTON_ITERS`] / [`DEFAULT_SUBGRADIENT_ITERS`] iterations,
/// [`DEFAULT_SMOOTH_TOL`] gradient norm, [`DEFAULT_HINGE_TOL`] dual
/// optimality).
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub max_iterations: Option<usize>,
    pub tolerance: Option<f64>,
    /// The `c` in the subgradient step `c / sqrt(k)`.
    pub step_constant: f64,
    pub seed: u64,
    /// Random initialization is uniform over `[-r, r]` per coordinate.
    pub init_radius: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: None,
            tolerance: None,
            step_constant: 1.0,
            seed: 0,
            init_radius: 10.0,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Outcome of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub params: Parameters,
    pub objective_value: f64,
    pub iterations: usize,
    /// The solver's own stopping criterion was met.
    pub converged: bool,
    /// False when the minimizer was not unique and a canonical
    /// (minimum-norm) representative was returned.
    pub unique: bool,
}

fn infer_dim(spec: &LearnerSpec, set: &TeachingSet) -> Result<usize> {
    set.dim()
        .or_else(|| spec.regularizer.as_ref().map(|a| a.dim()))
        .ok_or(Error::NotApplicable("empty training set of unknown dimension"))
}

fn effective_x(x: &crate::model::Vector, has_bias: bool) -> DVector<f64> {
    if has_bias {
        let mut v = DVector::zeros(x.dim() + 1);
        v.rows_mut(0, x.dim()).copy_from(x.dv());
        v[x.dim()] = 1.0;
        v
    } else {
        x.dv().clone()
    }
}

/// Minimum-norm solution of the symmetric PSD system `m x = rhs`; the flag
/// is true when the system was rank-deficient.
fn solve_spd_minnorm(m: &DMatrix<f64>, rhs: &DVector<f64>) -> (DVector<f64>, bool) {
    let se = m.clone().symmetric_eigen();
    let max = se.eigenvalues.iter().fold(0.0f64, |acc, e| acc.max(libm::fabs(*e)));
    if max == 0.0 {
        return (DVector::zeros(m.nrows()), true);
    }
    let tol = 1e-12 * max;
    let mut x = DVector::zeros(m.nrows());
    let mut deficient = false;
    for (i, e) in se.eigenvalues.iter().enumerate() {
        if *e > tol {
            let v = se.eigenvectors.column(i);
            x.axpy(v.dot(rhs) / e, &v.into_owned(), 1.0);
        } else {
            deficient = true;
        }
    }
    (x, deficient)
}

fn zero_data_result(spec: &LearnerSpec, d: usize) -> Result<SolveResult> {
    let has_bias = !spec.homogeneous;
    let params = Parameters::zeros(d, has_bias)?;
    let a_eff = spec.effective_regularizer(d)?;
    let se = a_eff.clone().symmetric_eigen();
    let max = se.eigenvalues.iter().fold(0.0f64, |acc, e| acc.max(libm::fabs(*e)));
    let full_rank =
        max > 0.0 && se.eigenvalues.iter().all(|e| *e > DEFAULT_RANK_TOL * max);
    Ok(SolveResult {
        params,
        objective_value: 0.0,
        iterations: 0,
        converged: true,
        unique: full_rank,
    })
}

/// Closed-form ridge: solves the regularized normal equations
/// `(X'X + lambda A_eff) theta = X'y`, padding the regularizer with a zero
/// row and column for the bias in the inhomogeneous case. A singular system
/// yields the minimum-norm solution with `unique = false`.
pub fn solve_ridge(spec: &LearnerSpec, set: &TeachingSet) -> Result<SolveResult> {
    if spec.loss != LossKind::Squared {
        return Err(Error::NotApplicable("ridge solver requires the squared loss"));
    }
    let d = infer_dim(spec, set)?;
    set.validate_for(spec, d)?;
    let has_bias = !spec.homogeneous;
    let mut m = spec.effective_regularizer(d)? * spec.lambda;
    let mut rhs = DVector::zeros(m.nrows());
    for item in &set.items {
        let xe = effective_x(&item.x, has_bias);
        m.ger(1.0, &xe, &xe, 1.0);
        rhs.axpy(item.y, &xe, 1.0);
    }
    let (theta, deficient) = solve_spd_minnorm(&m, &rhs);
    let params = Parameters::from_effective(&theta, has_bias);
    let objective_value = objective(spec, set, &params)?;
    Ok(SolveResult { params, objective_value, iterations: 0, converged: true, unique: !deficient })
}

fn random_init(d_eff: usize, rng: &mut Rng, radius: f64) -> DVector<f64> {
    DVector::from_iterator(d_eff, (0..d_eff).map(|_| rng.range(-radius, radius)))
}

struct SmoothEval {
    value: f64,
    grad: DVector<f64>,
    hess: DMatrix<f64>,
}

fn logistic_eval(
    lambda_a: &DMatrix<f64>,
    xs: &[DVector<f64>],
    ys: &[f64],
    theta: &DVector<f64>,
    want_hess: bool,
) -> SmoothEval {
    let d_eff = theta.len();
    let mut value = 0.5 * theta.dot(&(lambda_a * theta));
    let mut grad = lambda_a * theta;
    let mut hess = if want_hess { lambda_a.clone() } else { DMatrix::zeros(0, 0) };
    for (x, y) in xs.iter().zip(ys) {
        let u = x.dot(theta);
        let m = y * u;
        value += if m >= 0.0 {
            libm::log1p(libm::exp(-m))
        } else {
            -m + libm::log1p(libm::exp(m))
        };
        let p = crate::model::sigmoid(-m);
        grad.axpy(-y * p, x, 1.0);
        if want_hess {
            hess.ger(p * (1.0 - p), x, x, 1.0);
        }
    }
    let _ = d_eff;
    SmoothEval { value, grad, hess }
}

fn newton_direction(hess: &DMatrix<f64>, grad: &DVector<f64>) -> DVector<f64> {
    if let Some(chol) = hess.clone().cholesky() {
        return chol.solve(&(-grad));
    }
    // Levenberg fallback: add an increasing ridge until the factorization
    // succeeds, then fall back to steepest descent.
    let n = hess.nrows();
    let scale = 1.0 + hess.trace() / n as f64;
    let mut jitter = 1e-12 * scale;
    for _ in 0..10 {
        let jittered = hess + DMatrix::identity(n, n) * jitter;
        if let Some(chol) = jittered.cholesky() {
            return chol.solve(&(-grad));
        }
        jitter *= 100.0;
    }
    -grad
}

/// Damped Newton for logistic regression: full Newton steps with
/// backtracking halving until the objective decreases; stops when the
/// gradient norm drops below the tolerance.
pub fn solve_logistic(
    spec: &LearnerSpec,
    set: &TeachingSet,
    config: &SolverConfig,
) -> Result<SolveResult> {
    if spec.loss != LossKind::Logistic {
        return Err(Error::NotApplicable("logistic solver requires the logistic loss"));
    }
    let d = infer_dim(spec, set)?;
    set.validate_for(spec, d)?;
    if set.is_empty() {
        return zero_data_result(spec, d);
    }
    let has_bias = !spec.homogeneous;
    let lambda_a = spec.effective_regularizer(d)? * spec.lambda;
    let xs: Vec<DVector<f64>> =
        set.items.iter().map(|it| effective_x(&it.x, has_bias)).collect();
    let ys: Vec<f64> = set.items.iter().map(|it| it.y).collect();

    let max_iter = config.max_iterations.unwrap_or(DEFAULT_NEWTON_ITERS);
    let tol = config.tolerance.unwrap_or(DEFAULT_SMOOTH_TOL);
    let mut rng = Rng::new(config.seed);
    let mut theta = random_init(lambda_a.nrows(), &mut rng, config.init_radius);

    // Pull saturated starts back toward the origin: with every sigmoid
    // pinned the bias direction is a flat plateau where Newton wanders,
    // and no minimizer of these objectives has extreme margins.
    let max_margin = xs
        .iter()
        .map(|x| libm::fabs(x.dot(&theta)))
        .fold(0.0f64, f64::max);
    if max_margin > 10.0 {
        theta *= 10.0 / max_margin;
    }

    let mut eval = logistic_eval(&lambda_a, &xs, &ys, &theta, true);
    let mut converged = eval.grad.norm() <= tol;
    let mut iterations = 0;
    while !converged && iterations < max_iter {
        iterations += 1;
        let mut dir = newton_direction(&eval.hess, &eval.grad);
        let cap = 10.0 * (1.0 + theta.norm());
        let dir_norm = dir.norm();
        if dir_norm > cap {
            dir *= cap / dir_norm;
        }
        let mut step = 1.0;
        let mut moved = false;
        while step > 1e-18 {
            let cand = &theta + &dir * step;
            let cand_eval = logistic_eval(&lambda_a, &xs, &ys, &cand, true);
            // Near the optimum the objective flattens at machine precision
            // before the gradient does; accept steps within the summation
            // noise of the objective that still clearly shrink the gradient.
            let flat = cand_eval.value <= eval.value + 1e-13 * (1.0 + libm::fabs(eval.value));
            if cand_eval.value < eval.value
                || (flat && cand_eval.grad.norm() < 0.9 * eval.grad.norm())
            {
                theta = cand;
                eval = cand_eval;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        converged = eval.grad.norm() <= tol;
        if !moved {
            break;
        }
    }

    let params = Parameters::from_effective(&theta, has_bias);
    Ok(SolveResult {
        params,
        objective_value: eval.value,
        iterations,
        converged,
        unique: true,
    })
}

fn hinge_subgradient(
    lambda_a: &DMatrix<f64>,
    xs: &[DVector<f64>],
    ys: &[f64],
    theta: &DVector<f64>,
) -> DVector<f64> {
    let mut g = lambda_a * theta;
    for (x, y) in xs.iter().zip(ys) {
        if y * x.dot(theta) < 1.0 {
            g.axpy(-y, x, 1.0);
        }
    }
    g
}

/// Projected subgradient descent with step `c / sqrt(k)` and tail averaging
/// (the average over the second half of the iterates is returned). Exposed
/// for diagnostics; `solve_svm` uses it as a short warm-up phase before the
/// dual polish. Never reports convergence on its own.
pub fn subgradient_svm(
    spec: &LearnerSpec,
    set: &TeachingSet,
    iterations: usize,
    config: &SolverConfig,
) -> Result<SolveResult> {
    if spec.loss != LossKind::Hinge {
        return Err(Error::NotApplicable("subgradient solver requires the hinge loss"));
    }
    let d = infer_dim(spec, set)?;
    set.validate_for(spec, d)?;
    if set.is_empty() {
        return zero_data_result(spec, d);
    }
    let has_bias = !spec.homogeneous;
    let lambda_a = spec.effective_regularizer(d)? * spec.lambda;
    let xs: Vec<DVector<f64>> =
        set.items.iter().map(|it| effective_x(&it.x, has_bias)).collect();
    let ys: Vec<f64> = set.items.iter().map(|it| it.y).collect();
    let n = xs.len();

    // Any minimizer satisfies (lambda/2)||w||_A^2 <= f(0) = n, which for the
    // identity regularizer bounds ||w||; iterates are projected onto that
    // ball to keep early steps under control.
    let identity = spec.regularizer_is_identity();
    let w_radius = libm::sqrt(2.0 * n as f64 / spec.lambda) + 1.0;
    let max_x = set.items.iter().map(|it| it.x.norm()).fold(0.0f64, f64::max);
    let b_radius = 1.0 + w_radius * max_x;

    let mut rng = Rng::new(config.seed);
    let mut theta = random_init(lambda_a.nrows(), &mut rng, config.init_radius);
    let mut tail = DVector::<f64>::zeros(lambda_a.nrows());
    let mut tail_count = 0usize;
    let tail_start = iterations / 2;
    for k in 1..=iterations {
        let g = hinge_subgradient(&lambda_a, &xs, &ys, &theta);
        theta.axpy(-config.step_constant / libm::sqrt(k as f64), &g, 1.0);
        if identity {
            let wnorm = if has_bias {
                theta.rows(0, d).norm()
            } else {
                theta.norm()
            };
            if wnorm > w_radius {
                let scale = w_radius / wnorm;
                for i in 0..d {
                    theta[i] *= scale;
                }
                if !has_bias {
                    // Homogeneous: the whole vector is the weight vector.
                } else if libm::fabs(theta[d]) > b_radius {
                    theta[d] = theta[d].clamp(-b_radius, b_radius);
                }
            } else if has_bias && libm::fabs(theta[d]) > b_radius {
                theta[d] = theta[d].clamp(-b_radius, b_radius);
            }
        }
        if k > tail_start {
            tail += &theta;
            tail_count += 1;
        }
    }
    let avg = if tail_count > 0 { tail / tail_count as f64 } else { theta };
    let params = Parameters::from_effective(&avg, has_bias);
    let objective_value = objective(spec, set, &params)?;
    Ok(SolveResult { params, objective_value, iterations, converged: false, unique: true })
}

/// Square root and inverse square root of a full-rank PSD matrix, or `None`
/// when it is numerically rank-deficient.
fn psd_sqrt_pair(a: &DMatrix<f64>) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let se = a.clone().symmetric_eigen();
    let max = se.eigenvalues.iter().fold(0.0f64, |acc, e| acc.max(libm::fabs(*e)));
    if max == 0.0 || se.eigenvalues.iter().any(|e| *e <= DEFAULT_RANK_TOL * max) {
        return None;
    }
    let n = a.nrows();
    let mut sqrt = DMatrix::zeros(n, n);
    let mut inv_sqrt = DMatrix::zeros(n, n);
    for (i, e) in se.eigenvalues.iter().enumerate() {
        let v = se.eigenvectors.column(i).into_owned();
        sqrt.ger(libm::sqrt(*e), &v, &v, 1.0);
        inv_sqrt.ger(1.0 / libm::sqrt(*e), &v, &v, 1.0);
    }
    Some((sqrt, inv_sqrt))
}

/// Dual coordinate ascent for the homogeneous hinge problem on data `xt`
/// (already mapped through the inverse square root of the regularizer).
/// Returns the transformed weight vector, the number of epochs, and whether
/// the optimality criterion was met.
fn dual_cd_homogeneous(
    lambda: f64,
    xt: &[DVector<f64>],
    ys: &[f64],
    eps: f64,
    epoch_cap: usize,
    rng: &mut Rng,
) -> (DVector<f64>, usize, bool) {
    let n = xt.len();
    let d = xt[0].len();
    let q: Vec<f64> = xt.iter().map(|x| x.norm_squared()).collect();
    let mut beta: Vec<f64> = (0..n).map(|_| rng.unit()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
    let mut u = DVector::<f64>::zeros(d);
    for i in 0..n {
        u.axpy(beta[i] * ys[i] / lambda, &xt[i], 1.0);
    }
    let mut converged = false;
    let mut epochs = 0;
    while epochs < epoch_cap {
        epochs += 1;
        let mut worst = 0.0f64;
        for &i in &order {
            if q[i] == 0.0 {
                // The dual objective is increasing in this coordinate and the
                // primal does not depend on it.
                beta[i] = 1.0;
                continue;
            }
            let g = ys[i] * xt[i].dot(&u) - 1.0;
            let pg = if beta[i] <= 0.0 {
                g.min(0.0)
            } else if beta[i] >= 1.0 {
                g.max(0.0)
            } else {
                g
            };
            worst = worst.max(libm::fabs(pg));
            if pg != 0.0 {
                let next = (beta[i] - g * lambda / q[i]).clamp(0.0, 1.0);
                let delta = next - beta[i];
                if delta != 0.0 {
                    u.axpy(delta * ys[i] / lambda, &xt[i], 1.0);
                    beta[i] = next;
                }
            }
        }
        if worst <= eps {
            converged = true;
            break;
        }
    }
    (u, epochs, converged)
}

/// Pairwise working-set ascent for the inhomogeneous hinge dual, which
/// carries the equality constraint `sum beta_i y_i = 0` induced by the
/// unregularized bias. Returns the transformed weights, the recovered bias
/// (`None` when the data leave it undetermined), iteration count, and
/// convergence flag.
fn smo_inhomogeneous(
    lambda: f64,
    xt: &[DVector<f64>],
    ys: &[f64],
    eps: f64,
    iter_cap: usize,
    rng: &mut Rng,
) -> (DVector<f64>, Option<f64>, usize, bool) {
    let n = xt.len();
    let d = xt[0].len();

    // Random feasible start: clip a uniform draw, then shift it onto the
    // constraint plane by bisection on sum clip(beta_i - y_i c) y_i.
    let raw: Vec<f64> = (0..n).map(|_| rng.unit()).collect();
    let feasibility = |c: f64, raw: &[f64]| -> f64 {
        raw.iter()
            .zip(ys)
            .map(|(b, y)| (b - y * c).clamp(0.0, 1.0) * y)
            .sum()
    };
    let (mut lo, mut hi) = (-2.0, 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if feasibility(mid, &raw) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    let mut beta: Vec<f64> = raw.iter().zip(ys).map(|(b, y)| (b - y * c).clamp(0.0, 1.0)).collect();

    // Gram matrix; n is small for every supported workload.
    let mut gram = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = xt[i].dot(&xt[j]);
            gram[i * n + j] = v;
            gram[j * n + i] = v;
        }
    }

    let mut u = DVector::<f64>::zeros(d);
    for i in 0..n {
        u.axpy(beta[i] * ys[i] / lambda, &xt[i], 1.0);
    }
    let mut margins: Vec<f64> = xt.iter().map(|x| x.dot(&u)).collect();

    let in_up = |i: usize, beta: &[f64]| (ys[i] > 0.0 && beta[i] < 1.0) || (ys[i] < 0.0 && beta[i] > 0.0);
    let in_low = |i: usize, beta: &[f64]| (ys[i] < 0.0 && beta[i] < 1.0) || (ys[i] > 0.0 && beta[i] > 0.0);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < iter_cap {
        iterations += 1;
        // Most violating pair on F_i = y_i - m_i: b must sit above every
        // up-index value and below every low-index value.
        let mut i_up = None;
        let mut f_up = f64::NEG_INFINITY;
        let mut i_low = None;
        let mut f_low = f64::INFINITY;
        for i in 0..n {
            let f = ys[i] - margins[i];
            if in_up(i, &beta) && f > f_up {
                f_up = f;
                i_up = Some(i);
            }
            if in_low(i, &beta) && f < f_low {
                f_low = f;
                i_low = Some(i);
            }
        }
        let (Some(i), Some(j)) = (i_up, i_low) else {
            converged = true;
            break;
        };
        if f_up - f_low <= eps {
            converged = true;
            break;
        }

        // Move along beta_i += y_i s, beta_j -= y_j s, which preserves the
        // equality constraint; the curvature along it is ||x_i - x_j||^2.
        let quad = (gram[i * n + i] + gram[j * n + j] - 2.0 * gram[i * n + j]).max(0.0);
        let mut s_max = f64::INFINITY;
        s_max = s_max.min(if ys[i] > 0.0 { 1.0 - beta[i] } else { beta[i] });
        s_max = s_max.min(if ys[j] > 0.0 { beta[j] } else { 1.0 - beta[j] });
        let s = if quad > 1e-300 {
            (lambda * (f_up - f_low) / quad).min(s_max)
        } else {
            s_max
        };
        if !(s > 0.0) {
            converged = true;
            break;
        }
        beta[i] = (beta[i] + ys[i] * s).clamp(0.0, 1.0);
        beta[j] = (beta[j] - ys[j] * s).clamp(0.0, 1.0);
        u.axpy(s / lambda, &xt[i], 1.0);
        u.axpy(-s / lambda, &xt[j], 1.0);
        if iterations % 1024 == 0 {
            // Refresh incrementally updated margins.
            for (k, x) in xt.iter().enumerate() {
                margins[k] = x.dot(&u);
            }
        } else {
            for k in 0..n {
                margins[k] += s / lambda * (gram[k * n + i] - gram[k * n + j]);
            }
        }
    }
    for (k, x) in xt.iter().enumerate() {
        margins[k] = x.dot(&u);
    }

    // Bias from the box constraints: largest lower requirement vs smallest
    // upper requirement; interior multipliers pin it exactly.
    let mut b_lo = f64::NEG_INFINITY;
    let mut b_hi = f64::INFINITY;
    for i in 0..n {
        let f = ys[i] - margins[i];
        if in_up(i, &beta) {
            b_lo = b_lo.max(f);
        }
        if in_low(i, &beta) {
            b_hi = b_hi.min(f);
        }
    }
    let bias = if b_lo.is_finite() && b_hi.is_finite() {
        Some(0.5 * (b_lo + b_hi))
    } else {
        None
    };
    (u, bias, iterations, converged)
}

/// Hinge-loss trainer: a short projected-subgradient warm-up (kept for its
/// randomized initialization) followed by the exact dual polish. Requires a
/// full-rank regularizer; data are mapped through `A^{-1/2}` so the dual is
/// the standard box QP.
pub fn solve_svm(
    spec: &LearnerSpec,
    set: &TeachingSet,
    config: &SolverConfig,
) -> Result<SolveResult> {
    if spec.loss != LossKind::Hinge {
        return Err(Error::NotApplicable("svm solver requires the hinge loss"));
    }
    let d = infer_dim(spec, set)?;
    set.validate_for(spec, d)?;
    if set.is_empty() {
        return zero_data_result(spec, d);
    }
    let has_bias = !spec.homogeneous;

    let phase1_iters = config.max_iterations.unwrap_or(SUBGRADIENT_PHASE_ITERS).min(SUBGRADIENT_PHASE_ITERS);
    let warmup = subgradient_svm(spec, set, phase1_iters, config)?;

    let identity = spec.regularizer_is_identity();
    let transform = if identity {
        None
    } else {
        let a = spec.regularizer_matrix(d)?;
        match psd_sqrt_pair(&a) {
            Some(pair) => Some(pair),
            None => {
                // Rank-deficient regularizer: the objective is not strongly
                // convex in the weights and the dual route does not apply.
                return Ok(SolveResult { converged: false, ..warmup });
            }
        }
    };
    let map_x = |x: &crate::model::Vector| -> DVector<f64> {
        match &transform {
            None => x.dv().clone(),
            Some((_, inv_sqrt)) => inv_sqrt * x.dv(),
        }
    };
    let xt: Vec<DVector<f64>> = set.items.iter().map(|it| map_x(&it.x)).collect();
    let ys: Vec<f64> = set.items.iter().map(|it| it.y).collect();

    // Optimality threshold, relative to the scale of the dual gradient.
    let scale = 1.0
        + xt.iter()
            .map(|x| x.norm_squared())
            .fold(0.0f64, f64::max)
            * (set.size() as f64 / spec.lambda + 1.0);
    let eps = config.tolerance.unwrap_or(DEFAULT_HINGE_TOL) * scale;

    let mut rng = Rng::derive(config.seed, 0x5d0);
    let (u, bias, polish_iters, converged) = if has_bias {
        let (u, bias, it, ok) =
            smo_inhomogeneous(spec.lambda, &xt, &ys, eps, SMO_ITER_CAP, &mut rng);
        (u, bias, it, ok && bias_defined(bias))
    } else {
        let (u, it, ok) = dual_cd_homogeneous(spec.lambda, &xt, &ys, eps, DUAL_EPOCH_CAP, &mut rng);
        (u, None, it, ok)
    };

    let w = match &transform {
        None => u,
        Some((_, inv_sqrt)) => inv_sqrt * u,
    };
    let params = if has_bias {
        Parameters::from_effective(
            &{
                let mut v = DVector::zeros(d + 1);
                v.rows_mut(0, d).copy_from(&w);
                v[d] = bias.unwrap_or(0.0);
                v
            },
            true,
        )
    } else {
        Parameters::from_effective(&w, false)
    };
    let objective_value = objective(spec, set, &params)?;
    Ok(SolveResult {
        params,
        objective_value,
        iterations: phase1_iters + polish_iters,
        converged,
        unique: true,
    })
}

fn bias_defined(b: Option<f64>) -> bool {
    matches!(b, Some(v) if v.is_finite())
}

/// Train the learner on the set, routing to the loss-specific solver.
pub fn train(spec: &LearnerSpec, set: &TeachingSet, config: &SolverConfig) -> Result<SolveResult> {
    match spec.loss {
        LossKind::Squared => solve_ridge(spec, set),
        LossKind::Logistic => solve_logistic(spec, set, config),
        LossKind::Hinge => solve_svm(spec, set, config),
    }
}
