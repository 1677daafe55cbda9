//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p teachdim --test acceptance -- --nocapture` to see
//! the lines as they complete.

use std::time::Instant;

use teachdim::tables::{run_cell, sample_target, ALL_LEARNERS};
use teachdim_core::lambert::{lambert_w0, tau_inverse, tau_max, BRANCH_POINT};
use teachdim_core::model::{
    LearnerSpec, LossKind, TargetModel, TeachingGoal, Vector,
};
use teachdim_core::oracle::{falsify_smaller_sets, finite_difference_grad_check, tau_inverse_bisection};
use teachdim_core::rng::{splitmix64, Rng};
use teachdim_core::verify::{uniqueness_probe_with_seeds, verify_teaching_set, VerifyConfig};

const LAMBDAS: [f64; 5] = [0.3, 1.0, 2.5, 5.0, 9.7];
const DIMS: [usize; 4] = [1, 2, 5, 20];
const TARGETS_PER_CELL: usize = 5;
const SUITE_SEED: u64 = 1;

fn ceil_nudge(z: f64) -> usize {
    let c = (z - 1e-12).ceil();
    if c < 1.0 {
        1
    } else {
        c as usize
    }
}

fn report(criterion: u32, description: &str, violations: &[String]) {
    if violations.is_empty() {
        println!("acceptance criterion {criterion}: PASS - {description}");
    } else {
        println!(
            "acceptance criterion {criterion}: FAIL - {description} ({} violations)",
            violations.len()
        );
        for v in violations.iter().take(10) {
            println!("  {v}");
        }
        panic!("criterion {criterion} failed");
    }
}

fn expected_size(loss: LossKind, homogeneous: bool, lambda: f64, s: f64) -> usize {
    match (loss, homogeneous) {
        (LossKind::Squared, true) => 1,
        (LossKind::Hinge, true) => ceil_nudge(lambda * s),
        (LossKind::Logistic, true) => ceil_nudge(lambda * s / tau_max()),
        (LossKind::Squared, false) => 2,
        (LossKind::Hinge, false) => 2 * ceil_nudge(lambda * s / 2.0),
        (LossKind::Logistic, false) => 2 * ceil_nudge(lambda * s / (2.0 * tau_max())),
    }
}

fn grid_cells(
    goal: TeachingGoal,
) -> impl Iterator<Item = (LossKind, bool, f64, usize, usize)> {
    ALL_LEARNERS
        .into_iter()
        .filter(move |(loss, _)| goal == TeachingGoal::ExactParameter || loss.is_classification())
        .flat_map(|(loss, homogeneous)| {
            LAMBDAS.into_iter().flat_map(move |lambda| {
                DIMS.into_iter().flat_map(move |dim| {
                    (0..TARGETS_PER_CELL).map(move |t| (loss, homogeneous, lambda, dim, t))
                })
            })
        })
}

fn cell_rng(loss: LossKind, homogeneous: bool, lambda: f64, dim: usize, t: usize) -> Rng {
    let tag = (loss as u64) << 40
        | (homogeneous as u64) << 32
        | ((lambda * 10.0) as u64) << 16
        | (dim as u64) << 8
        | t as u64;
    Rng::derive(SUITE_SEED, tag)
}

const TARGET_SCALES: [f64; 5] = [1.0, 1.0, 1.0, 0.5, 2.0];

/// Criterion 1: exact-parameter construction sizes match the closed forms on
/// the full grid and every construction verifies at the stated tolerances.
#[test]
fn criterion_1_exact_parameter_sizes_and_verification() {
    let start = Instant::now();
    let mut violations = Vec::new();
    for (loss, homogeneous, lambda, dim, t) in grid_cells(TeachingGoal::ExactParameter) {
        let mut rng = cell_rng(loss, homogeneous, lambda, dim, t);
        let scale = TARGET_SCALES[t % TARGET_SCALES.len()];
        let target =
            sample_target(&mut rng, dim, homogeneous, scale, TeachingGoal::ExactParameter);
        let (outcome, _) =
            run_cell(loss, homogeneous, lambda, &target, rng.next_u64()).expect("cell");
        let s = target.weights.norm_sq();
        let expect = expected_size(loss, homogeneous, lambda, s);
        if outcome.constructed_size != expect {
            violations.push(format!(
                "{loss:?} hom={homogeneous} lambda={lambda} d={dim} s={s}: size {} != {expect}",
                outcome.constructed_size
            ));
        }
        if !outcome.verified {
            violations.push(format!(
                "{loss:?} hom={homogeneous} lambda={lambda} d={dim} s={s}: verification failed"
            ));
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "runtime {elapsed:?} exceeds 2 minutes");
    report(
        1,
        &format!("construction sizes match closed forms and verify on 600 cells ({elapsed:.0?})"),
        &violations,
    );
}

/// Criterion 2: decision-boundary constructions have sizes (1, 1, 2, 2) and
/// the retrained model agrees in sign with the original boundary on 1000
/// probes per cell.
#[test]
fn criterion_2_decision_boundary_sizes_and_sign_agreement() {
    let start = Instant::now();
    let mut violations = Vec::new();
    for (loss, homogeneous, lambda, dim, t) in grid_cells(TeachingGoal::DecisionBoundary) {
        let mut rng = cell_rng(loss, homogeneous, lambda, dim, t.wrapping_add(64));
        let scale = TARGET_SCALES[t % TARGET_SCALES.len()];
        let target =
            sample_target(&mut rng, dim, homogeneous, scale, TeachingGoal::DecisionBoundary);
        let (outcome, _) =
            run_cell(loss, homogeneous, lambda, &target, rng.next_u64()).expect("cell");
        let expect = if homogeneous { 1 } else { 2 };
        if outcome.constructed_size != expect {
            violations.push(format!(
                "{loss:?} hom={homogeneous} lambda={lambda} d={dim}: boundary size {} != {expect}",
                outcome.constructed_size
            ));
        }
        // run_cell's boundary mode requires unanimous sign agreement on its
        // 1000 probes for `verified`.
        if !outcome.verified {
            violations.push(format!(
                "{loss:?} hom={homogeneous} lambda={lambda} d={dim}: boundary verification failed"
            ));
        }
    }
    let elapsed = start.elapsed();
    report(
        2,
        &format!("boundary sizes are (1,1,2,2) with unanimous sign agreement ({elapsed:.0?})"),
        &violations,
    );
}

/// Criterion 3: the three lower bounds match their closed forms on the grid,
/// the combined bound never exceeds the constructed size, and the gap is at
/// most one and occurs only for the inhomogeneous margin learners.
#[test]
fn criterion_3_lower_bound_closed_forms() {
    let mut violations = Vec::new();
    for (loss, homogeneous, lambda, dim, t) in grid_cells(TeachingGoal::ExactParameter) {
        let mut rng = cell_rng(loss, homogeneous, lambda, dim, t.wrapping_add(128));
        let scale = TARGET_SCALES[t % TARGET_SCALES.len()];
        let target =
            sample_target(&mut rng, dim, homogeneous, scale, TeachingGoal::ExactParameter);
        let (outcome, _) =
            run_cell(loss, homogeneous, lambda, &target, rng.next_u64()).expect("cell");
        let s = target.weights.norm_sq();

        let lb1_expect = if homogeneous { 1 } else { 2 };
        let lb2_expect = match (loss, homogeneous) {
            (LossKind::Hinge, true) => ceil_nudge(lambda * s),
            (LossKind::Logistic, true) => ceil_nudge(lambda * s / tau_max()),
            _ => 0,
        };
        let lb3_expect = match (loss, homogeneous) {
            (LossKind::Hinge, false) => Some(ceil_nudge(lambda * s)),
            (LossKind::Logistic, false) => Some(ceil_nudge(lambda * s / tau_max())),
            _ => None,
        };
        let tag = format!("{loss:?} hom={homogeneous} lambda={lambda} d={dim}");
        if outcome.lb1 != lb1_expect {
            violations.push(format!("{tag}: lb1 {} != {lb1_expect}", outcome.lb1));
        }
        if outcome.lb2 != lb2_expect {
            violations.push(format!("{tag}: lb2 {} != {lb2_expect}", outcome.lb2));
        }
        if outcome.lb3 != lb3_expect {
            violations.push(format!("{tag}: lb3 {:?} != {lb3_expect:?}", outcome.lb3));
        }
        if outcome.combined > outcome.constructed_size {
            violations.push(format!(
                "{tag}: combined {} exceeds size {}",
                outcome.combined, outcome.constructed_size
            ));
        }
        let gap = outcome.constructed_size - outcome.combined;
        if gap > 1 {
            violations.push(format!("{tag}: gap {gap} > 1"));
        }
        let margin_inhom = !homogeneous && loss != LossKind::Squared;
        if gap == 1 && !margin_inhom {
            violations.push(format!("{tag}: unexpected rounding gap"));
        }
    }
    report(3, "lb1/lb2/lb3 match closed forms; gap <= 1 only for inhom margin", &violations);
}

/// Criterion 4: tau_max approximates 0.2785 and the Lambert W residual stays
/// below 1e-12 * max(1, |x|) across [-1/e, 700].
#[test]
fn criterion_4_lambert_w_residual_grid() {
    let mut violations = Vec::new();
    if (tau_max() - 0.2785).abs() > 5e-5 {
        violations.push(format!("tau_max {} not within 5e-5 of 0.2785", tau_max()));
    }
    let n = 1000;
    for i in 0..=n {
        let x = BRANCH_POINT + (700.0 - BRANCH_POINT) * (i as f64) / (n as f64);
        let w = lambert_w0(x).expect("domain");
        let residual = (w * w.exp() - x).abs();
        if residual > 1e-12 * x.abs().max(1.0) {
            violations.push(format!("x={x}: residual {residual}"));
        }
    }
    report(4, "tau_max = 0.2785 +/- 5e-5; W residual <= 1e-12 max(1,|x|) on 1000-point grid", &violations);
}

/// Criterion 5: tau_inverse round-trips to 1e-10 and agrees with the
/// bisection oracle to 1e-9 on 1000 points of (0, tau_max].
#[test]
fn criterion_5_tau_inverse_roundtrip_and_oracle() {
    let mut violations = Vec::new();
    for i in 1..=1000 {
        let a = tau_max() * (i as f64) / 1000.0;
        let t = tau_inverse(a).expect("domain");
        let back = t / (1.0 + t.exp());
        if (back - a).abs() > 1e-10 {
            violations.push(format!("a={a}: roundtrip error {}", (back - a).abs()));
        }
        let t_oracle = tau_inverse_bisection(a).expect("domain");
        if (t - t_oracle).abs() > 1e-9 {
            violations.push(format!("a={a}: |{t} - {t_oracle}| > 1e-9"));
        }
    }
    report(5, "tau_inverse round-trip <= 1e-10 and bisection agreement <= 1e-9", &violations);
}

/// Criterion 6: randomized below-bound sets never teach. Homogeneous SVM
/// with TD 3 gets 10000 two-item sets; inhomogeneous ridge gets 10000
/// one-item sets.
#[test]
fn criterion_6_falsification_sweeps() {
    let start = Instant::now();
    let mut violations = Vec::new();

    let svm = LearnerSpec::new(LossKind::Hinge, true, 2.5).unwrap();
    let svm_target = TargetModel::exact(Vector::from_slice(&[1.0, 0.0]).unwrap(), None).unwrap();
    let r = falsify_smaller_sets(&svm, &svm_target, 2, 10_000, None, SUITE_SEED).unwrap();
    if r.successes != 0 {
        violations.push(format!("hom svm: {} of {} random 2-item sets taught", r.successes, r.trials));
    }

    let ridge = LearnerSpec::new(LossKind::Squared, false, 1.0).unwrap();
    let ridge_target =
        TargetModel::exact(Vector::from_slice(&[0.6, -0.8]).unwrap(), Some(0.5)).unwrap();
    let r = falsify_smaller_sets(&ridge, &ridge_target, 1, 10_000, None, SUITE_SEED + 1).unwrap();
    if r.successes != 0 {
        violations.push(format!("inhom ridge: {} of {} random 1-item sets taught", r.successes, r.trials));
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 300, "runtime {elapsed:?} exceeds 5 minutes");
    report(6, &format!("0 teachings in 2x10000 below-bound random sets ({elapsed:.0?})"), &violations);
}

/// Criterion 7: 100 random-restart solves agree on every constructed set,
/// and bias perturbations strictly increase the inhomogeneous SVM objective.
#[test]
fn criterion_7_uniqueness_probing() {
    let start = Instant::now();
    let mut violations = Vec::new();
    let seeds: Vec<u64> = (0..100).map(|i| splitmix64(SUITE_SEED ^ (i + 0x700))).collect();
    for (loss, homogeneous) in ALL_LEARNERS {
        for lambda in [0.3, 2.5] {
            for dim in [2usize, 5] {
                let mut rng = Rng::derive(SUITE_SEED, 0x7000 + dim as u64);
                let target =
                    sample_target(&mut rng, dim, homogeneous, 1.0, TeachingGoal::ExactParameter);
                let spec = LearnerSpec::new(loss, homogeneous, lambda).unwrap();
                let set = teachdim_core::construct::teach(
                    &spec,
                    &target,
                    &Default::default(),
                )
                .unwrap();
                let outcome = uniqueness_probe_with_seeds(
                    &spec,
                    &set,
                    &target.params(),
                    &seeds,
                    &VerifyConfig::default(),
                )
                .unwrap();
                let tol = if loss == LossKind::Hinge { 1e-3 } else { 1e-6 };
                let tag = format!("{loss:?} hom={homogeneous} lambda={lambda} d={dim}");
                if !outcome.all_converged {
                    violations.push(format!("{tag}: a restart did not converge"));
                }
                if outcome.spread > tol {
                    violations.push(format!("{tag}: spread {} > {tol}", outcome.spread));
                }
                if outcome.bias_witness == Some(false) {
                    violations.push(format!("{tag}: bias perturbation failed to increase objective"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        7,
        &format!("100-restart agreement and bias-perturbation witness ({elapsed:.0?})"),
        &violations,
    );
}

/// Criterion 8: analytic gradients match central finite differences.
#[test]
fn criterion_8_gradient_oracle() {
    let mut violations = Vec::new();
    for (loss, label) in [
        (LossKind::Squared, "squared"),
        (LossKind::Logistic, "logistic"),
        (LossKind::Hinge, "hinge (off-kink)"),
    ] {
        let worst = finite_difference_grad_check(loss, 1000, SUITE_SEED).unwrap();
        if worst > 1e-6 {
            violations.push(format!("{label}: max error {worst}"));
        }
    }
    report(8, "analytic vs central-difference gradients <= 1e-6 on 1000 points", &violations);
}

/// Criterion 9: deleting any single item from a construction whose size
/// equals the combined lower bound breaks verification.
#[test]
fn criterion_9_monotone_failure() {
    let start = Instant::now();
    let mut violations = Vec::new();
    for (loss, homogeneous) in ALL_LEARNERS {
        let mut rng = Rng::derive(SUITE_SEED, 0x900 + loss as u64 + (homogeneous as u64) << 4);
        let mut cells = 0;
        let mut attempts = 0;
        while cells < 10 && attempts < 400 {
            attempts += 1;
            let lambda = rng.range(0.3, 2.5);
            let dim = 1 + (rng.next_u64() % 4) as usize;
            let target =
                sample_target(&mut rng, dim, homogeneous, 1.0, TeachingGoal::ExactParameter);
            let spec = LearnerSpec::new(loss, homogeneous, lambda).unwrap();
            let set =
                teachdim_core::construct::teach(&spec, &target, &Default::default()).unwrap();
            let combined = teachdim_core::bounds::lower_bound(&spec, &target).unwrap();
            if set.size() != combined || set.is_empty() {
                continue;
            }
            cells += 1;
            for drop in 0..set.size() {
                let mut smaller = set.clone();
                smaller.items.remove(drop);
                let cfg = VerifyConfig::default().with_seed(rng.next_u64());
                let report = verify_teaching_set(&spec, &smaller, &target, &cfg).unwrap();
                if report.passed {
                    violations.push(format!(
                        "{loss:?} hom={homogeneous} lambda={lambda} d={dim}: item {drop} deleted but still verified"
                    ));
                }
            }
        }
        if cells < 10 {
            violations.push(format!(
                "{loss:?} hom={homogeneous}: only {cells} minimal cells found"
            ));
        }
    }
    let elapsed = start.elapsed();
    report(9, &format!("single-item deletion always breaks verification ({elapsed:.0?})"), &violations);
}
