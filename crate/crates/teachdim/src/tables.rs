//! Grid sweeps over the six learners: construct, verify, and compare against
//! the closed-form teaching dimensions. Backs the `tables` subcommand and
//! the acceptance suite.

use serde::Serialize;
use teachdim_core::bounds::{bound_report, BoundReport};
use teachdim_core::construct::{teach, ConstructionOptions};
use teachdim_core::model::{LearnerSpec, LossKind, TargetModel, TeachingGoal, Vector};
use teachdim_core::rng::{splitmix64, Rng};
use teachdim_core::solvers::train;
use teachdim_core::verify::{boundary_sign_agreement, verify_teaching_set, VerifyConfig};

use crate::error::CliError;
use crate::json::TdJson;

pub const ALL_LEARNERS: [(LossKind, bool); 6] = [
    (LossKind::Squared, true),
    (LossKind::Hinge, true),
    (LossKind::Logistic, true),
    (LossKind::Squared, false),
    (LossKind::Hinge, false),
    (LossKind::Logistic, false),
];

pub fn loss_name(loss: LossKind) -> &'static str {
    match loss {
        LossKind::Squared => "ridge",
        LossKind::Hinge => "svm",
        LossKind::Logistic => "logistic",
    }
}

#[derive(Debug, Clone)]
pub struct GridOptions {
    pub lambdas: Vec<f64>,
    pub dims: Vec<usize>,
    pub targets_per_cell: usize,
    pub seed: u64,
    pub goal: TeachingGoal,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            lambdas: vec![0.3, 1.0, 2.5, 5.0],
            dims: vec![2, 5],
            targets_per_cell: 3,
            seed: 0,
            goal: TeachingGoal::ExactParameter,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellOutcome {
    pub learner: &'static str,
    pub homogeneous: bool,
    pub lambda: f64,
    pub dim: usize,
    pub target_norm: f64,
    pub lb1: usize,
    pub lb2: usize,
    pub lb3: Option<usize>,
    pub combined: usize,
    pub td: TdJson,
    pub constructed_size: usize,
    pub verified: bool,
}

/// Norm multipliers cycled per cell: unit targets plus down- and up-scaled
/// copies.
const TARGET_SCALES: [f64; 5] = [1.0, 1.0, 1.0, 0.5, 2.0];

pub fn sample_target(
    rng: &mut Rng,
    dim: usize,
    homogeneous: bool,
    scale: f64,
    goal: TeachingGoal,
) -> TargetModel {
    let w = Vector::new(rng.unit_vector(dim)).unwrap().scale(scale);
    let bias = if homogeneous { None } else { Some(rng.range(-2.0, 2.0)) };
    match goal {
        TeachingGoal::ExactParameter => TargetModel::exact(w, bias).unwrap(),
        TeachingGoal::DecisionBoundary => TargetModel::boundary(w, bias).unwrap(),
    }
}

/// Run one (learner, lambda, dim, target) cell: construct the teaching set,
/// verify it, and collect the bounds. For the decision-boundary goal the
/// verification targets the scaled parameter and additionally requires
/// unanimous sign agreement on 1000 random probes.
pub fn run_cell(
    loss: LossKind,
    homogeneous: bool,
    lambda: f64,
    target: &TargetModel,
    seed: u64,
) -> Result<(CellOutcome, BoundReport), CliError> {
    let spec = LearnerSpec::new(loss, homogeneous, lambda)?;
    let report = bound_report(&spec, target)?;
    let set = teach(&spec, target, &ConstructionOptions::default())?;
    let cfg = VerifyConfig::default().with_seed(seed);

    let verified = match target.goal {
        TeachingGoal::ExactParameter => {
            verify_teaching_set(&spec, &set, target, &cfg)?.passed
        }
        TeachingGoal::DecisionBoundary => {
            let scaled = target.params().scale(set.scale_factor);
            let scaled_target = TargetModel::exact(scaled.weights.clone(), scaled.bias)?;
            let exact_ok = verify_teaching_set(&spec, &set, &scaled_target, &cfg)?.passed;
            let trained = train(&spec, &set, &cfg.solver)?;
            let box_radius = 5.0 * (1.0 + target.params().effective_norm());
            let agreement = boundary_sign_agreement(
                &trained.params,
                &target.params(),
                1000,
                box_radius,
                splitmix64(seed ^ 0xa9),
            )?;
            exact_ok && agreement.agreeing == agreement.checked
        }
    };

    let outcome = CellOutcome {
        learner: loss_name(loss),
        homogeneous,
        lambda,
        dim: target.weight_dim(),
        target_norm: target.weights.norm(),
        lb1: report.lb1,
        lb2: report.lb2,
        lb3: report.lb3,
        combined: report.combined,
        td: report.td.into(),
        constructed_size: set.size(),
        verified,
    };
    Ok((outcome, report))
}

/// Sweep the whole grid. Decision-boundary mode covers the four classifiers;
/// exact mode covers all six learners.
pub fn run_grid(opts: &GridOptions) -> Result<Vec<CellOutcome>, CliError> {
    let mut out = Vec::new();
    let mut cell_index = 0u64;
    for (loss, homogeneous) in ALL_LEARNERS {
        if opts.goal == TeachingGoal::DecisionBoundary && !loss.is_classification() {
            continue;
        }
        for &lambda in &opts.lambdas {
            for &dim in &opts.dims {
                for t in 0..opts.targets_per_cell {
                    cell_index += 1;
                    let mut rng = Rng::derive(opts.seed, cell_index);
                    let scale = TARGET_SCALES[t % TARGET_SCALES.len()];
                    let target = sample_target(&mut rng, dim, homogeneous, scale, opts.goal);
                    let (outcome, _) = run_cell(
                        loss,
                        homogeneous,
                        lambda,
                        &target,
                        splitmix64(opts.seed ^ cell_index),
                    )?;
                    out.push(outcome);
                }
            }
        }
    }
    Ok(out)
}

pub fn render_text(cells: &[CellOutcome]) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "{:<9} {:<6} {:>7} {:>4} {:>6} {:>4} {:>4} {:>4} {:>9} {:>7} {:>5} {:>9}\n",
        "learner", "form", "lambda", "dim", "norm", "lb1", "lb2", "lb3", "combined", "td", "size", "verified"
    ));
    for c in cells {
        let td = match c.td {
            TdJson::Exact(n) => format!("{n}"),
            TdJson::Interval { lo, hi } => format!("[{lo},{hi}]"),
        };
        s.push_str(&format!(
            "{:<9} {:<6} {:>7.3} {:>4} {:>6.3} {:>4} {:>4} {:>4} {:>9} {:>7} {:>5} {:>9}\n",
            c.learner,
            if c.homogeneous { "hom" } else { "inhom" },
            c.lambda,
            c.dim,
            c.target_norm,
            c.lb1,
            c.lb2,
            c.lb3.map_or_else(|| "-".to_string(), |v| v.to_string()),
            c.combined,
            td,
            c.constructed_size,
            if c.verified { "pass" } else { "FAIL" },
        ));
    }
    let failures = cells.iter().filter(|c| !c.verified).count();
    s.push_str(&format!(
        "\n{} cells, {} failed\n",
        cells.len(),
        failures
    ));
    s
}
