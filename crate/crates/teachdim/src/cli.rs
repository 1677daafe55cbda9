//! Command-line interface: argument definitions and command execution.
//!
//! Exit codes are a stable contract: 0 success, 1 verification failure,
//! 2 usage or validation error (validation failures print a
//! machine-readable `{"error": {"code", "message"}}` object on stderr).

use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use teachdim_core::bounds::bound_report;
use teachdim_core::construct::{teach, ConstructionOptions};
use teachdim_core::model::{
    LearnerSpec, LossKind, TargetModel, TeachingGoal, TeachingSet, Vector,
};
use teachdim_core::oracle::falsify_smaller_sets;
use teachdim_core::verify::{verify_teaching_set, VerifyConfig};

use crate::error::CliError;
use crate::json::{
    BoundReportJson, ErrorBody, ErrorJson, FalsificationReportJson, TeachingSetJson,
    VerifyReportJson,
};
use crate::tables::{render_text, run_grid, GridOptions};

#[derive(Debug, Parser)]
#[command(
    name = "teachdim",
    version,
    about = "Teaching dimension of regularized linear learners: bounds, minimal teaching sets, and verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct a minimal teaching set for a target model
    Construct(ConstructArgs),
    /// Report the lower bounds and the closed-form teaching dimension
    Bounds(BoundsArgs),
    /// Verify that a training set teaches a target (exit 1 if it does not)
    Verify(VerifyArgs),
    /// Randomized search for below-bound teaching sets; expect zero hits
    Falsify(FalsifyArgs),
    /// Sweep a learner grid, verify every construction, and tabulate
    Tables(TablesArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LearnerArg {
    Ridge,
    Svm,
    Logistic,
}

impl LearnerArg {
    fn loss(self) -> LossKind {
        match self {
            LearnerArg::Ridge => LossKind::Squared,
            LearnerArg::Svm => LossKind::Hinge,
            LearnerArg::Logistic => LossKind::Logistic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
pub enum GoalArg {
    Parameter,
    Boundary,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Learner family
    #[arg(long, value_enum)]
    pub learner: LearnerArg,
    /// Homogeneous model, no bias term (implied by --theta)
    #[arg(long, conflicts_with = "inhomogeneous")]
    pub homogeneous: bool,
    /// Inhomogeneous model with an unregularized bias (implied by --w)
    #[arg(long)]
    pub inhomogeneous: bool,
    /// Regularization coefficient (> 0)
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Homogeneous target parameter theta*, comma-separated decimals
    #[arg(long, value_name = "CSV", conflicts_with_all = ["w", "b"])]
    pub theta: Option<String>,
    /// Inhomogeneous target weights w*, comma-separated decimals
    #[arg(long, value_name = "CSV")]
    pub w: Option<String>,
    /// Inhomogeneous target bias b* (default 0)
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Teaching goal: exact parameter or decision boundary
    #[arg(long, value_enum, default_value = "parameter")]
    pub goal: GoalArg,
}

fn parse_csv(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|e| CliError::new("parse_error", format!("bad number {tok:?}: {e}")))
        })
        .collect()
}

impl ModelArgs {
    pub fn resolve(&self) -> Result<(LearnerSpec, TargetModel), CliError> {
        if !self.lambda.is_finite() || self.lambda <= 0.0 {
            return Err(CliError::new(
                "invalid_lambda",
                format!("lambda must be positive and finite, got {}", self.lambda),
            ));
        }
        let (weights, bias, homogeneous) = match (&self.theta, &self.w) {
            (Some(theta), None) => {
                if self.inhomogeneous {
                    return Err(CliError::new(
                        "bias_mismatch",
                        "--theta specifies a homogeneous target; use --w/--b with --inhomogeneous",
                    ));
                }
                (Vector::new(parse_csv(theta)?)?, None, true)
            }
            (None, Some(w)) => {
                if self.homogeneous {
                    return Err(CliError::new(
                        "bias_mismatch",
                        "--w specifies an inhomogeneous target; use --theta with --homogeneous",
                    ));
                }
                (Vector::new(parse_csv(w)?)?, Some(self.b.unwrap_or(0.0)), false)
            }
            _ => {
                return Err(CliError::new(
                    "missing_target",
                    "specify exactly one of --theta (homogeneous) or --w [--b] (inhomogeneous)",
                ))
            }
        };
        let spec = LearnerSpec::new(self.learner.loss(), homogeneous, self.lambda)?;
        let target = match self.goal {
            GoalArg::Parameter => TargetModel::exact(weights, bias)?,
            GoalArg::Boundary => TargetModel::boundary(weights, bias)?,
        };
        Ok((spec, target))
    }
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Free scale of the ridge constructions (nonzero)
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub scale_a: f64,
    /// Offset orthogonal to w* for the inhomogeneous margin constructions
    #[arg(long, value_name = "CSV")]
    pub offset: Option<String>,
    /// Override the decision-boundary scaling t (default: largest safe t)
    #[arg(long)]
    pub boundary_scale: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Teaching-set JSON file; "-" or absent reads standard input
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Seed for solver initialization (env TEACHDIM_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// KKT residual tolerance override
    #[arg(long)]
    pub tol_kkt: Option<f64>,
    /// Parameter-recovery tolerance override
    #[arg(long)]
    pub tol_recovery: Option<f64>,
    /// Objective-gap tolerance override
    #[arg(long)]
    pub tol_gap: Option<f64>,
    /// Uniqueness-spread tolerance override
    #[arg(long)]
    pub tol_spread: Option<f64>,
    /// Random restarts in the uniqueness probe
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    /// Solver iteration cap override
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FalsifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Candidate set size; must be below the combined lower bound
    #[arg(long)]
    pub size: usize,
    /// Number of random candidate sets
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Sampling box half-width (default 5 (1 + ||theta*||))
    #[arg(long)]
    pub box_radius: Option<f64>,
    /// Seed (env TEACHDIM_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Grid of regularization coefficients
    #[arg(long, value_name = "CSV", default_value = "0.3,1,2.5,5")]
    pub lambdas: String,
    /// Grid of feature dimensions
    #[arg(long, value_name = "CSV", default_value = "2,5")]
    pub dims: String,
    /// Random targets per (learner, lambda, dim) cell
    #[arg(long, default_value_t = 3)]
    pub targets_per_cell: usize,
    /// Teaching goal for the sweep
    #[arg(long, value_enum, default_value = "parameter")]
    pub goal: GoalArg,
    /// Seed (env TEACHDIM_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    pub format: TableFormat,
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TableFormat {
    Text,
    Json,
}

fn env_seed() -> u64 {
    std::env::var("TEACHDIM_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn to_pretty<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Construct(args) => cmd_construct(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Falsify(args) => cmd_falsify(args),
        Command::Tables(args) => cmd_tables(args),
    }
}

fn cmd_construct(args: ConstructArgs) -> Result<i32, CliError> {
    let (spec, target) = args.model.resolve()?;
    let offset = match &args.offset {
        Some(csv) => Some(Vector::new(parse_csv(csv)?)?),
        None => None,
    };
    let opts = ConstructionOptions {
        scale_a: args.scale_a,
        orthogonal_offset: offset,
        boundary_scale: args.boundary_scale,
    };
    let set = teach(&spec, &target, &opts)?;
    emit(&args.output, &to_pretty(&TeachingSetJson::from_core(&set))?)?;
    Ok(0)
}

fn cmd_bounds(args: BoundsArgs) -> Result<i32, CliError> {
    let (spec, target) = args.model.resolve()?;
    let report = bound_report(&spec, &target)?;
    emit(&args.output, &to_pretty(&BoundReportJson::from(&report))?)?;
    Ok(0)
}

fn read_teaching_set(input: &Option<PathBuf>) -> Result<TeachingSet, CliError> {
    let raw = match input {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path)?,
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    let parsed: TeachingSetJson = serde_json::from_str(&raw)?;
    parsed.to_core()
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, CliError> {
    let (spec, target) = args.model.resolve()?;
    if target.goal != TeachingGoal::ExactParameter {
        return Err(CliError::new(
            "not_applicable",
            "verify certifies exact-parameter teaching; boundary goals are scaled inside construct",
        ));
    }
    let set = read_teaching_set(&args.input)?;
    let seed = args.seed.unwrap_or_else(env_seed);
    let mut cfg = VerifyConfig {
        kkt_tol: args.tol_kkt,
        recovery_tol: args.tol_recovery,
        spread_tol: args.tol_spread,
        restarts: args.restarts,
        ..VerifyConfig::default()
    };
    if let Some(gap) = args.tol_gap {
        cfg.gap_tol = gap;
    }
    cfg.solver.seed = seed;
    cfg.solver.max_iterations = args.max_iter;
    let report = verify_teaching_set(&spec, &set, &target, &cfg)?;
    emit(&args.output, &to_pretty(&VerifyReportJson::from_core(&report, seed))?)?;
    Ok(if report.passed { 0 } else { 1 })
}

fn cmd_falsify(args: FalsifyArgs) -> Result<i32, CliError> {
    let (spec, target) = args.model.resolve()?;
    let seed = args.seed.unwrap_or_else(env_seed);
    let report =
        falsify_smaller_sets(&spec, &target, args.size, args.trials, args.box_radius, seed)?;
    emit(&args.output, &to_pretty(&FalsificationReportJson::from_core(&report, seed))?)?;
    Ok(if report.successes == 0 { 0 } else { 1 })
}

fn cmd_tables(args: TablesArgs) -> Result<i32, CliError> {
    let lambdas = parse_csv(&args.lambdas)?;
    let dims = parse_csv(&args.dims)?
        .into_iter()
        .map(|d| {
            if d >= 1.0 && d.fract() == 0.0 {
                Ok(d as usize)
            } else {
                Err(CliError::new("parse_error", format!("bad dimension {d}")))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let seed = args.seed.unwrap_or_else(env_seed);
    let opts = GridOptions {
        lambdas,
        dims,
        targets_per_cell: args.targets_per_cell,
        seed,
        goal: match args.goal {
            GoalArg::Parameter => TeachingGoal::ExactParameter,
            GoalArg::Boundary => TeachingGoal::DecisionBoundary,
        },
    };
    let cells = run_grid(&opts)?;
    let all_pass = cells.iter().all(|c| c.verified);
    let content = match args.format {
        TableFormat::Text => format!("seed: {seed}\n{}", render_text(&cells)),
        TableFormat::Json => to_pretty(&serde_json::json!({ "seed": seed, "cells": cells }))?,
    };
    emit(&args.output, &content)?;
    Ok(if all_pass { 0 } else { 1 })
}

pub fn render_error(e: &CliError) -> String {
    serde_json::to_string(&ErrorJson {
        error: ErrorBody { code: e.code.clone(), message: e.message.clone() },
    })
    .unwrap_or_else(|_| format!("{{\"error\":{{\"code\":\"{}\"}}}}", e.code))
}
