//! JSON wire formats for teaching sets and reports.
//!
//! Serialization goes through serde_json, which prints floats with the
//! shortest decimal representation that round-trips exactly, so piping
//! `construct` output into `verify` reproduces identical values.

use serde::{Deserialize, Serialize};
use teachdim_core::bounds::{BoundReport, TdValue};
use teachdim_core::model::{Example, Provenance, TeachingSet, Vector};
use teachdim_core::oracle::FalsificationReport;
use teachdim_core::verify::{CheckRecord, VerifyReport};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleJson {
    pub x: Vec<f64>,
    pub y: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeachingSetJson {
    pub items: Vec<ExampleJson>,
    pub size: usize,
    #[serde(default)]
    pub provenance: Option<String>,
    #[serde(default)]
    pub scale_factor: Option<f64>,
}

impl TeachingSetJson {
    pub fn from_core(set: &TeachingSet) -> Self {
        TeachingSetJson {
            items: set
                .items
                .iter()
                .map(|it| ExampleJson { x: it.x.as_slice().to_vec(), y: it.y })
                .collect(),
            size: set.size(),
            provenance: Some(set.provenance.as_str().to_string()),
            scale_factor: Some(set.scale_factor),
        }
    }

    pub fn to_core(&self) -> Result<TeachingSet, CliError> {
        if self.size != self.items.len() {
            return Err(CliError::new(
                "size_mismatch",
                format!("size field is {} but there are {} items", self.size, self.items.len()),
            ));
        }
        let items = self
            .items
            .iter()
            .map(|it| Ok(Example::new(Vector::new(it.x.clone())?, it.y)?))
            .collect::<Result<Vec<_>, CliError>>()?;
        let provenance = self
            .provenance
            .as_deref()
            .and_then(Provenance::parse)
            .unwrap_or(Provenance::External);
        let scale = self.scale_factor.unwrap_or(1.0);
        if items.is_empty() {
            let mut set = TeachingSet::empty(provenance);
            set.scale_factor = scale;
            return Ok(set);
        }
        Ok(TeachingSet::new(items, provenance, scale)?)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TdJson {
    Exact(usize),
    Interval { lo: usize, hi: usize },
}

impl From<TdValue> for TdJson {
    fn from(td: TdValue) -> Self {
        match td {
            TdValue::Exact(n) => TdJson::Exact(n),
            TdValue::Interval { lo, hi } => TdJson::Interval { lo, hi },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReportJson {
    pub lb1: usize,
    pub lb2: usize,
    pub lb3: Option<usize>,
    pub combined: usize,
    pub td: TdJson,
}

impl From<&BoundReport> for BoundReportJson {
    fn from(r: &BoundReport) -> Self {
        BoundReportJson {
            lb1: r.lb1,
            lb2: r.lb2,
            lb3: r.lb3,
            combined: r.combined,
            td: r.td.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckJson {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl From<&CheckRecord> for CheckJson {
    fn from(c: &CheckRecord) -> Self {
        CheckJson {
            name: c.name.clone(),
            value: c.value,
            tolerance: c.tolerance,
            passed: c.passed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReportJson {
    pub seed: u64,
    pub kkt_residual: f64,
    pub recovery_distance: f64,
    pub objective_gap: f64,
    pub uniqueness_spread: f64,
    pub passed: bool,
    pub details: Vec<CheckJson>,
}

impl VerifyReportJson {
    pub fn from_core(r: &VerifyReport, seed: u64) -> Self {
        VerifyReportJson {
            seed,
            kkt_residual: r.kkt_residual,
            recovery_distance: r.recovery_distance,
            objective_gap: r.objective_gap,
            uniqueness_spread: r.uniqueness_spread,
            passed: r.passed,
            details: r.details.iter().map(CheckJson::from).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FalsificationReportJson {
    pub seed: u64,
    pub trials: usize,
    pub size_tested: usize,
    pub successes: usize,
    pub sampled_region: String,
}

impl FalsificationReportJson {
    pub fn from_core(r: &FalsificationReport, seed: u64) -> Self {
        FalsificationReportJson {
            seed,
            trials: r.trials,
            size_tested: r.size_tested,
            successes: r.successes,
            sampled_region: r.sampled_region.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorJson {
    pub error: ErrorBody,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}
