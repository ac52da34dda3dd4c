//! Command implementations behind the `umono` binary.

pub mod campaign;
pub mod examples;
pub mod output;
pub mod state_file;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::bounds::{evaluate_bounds, evaluate_from_values, global_value, BoundError, BoundReport, EvaluateOptions, Mode, TighteningParams};
use crate::entropy::EntropyParams;
use crate::measures::MeasureError;
use crate::states::PartitionSpec;

pub use campaign::{cmd_campaign, CampaignConfig, CampaignSummary};
pub use examples::{cmd_example1, cmd_example2, Example1Audit, SweepRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("check failed: {0}")]
    Violation(String),
    #[error(transparent)]
    Bound(#[from] BoundError),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Violation(_) => EXIT_VIOLATION,
            HarnessError::Bound(BoundError::Measure(m)) => match m {
                MeasureError::InvalidOptions(_) | MeasureError::NotTwoQubit(_) | MeasureError::DimensionLimit { .. } => {
                    EXIT_USAGE
                }
                _ => EXIT_NUMERIC,
            },
            HarnessError::Bound(BoundError::Hierarchy(_)) => EXIT_NUMERIC,
            _ => EXIT_USAGE,
        }
    }
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// Inputs of a single `check` run.
#[derive(Debug, Clone)]
pub struct CheckRequest {
    pub state_file: PathBuf,
    pub params: EntropyParams,
    pub tightening: TighteningParams,
    pub mode: Mode,
    /// Defaults to party 0 against all others.
    pub partition: Option<PartitionSpec>,
    /// Replace the computed pairwise values, keeping the computed global value.
    pub pairwise: Option<Vec<f64>>,
    pub options: EvaluateOptions,
}

pub fn cmd_check(req: &CheckRequest) -> Result<BoundReport, HarnessError> {
    let state = state_file::read_state(&req.state_file)?;
    let part = req.partition.clone().unwrap_or_else(|| PartitionSpec::first_vs_rest(state.n_parties()));
    part.validate(state.n_parties()).map_err(|e| HarnessError::Config(e.to_string()))?;
    match &req.pairwise {
        None => Ok(evaluate_bounds(&state, &part, &req.params, &req.tightening, req.mode, &req.options)?),
        Some(values) => {
            if values.len() != part.n_others() {
                return Err(HarnessError::Config(format!(
                    "{} pairwise values given for {} B parties",
                    values.len(),
                    part.n_others()
                )));
            }
            let lhs = global_value(&state, &part, &req.params, req.mode, &req.options)?;
            Ok(evaluate_from_values(lhs, values, &req.params, &req.tightening, req.mode)?)
        }
    }
}
