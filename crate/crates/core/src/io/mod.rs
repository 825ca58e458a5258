//! Run configuration, state checkpoints and report files.

pub mod checkpoint;
pub mod config;

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_SCHEMA};
pub use config::{BandsOptions, ConstantsBlock, OutputBlock, RunBlock, RunConfig, CONFIG_SCHEMA};

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

/// CSV with a header row taken from the serialized field names.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| crate::DfError::Io(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| crate::DfError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Summary of a converged solve, as written to solution.json.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct SolutionRecord {
    pub schema_version: u32,
    pub params: crate::ModelParams,
    pub params_hash: String,
    pub energy: crate::states::EnergyBreakdown,
    pub eps_pen: f64,
    pub nu: f64,
    pub residual: f64,
    pub iterations: usize,
    /// (fiber, eigen index, occupation) of the fractionally occupied states.
    pub fractional: Vec<(usize, usize, f64)>,
}

impl SolutionRecord {
    pub fn new(sol: &crate::solver::Solution, model: &crate::Model) -> Self {
        SolutionRecord {
            schema_version: 1,
            params: model.params,
            params_hash: model.params.hash_hex(),
            energy: sol.energy,
            eps_pen: sol.eps_pen,
            nu: sol.nu(),
            residual: sol.residual,
            iterations: sol.iterations,
            fractional: sol.filling.fractional.clone(),
        }
    }
}
