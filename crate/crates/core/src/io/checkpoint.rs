//! Versioned JSON container for a low-rank state. Floats are written in
//! shortest round-trip form, so save(load(save(gamma))) is byte-identical.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DfError, Result};
use crate::grid::GridDescriptor;
use crate::model::Model;
use crate::states::density_matrix::{FiberRecord, FiberState};
use crate::states::DensityMatrix;

pub const CHECKPOINT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub params_hash: String,
    pub grid: GridDescriptor,
    pub fibers: Vec<FiberRecord>,
}

impl Checkpoint {
    pub fn new(gamma: &DensityMatrix, model: &Model) -> Self {
        Checkpoint {
            schema_version: CHECKPOINT_SCHEMA,
            params_hash: model.params.hash_hex(),
            grid: model.grid.descriptor(),
            fibers: gamma.fibers.iter().map(FiberState::to_record).collect(),
        }
    }

    pub fn to_string(&self) -> Result<String> {
        super::to_json(self)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let ck: Checkpoint = serde_json::from_str(text)?;
        if ck.schema_version != CHECKPOINT_SCHEMA {
            return Err(DfError::Validation(format!("checkpoint schema_version {} unsupported", ck.schema_version)));
        }
        Ok(ck)
    }

    /// The stored state, after checking it belongs to `model`.
    pub fn state(&self, model: &Model) -> Result<DensityMatrix> {
        if self.grid != model.grid.descriptor() || self.fibers.len() != model.n_fibers() {
            return Err(DfError::GridMismatch(format!(
                "checkpoint grid {:?} with {} fibers vs model {:?}",
                self.grid,
                self.fibers.len(),
                model.grid.descriptor()
            )));
        }
        if self.params_hash != model.params.hash_hex() {
            return Err(DfError::Validation("checkpoint was written for different parameters".into()));
        }
        let fibers = self.fibers.iter().map(FiberState::from_record).collect::<Result<Vec<_>>>()?;
        if fibers.iter().any(|f| f.orbitals.nrows() != model.n_b()) {
            return Err(DfError::GridMismatch("checkpoint basis size differs from the model".into()));
        }
        Ok(DensityMatrix { fibers })
    }
}

pub fn save_checkpoint(path: &Path, gamma: &DensityMatrix, model: &Model) -> Result<()> {
    std::fs::write(path, Checkpoint::new(gamma, model).to_string()?)?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => DfError::MissingCheckpoint(path.display().to_string()),
        _ => DfError::Io(format!("{}: {e}", path.display())),
    })?;
    Checkpoint::parse(&text)
}

pub fn load_checkpoint(path: &Path, model: &Model) -> Result<DensityMatrix> {
    read_checkpoint(path)?.state(model)
}
