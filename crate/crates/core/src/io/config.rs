//! JSON run configuration. Unknown keys are rejected at every level.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "model": {"ell": 6.283185307179586, "z": 0.5, "q": 2, "alpha": 0.6,
//!             "c": 3.0, "k_cut": 1, "n_xi": 1},
//!   "tolerances": {"scf_residual_tol": 1e-8},
//!   "constants": {"overrides": {"C_EE": 1.0}, "probes": 32},
//!   "run": {"checkpoint": "out/gamma.ckpt.json", "t_values": [0.1, 0.01]},
//!   "output": {"directory": "out"},
//!   "mode": "strict",
//!   "seed": 7
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constants::{ConstantOverrides, DEFAULT_PROBES};
use crate::diagnostics::ScalingConfig;
use crate::error::{DfError, Result};
use crate::params::{Mode, ModelParams, Tolerances};

pub const CONFIG_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "schema")]
    pub schema_version: u32,
    pub model: ModelParams,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub constants: ConstantsBlock,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn schema() -> u32 {
    CONFIG_SCHEMA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsBlock {
    pub overrides: ConstantOverrides,
    /// Random probes for the estimated constants.
    pub probes: usize,
    /// Skip estimation; missing constants take their defaults.
    pub overrides_only: bool,
}

impl Default for ConstantsBlock {
    fn default() -> Self {
        ConstantsBlock { overrides: ConstantOverrides::default(), probes: DEFAULT_PROBES, overrides_only: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunBlock {
    /// State to start from (diagnostics) or to resume from (solve).
    pub checkpoint: Option<PathBuf>,
    pub t_values: Vec<f64>,
    pub scaling: ScalingConfig,
    pub bands: BandsOptions,
}

impl Default for RunBlock {
    fn default() -> Self {
        RunBlock {
            checkpoint: None,
            t_values: vec![1.0e-1, 3.0e-2, 1.0e-2, 3.0e-3, 1.0e-3, 3.0e-4, 1.0e-4],
            scaling: ScalingConfig::default(),
            bands: BandsOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BandsOptions {
    pub samples: usize,
    /// Defaults to q + 2.
    pub bands: Option<usize>,
    /// Defaults to the standard cubic path.
    pub vertices: Option<Vec<[f64; 3]>>,
}

impl Default for BandsOptions {
    fn default() -> Self {
        BandsOptions { samples: 100, bands: None, vertices: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub directory: PathBuf,
    /// Write gamma.ckpt.json after a solve.
    pub checkpoint: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock { directory: PathBuf::from("out"), checkpoint: true }
    }
}

impl RunConfig {
    pub fn new(model: ModelParams) -> Self {
        RunConfig {
            schema_version: CONFIG_SCHEMA,
            model,
            tolerances: Tolerances::default(),
            constants: ConstantsBlock::default(),
            run: RunBlock::default(),
            output: OutputBlock::default(),
            mode: Mode::Strict,
            seed: 0,
            threads: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| DfError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA {
            return Err(DfError::Validation(format!("config schema_version {} unsupported", self.schema_version)));
        }
        self.model.validate()?;
        let t = &self.tolerances;
        let positive = [
            ("retraction_tol_rel", t.retraction_tol_rel),
            ("scf_energy_tol", t.scf_energy_tol),
            ("scf_residual_tol", t.scf_residual_tol),
            ("tie_tol_rel", t.tie_tol_rel),
            ("occupation_tol", t.occupation_tol),
            ("eigen_tol", t.eigen_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(DfError::Validation(format!("tolerances.{name} must be positive, got {v}")));
            }
        }
        if t.weights_subsample == 0 || t.scf_max_iter == 0 || t.retraction_max_iter == 0 {
            return Err(DfError::Validation("iteration limits and weights_subsample must be positive".into()));
        }
        if self.run.t_values.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(DfError::Validation("run.t_values must be positive".into()));
        }
        if self.run.scaling.radii.iter().any(|r| !(*r >= 2.0)) {
            return Err(DfError::Validation("run.scaling.radii must be at least 2 fine spacings".into()));
        }
        if self.run.bands.samples < 2 {
            return Err(DfError::Validation("run.bands.samples must be at least 2".into()));
        }
        if self.threads == Some(0) {
            return Err(DfError::Validation("threads must be positive".into()));
        }
        Ok(())
    }
}
