//! Physical parameters, numerical tolerances and run mode.

use serde::{Deserialize, Serialize};

use crate::error::{DfError, Result};

/// Physical and discretization parameters of one crystal model.
///
/// `ell` is the cubic cell side, `z` the nuclear charge per cell, `q` the
/// number of electrons per cell, `alpha` the coupling constant, `c` the speed
/// of light, `k_cut` the plane-wave cutoff (|k|_inf <= k_cut) and `n_xi` the
/// number of quasi-momentum samples per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub ell: f64,
    pub z: f64,
    pub q: u32,
    pub alpha: f64,
    pub c: f64,
    pub k_cut: u32,
    pub n_xi: u32,
    /// Margin added to c*(q+1) in the penalization level. Defaults to 0.1 c^2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_margin: Option<f64>,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, reason: &str| {
            Err(DfError::InvalidParameter { name: name.to_string(), reason: reason.to_string() })
        };
        if !(self.ell.is_finite() && self.ell > 0.0) {
            return bad("ell", "must be finite and > 0");
        }
        if !(self.z.is_finite() && self.z >= 0.0) {
            return bad("z", "must be finite and >= 0");
        }
        if self.q == 0 {
            return bad("q", "must be >= 1");
        }
        if !(self.alpha.is_finite() && (0.0..=1.0).contains(&self.alpha)) {
            return bad("alpha", "must lie in [0, 1]");
        }
        if !(self.c.is_finite() && self.c >= 1.0) {
            return bad("c", "must be finite and >= 1");
        }
        if self.n_xi == 0 {
            return bad("n_xi", "must be >= 1");
        }
        if self.k_cut > 6 {
            return bad("k_cut", "must be <= 6");
        }
        if let Some(m) = self.eps_margin {
            if !(m.is_finite() && m > 0.0) {
                return bad("eps_margin", "must be finite and > 0");
            }
        }
        Ok(())
    }

    pub fn alpha_c(&self) -> f64 {
        self.alpha / self.c
    }

    pub fn z_c(&self) -> f64 {
        self.z / self.c
    }

    pub fn c2(&self) -> f64 {
        self.c * self.c
    }

    pub fn q_f64(&self) -> f64 {
        f64::from(self.q)
    }

    pub fn eps_margin_or_default(&self) -> f64 {
        self.eps_margin.unwrap_or(0.1 * self.c2())
    }

    /// Hex SHA-256 of the canonical JSON encoding; stored in checkpoints.
    pub fn hash_hex(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_string(self).expect("params serialize");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Numerical tolerances. Fields ending in `_rel` are multiplied by c^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub retraction_tol_rel: f64,
    pub retraction_max_iter: usize,
    pub scf_energy_tol: f64,
    pub scf_residual_tol: f64,
    pub scf_max_iter: usize,
    pub tie_tol_rel: f64,
    pub occupation_tol: f64,
    pub weights_subsample: usize,
    /// Relative eigensolver residual threshold.
    pub eigen_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            retraction_tol_rel: 1.0e-10,
            retraction_max_iter: 200,
            scf_energy_tol: 1.0e-10,
            scf_residual_tol: 1.0e-8,
            scf_max_iter: 200,
            tie_tol_rel: 1.0e-9,
            occupation_tol: 1.0e-6,
            weights_subsample: 64,
            eigen_tol: 1.0e-10,
        }
    }
}

impl Tolerances {
    pub fn retraction_tol(&self, c: f64) -> f64 {
        self.retraction_tol_rel * c * c
    }

    pub fn tie_tol(&self, c: f64) -> f64 {
        self.tie_tol_rel * c * c
    }
}

/// Strict mode turns assumption and asserted-property failures into errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Strict,
    Permissive,
}
