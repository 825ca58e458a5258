//! Classification of the last filled shell of a solution.

use serde::{Deserialize, Serialize};

use crate::linalg::max_abs;
use crate::solver::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShellClass {
    Empty,
    Filled,
    Fractional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellReport {
    pub classification: ShellClass,
    pub nu: f64,
    pub band_size: usize,
    /// Largest distance of an occupation from {0, 1} among states outside the tie band.
    pub max_offband_deviation: f64,
    /// max_xi ||gamma_xi^2 - gamma_xi||_max.
    pub projector_deviation: f64,
    pub trace: f64,
}

pub fn shell_report(sol: &Solution, occupation_tol: f64) -> ShellReport {
    let band = &sol.filling.band;
    let mut out_band = 0.0f64;
    let mut min_band = f64::INFINITY;
    let mut max_band: f64 = 0.0;
    // Occupations of the solution measured in the eigenbasis of D_gamma.
    for (f, (st, spec)) in sol.gamma.fibers.iter().zip(&sol.spectra).enumerate() {
        let proj = spec.vectors.adjoint() * &st.orbitals;
        for j in 0..spec.values.len() {
            let row = proj.row(j);
            let occ: f64 = row.iter().zip(&st.occupations).map(|(a, o)| a.norm_sqr() * o).sum();
            if band.contains(&(f, j)) {
                min_band = min_band.min(occ);
                max_band = max_band.max(occ);
            } else {
                out_band = out_band.max(occ.min(1.0 - occ).abs());
            }
        }
    }
    let classification = if band.is_empty() || max_band <= occupation_tol {
        ShellClass::Empty
    } else if min_band >= 1.0 - occupation_tol {
        ShellClass::Filled
    } else {
        ShellClass::Fractional
    };
    let projector_deviation = sol
        .gamma
        .fibers
        .iter()
        .map(|st| {
            let g = st.to_matrix();
            max_abs(&(&g * &g - &g))
        })
        .fold(0.0, f64::max);
    ShellReport {
        classification,
        nu: sol.filling.nu,
        band_size: band.len(),
        max_offband_deviation: out_band,
        projector_deviation,
        trace: sol.gamma.trace(),
    }
}
