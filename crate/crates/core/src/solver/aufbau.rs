//! Ascending filling of positive eigenstates across the zone.

use serde::{Deserialize, Serialize};

use crate::error::{DfError, Result};
use crate::linalg::CMat;
use crate::operators::spectral::Spectra;
use crate::states::{DensityMatrix, FiberState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FillingResult {
    /// Last filled level.
    pub nu: f64,
    pub tie_tol: f64,
    /// Occupation of every eigenvector, per fiber, in eigenvalue order.
    pub occupations: Vec<Vec<f64>>,
    /// (fiber, eigen index, occupation) for states strictly between 0 and 1.
    pub fractional: Vec<(usize, usize, f64)>,
    /// (fiber, eigen index) of every state within tie_tol of nu.
    pub band: Vec<(usize, usize)>,
}

/// Fill q states per cell: q * n_fibers states of weight 1/n_fibers each,
/// with states inside the tie band around the last level sharing equally.
pub fn aufbau_fill(spectra: &Spectra, q: u32, tie_tol: f64) -> Result<FillingResult> {
    let n_fib = spectra.len();
    let mut pos: Vec<(f64, usize, usize)> = Vec::new();
    for (f, s) in spectra.iter().enumerate() {
        for (j, &v) in s.values.iter().enumerate() {
            if v > 0.0 {
                pos.push((v, f, j));
            }
        }
    }
    let required = q as usize * n_fib;
    if pos.len() < required {
        return Err(DfError::InsufficientStates { available: pos.len(), required });
    }
    pos.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let nu = pos[required - 1].0;
    let below = pos.iter().filter(|e| e.0 < nu - tie_tol).count();
    let band: Vec<(usize, usize)> =
        pos.iter().filter(|e| (e.0 - nu).abs() <= tie_tol).map(|e| (e.1, e.2)).collect();
    let share = (required - below) as f64 / band.len() as f64;
    let share = if share > 1.0 - 1.0e-12 { 1.0 } else { share };
    let mut occupations: Vec<Vec<f64>> = spectra.iter().map(|s| vec![0.0; s.values.len()]).collect();
    for e in pos.iter().filter(|e| e.0 < nu - tie_tol) {
        occupations[e.1][e.2] = 1.0;
    }
    let mut fractional = Vec::new();
    for &(f, j) in &band {
        occupations[f][j] = share;
        if share < 1.0 {
            fractional.push((f, j, share));
        }
    }
    Ok(FillingResult { nu, tie_tol, occupations, fractional, band })
}

/// The density matrix sum_j f_j |v_j><v_j| of a filling.
pub fn filled_state(spectra: &Spectra, fill: &FillingResult) -> DensityMatrix {
    let fibers = spectra
        .iter()
        .zip(&fill.occupations)
        .map(|(s, occ)| {
            let idx: Vec<usize> = (0..occ.len()).filter(|&j| occ[j] > 0.0).collect();
            let n = s.vectors.nrows();
            let mut orbitals = CMat::zeros(n, idx.len());
            for (k, &j) in idx.iter().enumerate() {
                orbitals.set_column(k, &s.vectors.column(j));
            }
            FiberState { orbitals, occupations: idx.iter().map(|&j| occ[j]).collect() }
        })
        .collect();
    DensityMatrix { fibers }
}
