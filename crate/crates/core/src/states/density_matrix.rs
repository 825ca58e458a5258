//! Low-rank storage gamma_xi = sum_i f_i |u_i><u_i| with orthonormal u_i.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochOperator;
use crate::error::{DfError, Result};
use crate::linalg::{hermitian_eigen, CMat, C64};

/// Occupations at or below this are dropped when re-extracting a low-rank form.
pub const RANK_TOL: f64 = 1.0e-13;
/// Occupations in (1, 1 + CLAMP_TOL] are clamped to 1.
pub const CLAMP_TOL: f64 = 1.0e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FiberState {
    /// n_b x r, orthonormal columns.
    pub orbitals: CMat,
    pub occupations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub fibers: Vec<FiberState>,
}

/// Serialized fiber: orbitals as interleaved (re, im), column-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberRecord {
    pub n_b: usize,
    pub r: usize,
    pub occupations: Vec<f64>,
    pub orbitals: Vec<f64>,
}

impl FiberState {
    pub fn to_matrix(&self) -> CMat {
        let n = self.orbitals.nrows();
        if self.occupations.is_empty() {
            return CMat::zeros(n, n);
        }
        let mut scaled = self.orbitals.clone();
        for (j, f) in self.occupations.iter().enumerate() {
            scaled.column_mut(j).scale_mut(*f);
        }
        &scaled * self.orbitals.adjoint()
    }

    pub fn rank(&self) -> usize {
        self.occupations.len()
    }

    pub fn to_record(&self) -> FiberRecord {
        let mut orbitals = Vec::with_capacity(2 * self.orbitals.len());
        for z in self.orbitals.iter() {
            orbitals.push(z.re);
            orbitals.push(z.im);
        }
        FiberRecord {
            n_b: self.orbitals.nrows(),
            r: self.occupations.len(),
            occupations: self.occupations.clone(),
            orbitals,
        }
    }

    pub fn from_record(rec: &FiberRecord) -> Result<Self> {
        if rec.occupations.len() != rec.r || rec.orbitals.len() != 2 * rec.n_b * rec.r {
            return Err(DfError::Validation(format!(
                "fiber record sizes inconsistent (n_b {}, r {}, {} occupations, {} orbital reals)",
                rec.n_b,
                rec.r,
                rec.occupations.len(),
                rec.orbitals.len()
            )));
        }
        let data: Vec<C64> = rec.orbitals.chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
        Ok(FiberState { orbitals: CMat::from_vec(rec.n_b, rec.r, data), occupations: rec.occupations.clone() })
    }
}

impl DensityMatrix {
    pub fn to_operator(&self) -> BlochOperator {
        BlochOperator { fibers: self.fibers.par_iter().map(FiberState::to_matrix).collect() }
    }

    pub fn n_fibers(&self) -> usize {
        self.fibers.len()
    }

    /// Trace per unit cell.
    pub fn trace(&self) -> f64 {
        let w = 1.0 / self.fibers.len() as f64;
        self.fibers.iter().map(|f| f.occupations.iter().sum::<f64>()).sum::<f64>() * w
    }

    /// Re-extract a low-rank form from dense fibers with spectrum in [0, 1].
    pub fn from_operator(op: &BlochOperator, eigen_tol: f64) -> Result<Self> {
        let fibers = op
            .fibers
            .par_iter()
            .enumerate()
            .map(|(i, m)| fiber_from_matrix(m, i, eigen_tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(DensityMatrix { fibers })
    }

    /// Occupations in [0, 1], orthonormal orbitals, trace <= q.
    pub fn validate(&self, n_b: usize, q: f64, tol: f64) -> Result<()> {
        for (i, f) in self.fibers.iter().enumerate() {
            if f.orbitals.nrows() != n_b || f.orbitals.ncols() != f.occupations.len() {
                return Err(DfError::InvalidState(format!("fiber {i} has inconsistent shape")));
            }
            for &o in &f.occupations {
                if !(-tol..=1.0 + tol).contains(&o) {
                    return Err(DfError::OccupationOutOfRange { fiber: i, value: o });
                }
            }
            let gram = f.orbitals.adjoint() * &f.orbitals;
            let r = gram.nrows();
            let dev = crate::linalg::max_abs(&(gram - CMat::identity(r, r)));
            if dev > 1.0e-10 {
                return Err(DfError::InvalidState(format!("fiber {i} orbitals not orthonormal ({dev:e})")));
            }
        }
        let t = self.trace();
        if t > q + tol {
            return Err(DfError::TraceExceedsQ { trace: t, q });
        }
        Ok(())
    }
}

pub(crate) fn fiber_from_matrix(m: &CMat, fiber: usize, eigen_tol: f64) -> Result<FiberState> {
    let e = hermitian_eigen(m, fiber, eigen_tol)?;
    let mut cols = Vec::new();
    let mut occ = Vec::new();
    // Largest occupation first.
    for j in (0..e.values.len()).rev() {
        let mut f = e.values[j];
        if f > 1.0 + CLAMP_TOL {
            return Err(DfError::OccupationOutOfRange { fiber, value: f });
        }
        if f < -CLAMP_TOL.max(1.0e-10) {
            return Err(DfError::OccupationOutOfRange { fiber, value: f });
        }
        if f > 1.0 {
            f = 1.0;
        }
        if f > RANK_TOL {
            cols.push(j);
            occ.push(f);
        }
    }
    let n = m.nrows();
    let mut orbitals = CMat::zeros(n, cols.len());
    for (k, &j) in cols.iter().enumerate() {
        orbitals.set_column(k, &e.vectors.column(j));
    }
    Ok(FiberState { orbitals, occupations: occ })
}
