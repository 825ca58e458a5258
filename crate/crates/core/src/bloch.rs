//! Dense Bloch-decomposed operators: one n_b x n_b matrix per grid point.

use crate::error::{DfError, Result};
use crate::linalg::{hermitian_deviation, max_abs, CMat, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct BlochOperator {
    pub fibers: Vec<CMat>,
}

impl BlochOperator {
    pub fn zeros(n_fibers: usize, n_b: usize) -> Self {
        BlochOperator { fibers: vec![CMat::zeros(n_b, n_b); n_fibers] }
    }

    pub fn n_fibers(&self) -> usize {
        self.fibers.len()
    }

    pub fn n_b(&self) -> usize {
        self.fibers.first().map_or(0, |m| m.nrows())
    }

    /// Zone-averaged trace (trace per unit cell).
    pub fn trace(&self) -> f64 {
        let w = 1.0 / self.fibers.len() as f64;
        self.fibers.iter().map(|m| m.trace().re).sum::<f64>() * w
    }

    pub fn add_scaled(&self, other: &BlochOperator, t: f64) -> BlochOperator {
        let s = C64::new(t, 0.0);
        BlochOperator {
            fibers: self.fibers.iter().zip(&other.fibers).map(|(a, b)| a + b * s).collect(),
        }
    }

    pub fn sub(&self, other: &BlochOperator) -> BlochOperator {
        self.add_scaled(other, -1.0)
    }

    pub fn scale(&self, t: f64) -> BlochOperator {
        let s = C64::new(t, 0.0);
        BlochOperator { fibers: self.fibers.iter().map(|a| a * s).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.fibers.iter().map(max_abs).fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.fibers.iter().map(hermitian_deviation).fold(0.0, f64::max)
    }

    pub fn check_hermitian(&self, what: &str, tol: f64) -> Result<()> {
        let dev = self.hermitian_deviation();
        let scale = self.max_abs().max(1.0);
        if dev > tol * scale {
            return Err(DfError::NonHermitian { what: what.to_string(), deviation: dev });
        }
        Ok(())
    }

    /// Zero-valued fibers can be skipped by the exchange assembly.
    pub fn nonzero_fibers(&self) -> Vec<bool> {
        self.fibers.iter().map(|m| m.iter().any(|z| *z != C64::new(0.0, 0.0))).collect()
    }
}
