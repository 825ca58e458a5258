//! Per-fiber spectral decompositions and spectral projectors.

use rayon::prelude::*;

use crate::bloch::BlochOperator;
use crate::error::Result;
use crate::linalg::{hermitian_eigen, CMat};

#[derive(Debug, Clone, PartialEq)]
pub struct FiberSpectrum {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl FiberSpectrum {
    /// Index of the first positive eigenvalue.
    pub fn first_positive(&self) -> usize {
        self.values.iter().position(|&v| v > 0.0).unwrap_or(self.values.len())
    }

    /// Projector onto the span of eigenvectors with index in `range`.
    pub fn projector(&self, range: std::ops::Range<usize>) -> CMat {
        let v = self.vectors.columns(range.start, range.len());
        &v * v.adjoint()
    }

    /// P+ = 1_(0, inf)(D).
    pub fn positive_projector(&self) -> CMat {
        self.projector(self.first_positive()..self.values.len())
    }

    pub fn negative_projector(&self) -> CMat {
        self.projector(0..self.first_positive())
    }
}

pub type Spectra = Vec<FiberSpectrum>;

pub fn spectral_decomposition(op: &BlochOperator, rel_tol: f64) -> Result<Spectra> {
    op.fibers
        .par_iter()
        .enumerate()
        .map(|(i, m)| hermitian_eigen(m, i, rel_tol).map(|e| FiberSpectrum { values: e.values, vectors: e.vectors }))
        .collect()
}
