//! Dense Hermitian helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{DfError, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

/// Eigenpairs of one Hermitian matrix, ascending, with each eigenvector's
/// largest-magnitude entry made real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_deviation(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// `fiber` is only used to label a failure.
pub fn hermitian_eigen(m: &CMat, fiber: usize, rel_tol: f64) -> Result<Eigen> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Eigen { values: vec![], vectors: CMat::zeros(0, 0) });
    }
    let h = hermitize(m);
    let scale = max_abs(&h).max(1.0);
    let dec = nalgebra::SymmetricEigen::try_new(h.clone(), f64::EPSILON, 100_000)
        .ok_or(DfError::EigenFailure { fiber, residual: f64::INFINITY })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dec.eigenvalues[a].total_cmp(&dec.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| dec.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let v = dec.eigenvectors.column(i);
        let mut best = 0;
        let mut best_abs = -1.0;
        for (r, z) in v.iter().enumerate() {
            let a = z.norm();
            if a > best_abs * (1.0 + 1.0e-12) {
                best_abs = a;
                best = r;
            }
        }
        let phase = if best_abs > 0.0 { v[best].conj() / best_abs } else { C64::new(1.0, 0.0) };
        for r in 0..n {
            vectors[(r, col)] = v[r] * phase;
        }
    }
    let hv = &h * &vectors;
    let mut residual: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            residual = residual.max((hv[(i, j)] - vectors[(i, j)] * values[j]).norm());
        }
    }
    if residual > rel_tol * scale {
        return Err(DfError::EigenFailure { fiber, residual });
    }
    Ok(Eigen { values, vectors })
}

/// Eigenvalues only (Hermitian input).
pub fn hermitian_values(m: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn trace_norm_hermitian(m: &CMat) -> f64 {
    hermitian_values(m).iter().map(|x| x.abs()).sum()
}

pub fn spectral_norm_hermitian(m: &CMat) -> f64 {
    hermitian_values(m).iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Sum of singular values of a general matrix.
pub fn trace_norm_general(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().sum()
}

pub fn spectral_norm_general(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().fold(0.0, |a, &x| a.max(x))
}

/// Tr[A B] for square matrices of equal size.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let (sa, sb) = (a.as_slice(), b.as_slice());
    let mut acc = C64::new(0.0, 0.0);
    // column-major: a[(i,j)] = sa[j*n + i]; Tr[AB] = sum_ij a_ij b_ji
    for j in 0..n {
        for i in 0..n {
            acc += sa[j * n + i] * sb[i * n + j];
        }
    }
    acc
}

/// D^{1/2} M D^{1/2} for a real diagonal weight vector `d`.
pub fn sandwich_diag(m: &CMat, d_sqrt: &[f64]) -> CMat {
    let n = m.nrows();
    CMat::from_fn(n, n, |i, j| m[(i, j)] * (d_sqrt[i] * d_sqrt[j]))
}
