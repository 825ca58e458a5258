//! Exchange operator W_gamma on each fiber.
//!
//! (W_xi)[(a,s),(b,s')] = (4 pi / ell^3) avg_xi' sum_k w(k, xi', xi)
//!                        gamma_xi'[(a-k,s),(b-k,s')]

use rayon::prelude::*;

use crate::basis::PlaneWaveBasis;
use crate::bloch::BlochOperator;
use crate::linalg::{CMat, C64};
use crate::model::Model;

fn accumulate<F>(gamma: &BlochOperator, active: &[bool], basis: &PlaneWaveBasis, weight: F) -> CMat
where
    F: Fn(usize, usize) -> f64,
{
    let n = basis.n_b();
    let pref = 4.0 * std::f64::consts::PI / basis.ell.powi(3) / gamma.n_fibers() as f64;
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for (src, g) in gamma.fibers.iter().enumerate() {
        if !active[src] {
            continue;
        }
        let g = g.as_slice();
        for (shift, pairs) in basis.shift_pairs.iter().enumerate() {
            let w = weight(shift, src) * pref;
            if w == 0.0 {
                continue;
            }
            for &(m_col, d_col) in pairs {
                for sc in 0..4 {
                    let src_col = (4 * m_col + sc) * n;
                    let dst_col = (4 * d_col + sc) * n;
                    for &(m_row, d_row) in pairs {
                        let (sr, dr) = (src_col + 4 * m_row, dst_col + 4 * d_row);
                        for s in 0..4 {
                            out[dr + s] += g[sr + s] * w;
                        }
                    }
                }
            }
        }
    }
    CMat::from_vec(n, n, out)
}

/// W_gamma on grid fiber `target`.
pub fn exchange_matrix(gamma: &BlochOperator, target: usize, model: &Model) -> CMat {
    let active = gamma.nonzero_fibers();
    accumulate(gamma, &active, &model.basis, |k, src| model.weights.weight(k, src, target))
}

/// W_gamma at an off-grid quasi-momentum, from the grid-sampled gamma.
pub fn exchange_matrix_at(gamma: &BlochOperator, xi: &[f64; 3], model: &Model) -> CMat {
    let active = gamma.nonzero_fibers();
    accumulate(gamma, &active, &model.basis, |k, src| model.weights.weight_at(k, src, xi))
}

/// W_gamma on every grid fiber.
pub fn exchange_operator(gamma: &BlochOperator, model: &Model) -> BlochOperator {
    let active = gamma.nonzero_fibers();
    let fibers = (0..model.n_fibers())
        .into_par_iter()
        .map(|t| accumulate(gamma, &active, &model.basis, |k, src| model.weights.weight(k, src, t)))
        .collect();
    BlochOperator { fibers }
}
