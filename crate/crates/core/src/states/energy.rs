//! Dirac-Fock energy of a Bloch operator (operator form).
//!
//! E = avg Tr[D gamma] - z int G rho + (alpha/2) int int rho G rho
//!     - (alpha/2) avg Tr[W_gamma gamma]

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochOperator;
use crate::linalg::trace_product;
use crate::model::Model;
use crate::operators::coulomb::g_hat;
use crate::operators::density::{density_fourier, hartree_matrix, DensityFourier};
use crate::operators::exchange::exchange_matrix;
use crate::operators::mean_field::mean_field_operator;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub dirac: f64,
    pub external: f64,
    pub hartree: f64,
    pub exchange: f64,
    pub total: f64,
    pub trace: f64,
    /// total - eps_pen (Tr gamma - q).
    pub penalized: f64,
}

/// ell^3 sum_p g_hat(p) a_hat(p) conj(b_hat(p)) = int (a * G) b.
pub(crate) fn coulomb_pairing(a: &DensityFourier, b: &DensityFourier, model: &Model) -> f64 {
    let basis = &model.basis;
    let mut acc = 0.0;
    for (i, p) in basis.shifts.iter().enumerate() {
        let g = g_hat(*p, basis.ell);
        if g != 0.0 {
            acc += g * (a.values[i] * b.values[i].conj()).re;
        }
    }
    acc * basis.ell.powi(3)
}

fn avg_trace(a: &[crate::linalg::CMat], b: &[crate::linalg::CMat]) -> f64 {
    let n = a.len() as f64;
    a.iter().zip(b).map(|(x, y)| trace_product(x, y).re).sum::<f64>() / n
}

pub fn energy(gamma: &BlochOperator, model: &Model, eps_pen: f64) -> EnergyBreakdown {
    let p = &model.params;
    let vol = model.basis.ell.powi(3);
    let rho = density_fourier(gamma, &model.basis);
    let dirac = avg_trace(&model.free, &gamma.fibers);
    // int G rho = ell^3 sum_p g_hat(p) rho_hat(-p), real since g_hat is even.
    let ext: f64 = model
        .basis
        .shifts
        .iter()
        .zip(&rho.values)
        .map(|(q, r)| g_hat(*q, model.basis.ell) * r.re)
        .sum();
    let external = -p.z * vol * ext;
    let hartree = 0.5 * p.alpha * vol * coulomb_pairing(&rho, &rho, model);
    let exchange = if p.alpha == 0.0 {
        0.0
    } else {
        let ws: Vec<f64> = (0..model.n_fibers())
            .into_par_iter()
            .map(|t| trace_product(&exchange_matrix(gamma, t, model), &gamma.fibers[t]).re)
            .collect();
        -0.5 * p.alpha * ws.iter().sum::<f64>() / model.n_fibers() as f64
    };
    let total = dirac + external + hartree + exchange;
    let trace = gamma.trace();
    EnergyBreakdown {
        dirac,
        external,
        hartree,
        exchange,
        total,
        trace,
        penalized: total - eps_pen * (trace - p.q_f64()),
    }
}

/// d/dt of the penalized energy at gamma along h: avg Tr[(D_gamma - eps) h].
pub fn directional_linear(gamma: &BlochOperator, h: &BlochOperator, model: &Model, eps_pen: f64) -> f64 {
    let d = mean_field_operator(gamma, model);
    avg_trace(&d.fibers, &h.fibers) - eps_pen * h.trace()
}

/// B(h, h') = Tr[(rho_h * G) h'] - Tr[W_h h'].
pub fn exchange_bilinear(h: &BlochOperator, h2: &BlochOperator, model: &Model) -> f64 {
    let hart = hartree_matrix(&density_fourier(h, &model.basis), &model.basis);
    let vals: Vec<f64> = (0..model.n_fibers())
        .into_par_iter()
        .map(|t| {
            let v = &hart - exchange_matrix(h, t, model);
            trace_product(&v, &h2.fibers[t]).re
        })
        .collect();
    vals.iter().sum::<f64>() / model.n_fibers() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{ModelParams, Tolerances};

    #[test]
    fn zero_state_has_zero_energy() {
        let p = ModelParams { ell: 3.0, z: 1.0, q: 1, alpha: 0.2, c: 2.0, k_cut: 0, n_xi: 1, eps_margin: None };
        let m = Model::new(p, Tolerances::default()).expect("model");
        let g = BlochOperator::zeros(1, m.n_b());
        let e = energy(&g, &m, 5.0);
        assert_eq!(e.total, 0.0);
        assert!((e.penalized - 5.0).abs() <= 1.0e-15);
    }
}
