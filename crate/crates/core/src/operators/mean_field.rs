//! Mean-field operator D_gamma = D - z G + alpha (rho_gamma * G - W_gamma).

use rayon::prelude::*;

use crate::bloch::BlochOperator;
use crate::linalg::{CMat, C64};
use crate::model::Model;
use crate::operators::density::{density_fourier, hartree_matrix};
use crate::operators::dirac::free_dirac_at;
use crate::operators::exchange::{exchange_matrix, exchange_matrix_at};

/// V_gamma = rho_gamma * G - W_gamma on every fiber.
pub fn interaction_operator(gamma: &BlochOperator, model: &Model) -> BlochOperator {
    let hart = hartree_matrix(&density_fourier(gamma, &model.basis), &model.basis);
    let fibers = (0..model.n_fibers())
        .into_par_iter()
        .map(|t| &hart - exchange_matrix(gamma, t, model))
        .collect();
    BlochOperator { fibers }
}

pub fn mean_field_operator(gamma: &BlochOperator, model: &Model) -> BlochOperator {
    let p = &model.params;
    let base: Vec<CMat> = model
        .free
        .iter()
        .map(|d| d - &model.coulomb * C64::new(p.z, 0.0))
        .collect();
    if p.alpha == 0.0 {
        return BlochOperator { fibers: base };
    }
    let v = interaction_operator(gamma, model);
    let a = C64::new(p.alpha, 0.0);
    BlochOperator { fibers: base.iter().zip(&v.fibers).map(|(d, v)| d + v * a).collect() }
}

/// D_gamma at an off-grid quasi-momentum (used for band paths).
pub fn mean_field_at(gamma: &BlochOperator, xi: &[f64; 3], model: &Model) -> CMat {
    let p = &model.params;
    let mut d = free_dirac_at(&model.basis, xi, p.c) - &model.coulomb * C64::new(p.z, 0.0);
    if p.alpha != 0.0 {
        let hart = hartree_matrix(&density_fourier(gamma, &model.basis), &model.basis);
        d += (hart - exchange_matrix_at(gamma, xi, model)) * C64::new(p.alpha, 0.0);
    }
    d
}
