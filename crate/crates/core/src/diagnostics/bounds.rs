//! Projector-difference bound and the critical-coupling report.

use serde::{Deserialize, Serialize};

use crate::bloch::BlochOperator;
use crate::constants::Constants;
use crate::error::Result;
use crate::linalg::{spectral_norm_general, CMat};
use crate::model::Model;
use crate::operators::mean_field::mean_field_operator;
use crate::operators::spectral::spectral_decomposition;
use crate::states::Norms;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectorBound {
    /// ||D_xi|^{1/2} (P+_gamma - P+_gamma')|| per fiber.
    pub lhs: Vec<f64>,
    /// (A / (1 + C_Y)) ||gamma - gamma'||_{X cap Y(xi)} per fiber.
    pub rhs: Vec<f64>,
    pub holds: bool,
}

pub fn projector_difference_bound(
    g1: &BlochOperator,
    g2: &BlochOperator,
    model: &Model,
    consts: &Constants,
) -> Result<ProjectorBound> {
    let s1 = spectral_decomposition(&mean_field_operator(g1, model), model.tol.eigen_tol)?;
    let s2 = spectral_decomposition(&mean_field_operator(g2, model), model.tol.eigen_tol)?;
    let n = model.n_b();
    let lhs: Vec<f64> = s1
        .iter()
        .zip(&s2)
        .zip(&model.abs_dirac)
        .map(|((a, b), d)| {
            let diff = a.positive_projector() - b.positive_projector();
            let w = CMat::from_fn(n, n, |i, j| diff[(i, j)] * d[i].sqrt());
            spectral_norm_general(&w)
        })
        .collect();
    let local = Norms::new(model).x_cap_y_conv_local(&g1.sub(g2));
    let f = consts.derived.a / (1.0 + consts.c_y.value);
    let rhs: Vec<f64> = local.iter().map(|v| f * v).collect();
    let holds = lhs.iter().zip(&rhs).all(|(l, r)| l <= r);
    Ok(ProjectorBound { lhs, rhs, holds })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    /// 16 pi C_EE R.
    pub c_cri: f64,
    /// The second branch needs the constant of the exhaustion theorem, which
    /// has no computable recipe; it is not evaluated.
    pub c_cri_prime: Option<f64>,
    pub alpha_c: f64,
    /// alpha_c must lie below 4 pi / C_cri.
    pub threshold: f64,
    pub holds: bool,
}

pub fn critical_coupling(model: &Model, consts: &Constants) -> CriticalReport {
    let c_cri = consts.derived.c_cri;
    let threshold = if c_cri > 0.0 { 4.0 * std::f64::consts::PI / c_cri } else { f64::INFINITY };
    let alpha_c = model.params.alpha_c();
    CriticalReport { c_cri, c_cri_prime: None, alpha_c, threshold, holds: alpha_c <= threshold }
}
