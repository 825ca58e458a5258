//! Norms of Bloch operators.
//!
//! * `y`: sup_xi of the fiber operator norm.
//! * `y_conv_local(xi)`: avg_xi' w(0, xi', xi) ||h_xi'||; `y_conv` is its sup.
//! * `x`: avg_xi ||(1 - Delta_xi)^{1/4} h_xi (1 - Delta_xi)^{1/4}||_1.
//! * `xc`: same with |D_xi|^{1/2}.
//! * `s11`: avg_xi ||h_xi||_1.
//! * `absd`: avg_xi ||h_xi |D_xi|^{1/2}||_1.

use rayon::prelude::*;

use crate::bloch::BlochOperator;
use crate::linalg::{sandwich_diag, spectral_norm_hermitian, trace_norm_general, trace_norm_hermitian, CMat};
use crate::model::Model;

pub struct Norms<'a> {
    pub model: &'a Model,
}

fn avg(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

impl<'a> Norms<'a> {
    pub fn new(model: &'a Model) -> Self {
        Norms { model }
    }

    pub fn fiber_op_norms(&self, h: &BlochOperator) -> Vec<f64> {
        h.fibers.par_iter().map(spectral_norm_hermitian).collect()
    }

    pub fn y(&self, h: &BlochOperator) -> f64 {
        self.fiber_op_norms(h).into_iter().fold(0.0, f64::max)
    }

    pub fn y_conv_local_from(&self, op_norms: &[f64]) -> Vec<f64> {
        let n = op_norms.len();
        let w = &self.model.weights;
        let z = self.model.zero_shift;
        (0..n)
            .map(|t| (0..n).map(|s| w.weight(z, s, t) * op_norms[s]).sum::<f64>() / n as f64)
            .collect()
    }

    pub fn y_conv_local(&self, h: &BlochOperator) -> Vec<f64> {
        self.y_conv_local_from(&self.fiber_op_norms(h))
    }

    pub fn y_conv(&self, h: &BlochOperator) -> f64 {
        self.y_conv_local(h).into_iter().fold(0.0, f64::max)
    }

    fn weighted_trace_norm(&self, h: &BlochOperator, diag: &[Vec<f64>], power: f64) -> f64 {
        let vals: Vec<f64> = h
            .fibers
            .par_iter()
            .zip(diag.par_iter())
            .map(|(m, d)| {
                let ds: Vec<f64> = d.iter().map(|x| x.powf(power)).collect();
                trace_norm_hermitian(&sandwich_diag(m, &ds))
            })
            .collect();
        avg(&vals)
    }

    pub fn x(&self, h: &BlochOperator) -> f64 {
        self.weighted_trace_norm(h, &self.model.laplace, 0.25)
    }

    pub fn xc(&self, h: &BlochOperator) -> f64 {
        self.weighted_trace_norm(h, &self.model.abs_dirac, 0.5)
    }

    pub fn s11(&self, h: &BlochOperator) -> f64 {
        avg(&h.fibers.par_iter().map(trace_norm_hermitian).collect::<Vec<_>>())
    }

    pub fn absd_per_fiber(&self, h: &BlochOperator) -> Vec<f64> {
        h.fibers
            .par_iter()
            .zip(self.model.abs_dirac.par_iter())
            .map(|(m, d)| {
                let n = m.nrows();
                let scaled = CMat::from_fn(n, n, |i, j| m[(i, j)] * d[j].sqrt());
                trace_norm_general(&scaled)
            })
            .collect()
    }

    pub fn absd(&self, h: &BlochOperator) -> f64 {
        avg(&self.absd_per_fiber(h))
    }

    /// max(||h||_X, ||h||_Y(xi)) per fiber.
    pub fn x_cap_y_conv_local(&self, h: &BlochOperator) -> Vec<f64> {
        let x = self.x(h);
        self.y_conv_local(h).into_iter().map(|v| v.max(x)).collect()
    }

    /// max(||h||_X, ||h||_Y).
    pub fn x_cap_y(&self, h: &BlochOperator) -> f64 {
        self.x(h).max(self.y(h))
    }

    /// max(||h||_{S11}, ||h||_Y).
    pub fn s11_cap_y(&self, h: &BlochOperator) -> f64 {
        self.s11(h).max(self.y(h))
    }

    /// max(||h||_{X_c}, c ||h||_Y-conv): the retraction step norm.
    pub fn xc_cap_yc(&self, h: &BlochOperator) -> f64 {
        self.xc(h).max(self.model.params.c * self.y_conv(h))
    }

    pub fn x_cap_y_conv(&self, h: &BlochOperator) -> f64 {
        self.x(h).max(self.y_conv(h))
    }
}
