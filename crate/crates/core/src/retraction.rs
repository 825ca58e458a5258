//! The map T(gamma) = P+_gamma gamma P+_gamma, with P+_gamma the positive
//! spectral projector of the mean-field operator, and its fixed-point limit
//! theta(gamma) = lim T^n(gamma).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochOperator;
use crate::constants::Constants;
use crate::error::{DfError, Result};
use crate::linalg::{hermitize, CMat};
use crate::model::Model;
use crate::operators::mean_field::mean_field_operator;
use crate::operators::spectral::{spectral_decomposition, Spectra};
use crate::states::{DensityMatrix, Norms};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetractionStep {
    pub iteration: usize,
    pub step_norm_xc: f64,
    pub step_norm_yc: f64,
    /// step_n / step_{n-1}; NaN on the first step.
    pub ratio: f64,
    /// R minus the U_R membership value of the step's input (NaN without constants).
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetractionTrace {
    pub steps: Vec<RetractionStep>,
    pub iterations: usize,
    pub converged: bool,
}

impl RetractionTrace {
    pub fn max_ratio_after_first(&self) -> f64 {
        self.steps.iter().skip(1).map(|s| s.ratio).filter(|r| r.is_finite()).fold(0.0, f64::max)
    }
}

/// P+ gamma P+ on every fiber, with the spectra of D_gamma.
pub fn apply_t(gamma: &BlochOperator, model: &Model) -> Result<(BlochOperator, Spectra)> {
    let d = mean_field_operator(gamma, model);
    let spectra = spectral_decomposition(&d, model.tol.eigen_tol)?;
    let fibers = gamma
        .fibers
        .par_iter()
        .zip(spectra.par_iter())
        .map(|(g, s)| {
            let p: CMat = s.positive_projector();
            hermitize(&(&p * g * &p))
        })
        .collect();
    Ok((BlochOperator { fibers }, spectra))
}

/// U_R membership: (1/c) max{||gamma |D|^{1/2}||_{S11}, ||gamma||_Y} + (M/c^2) ||T gamma - gamma||.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub value: f64,
    pub r: f64,
    pub margin: f64,
    pub member: bool,
}

fn membership_value(gamma: &BlochOperator, step: f64, model: &Model, consts: &Constants) -> Membership {
    let norms = Norms::new(model);
    let c = model.params.c;
    let base = norms.absd(gamma).max(norms.y_conv(gamma)) / c;
    let value = base + consts.derived.m / (c * c) * step;
    let r = consts.r.value;
    Membership { value, r, margin: r - value, member: value < r }
}

pub fn membership(gamma: &BlochOperator, model: &Model, consts: &Constants) -> Result<Membership> {
    let (t, _) = apply_t(gamma, model)?;
    let step = Norms::new(model).xc_cap_yc(&t.sub(gamma));
    Ok(membership_value(gamma, step, model, consts))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetractionOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl RetractionOptions {
    pub fn from_model(model: &Model) -> Self {
        RetractionOptions { tol: model.tol.retraction_tol(model.params.c), max_iter: model.tol.retraction_max_iter }
    }
}

/// theta(gamma) as a dense operator, with the spectra of D at the limit's
/// predecessor and the trace of step norms.
pub fn theta_dense(
    gamma: &BlochOperator,
    model: &Model,
    consts: Option<&Constants>,
    opts: RetractionOptions,
) -> Result<(BlochOperator, RetractionTrace)> {
    let norms = Norms::new(model);
    let c = model.params.c;
    let mut steps = Vec::new();
    let mut current = gamma.clone();
    if model.params.alpha == 0.0 {
        // P+ does not depend on gamma, so T is idempotent.
        let (next, _) = apply_t(&current, model)?;
        let diff = next.sub(&current);
        let (xc, yc) = (norms.xc(&diff), c * norms.y_conv(&diff));
        let margin = consts.map_or(f64::NAN, |k| membership_value(&current, xc.max(yc), model, k).margin);
        steps.push(RetractionStep { iteration: 1, step_norm_xc: xc, step_norm_yc: yc, ratio: f64::NAN, margin });
        return Ok((next, RetractionTrace { steps, iterations: 1, converged: true }));
    }
    let mut prev_step = f64::NAN;
    let mut bad = 0usize;
    for it in 1..=opts.max_iter {
        let (next, _) = apply_t(&current, model)?;
        let diff = next.sub(&current);
        let (xc, yc) = (norms.xc(&diff), c * norms.y_conv(&diff));
        let step = xc.max(yc);
        let ratio = if it == 1 { f64::NAN } else { step / prev_step };
        let margin = consts.map_or(f64::NAN, |k| membership_value(&current, step, model, k).margin);
        steps.push(RetractionStep { iteration: it, step_norm_xc: xc, step_norm_yc: yc, ratio, margin });
        current = next;
        if step <= opts.tol {
            return Ok((current, RetractionTrace { steps, iterations: it, converged: true }));
        }
        if ratio >= 1.0 {
            bad += 1;
            if bad >= 3 {
                return Err(DfError::NonContraction { iteration: it, ratio });
            }
        } else {
            bad = 0;
        }
        prev_step = step;
    }
    Err(DfError::RetractionMaxIter { max_iter: opts.max_iter, step: prev_step })
}

pub fn theta(
    gamma: &DensityMatrix,
    model: &Model,
    consts: Option<&Constants>,
) -> Result<(DensityMatrix, RetractionTrace)> {
    let (dense, trace) = theta_dense(&gamma.to_operator(), model, consts, RetractionOptions::from_model(model))?;
    Ok((DensityMatrix::from_operator(&dense, model.tol.eigen_tol)?, trace))
}

/// ||P-_theta theta P-_theta||_X: distance of a state from Gamma+.
pub fn gamma_plus_defect(gamma: &BlochOperator, model: &Model) -> Result<f64> {
    let d = mean_field_operator(gamma, model);
    let spectra = spectral_decomposition(&d, model.tol.eigen_tol)?;
    let fibers = gamma
        .fibers
        .iter()
        .zip(&spectra)
        .map(|(g, s)| {
            let p = s.negative_projector();
            &p * g * &p
        })
        .collect();
    Ok(Norms::new(model).x(&BlochOperator { fibers }))
}
