//! Damped SCF: linearize at gamma_n, fill the positive spectrum of
//! D_{gamma_n}, take the optimal step along the segment for the quadratic
//! energy, retract, and backtrack if the retracted energy went up.

use serde::{Deserialize, Serialize};

use crate::bloch::BlochOperator;
use crate::error::{DfError, Result};
use crate::linalg::{hermitian_eigen, trace_product, C64};
use crate::model::Model;
use crate::operators::dirac::free_dispersion;
use crate::operators::mean_field::mean_field_operator;
use crate::operators::spectral::{spectral_decomposition, Spectra};
use crate::retraction::{theta_dense, RetractionOptions};
use crate::solver::aufbau::{aufbau_fill, filled_state, FillingResult};
use crate::states::{energy, exchange_bilinear, DensityMatrix, EnergyBreakdown, Norms};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScfOptions {
    pub max_iter: usize,
    /// Relative to max(1, |E|).
    pub energy_tol: f64,
    pub residual_tol: f64,
    pub max_backtracks: usize,
}

impl ScfOptions {
    pub fn from_model(model: &Model) -> Self {
        ScfOptions {
            max_iter: model.tol.scf_max_iter,
            energy_tol: model.tol.scf_energy_tol,
            residual_tol: model.tol.scf_residual_tol,
            max_backtracks: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScfIterate {
    pub iter: usize,
    pub energy: f64,
    pub penalized_energy: f64,
    pub residual: f64,
    pub beta: f64,
    pub retraction_iters: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub gamma: DensityMatrix,
    pub energy: EnergyBreakdown,
    pub eps_pen: f64,
    pub filling: FillingResult,
    pub spectra: Spectra,
    pub residual: f64,
    pub iterations: usize,
    pub history: Vec<ScfIterate>,
}

impl Solution {
    pub fn nu(&self) -> f64 {
        self.filling.nu
    }
}

/// avg_xi of the sum of the q lowest positive free levels inside the basis.
pub fn free_reference_energy(model: &Model) -> f64 {
    let q = model.params.q as usize;
    let mut total = 0.0;
    for xi in &model.grid.points {
        let mut lv: Vec<f64> = (0..model.basis.n_modes())
            .flat_map(|m| {
                let e = free_dispersion(model.params.c, model.basis.momentum_sq(xi, m));
                [e, e]
            })
            .collect();
        lv.sort_by(f64::total_cmp);
        total += lv.iter().take(q).sum::<f64>();
    }
    total / model.n_fibers() as f64
}

/// ||gamma - 1_[0,nu)(D_gamma) - delta||_{X cap Y}, delta the part of gamma
/// on the tie band at nu, clamped to [0, 1]. A shell that aufbau fills whole
/// counts as part of 1_[0,nu].
pub fn scf_residual(gamma: &BlochOperator, spectra: &Spectra, fill: &FillingResult, model: &Model) -> Result<f64> {
    let mut fibers = Vec::with_capacity(gamma.n_fibers());
    for (f, (g, s)) in gamma.fibers.iter().zip(spectra).enumerate() {
        let band: Vec<usize> = fill.band.iter().filter(|b| b.0 == f).map(|b| b.1).collect();
        // A whole filled shell is compared with its projector, not clamped.
        let whole = fill.fractional.is_empty();
        let below: Vec<usize> = (0..s.values.len())
            .filter(|&j| s.values[j] > 0.0 && s.values[j] < fill.nu - fill.tie_tol || whole && band.contains(&j))
            .collect();
        let band = if whole { Vec::new() } else { band };
        let mut r = g.clone();
        for &j in &below {
            let v = s.vectors.column(j);
            r -= &v * v.adjoint();
        }
        if !band.is_empty() {
            let n = g.nrows();
            let mut vb = crate::linalg::CMat::zeros(n, band.len());
            for (k, &j) in band.iter().enumerate() {
                vb.set_column(k, &s.vectors.column(j));
            }
            let small = vb.adjoint() * g * &vb;
            let e = hermitian_eigen(&small, f, model.tol.eigen_tol)?;
            let mut clamped = crate::linalg::CMat::zeros(band.len(), band.len());
            for (k, &val) in e.values.iter().enumerate() {
                let v = e.vectors.column(k);
                clamped += &v * v.adjoint() * C64::new(val.clamp(0.0, 1.0), 0.0);
            }
            r -= &vb * clamped * vb.adjoint();
        }
        fibers.push(r);
    }
    Ok(Norms::new(model).x_cap_y(&BlochOperator { fibers }))
}

/// Aufbau filling of D - z G: the exact minimizer when alpha = 0.
pub fn initial_state(model: &Model) -> Result<DensityMatrix> {
    let z = C64::new(model.params.z, 0.0);
    let d = BlochOperator { fibers: model.free.iter().map(|d| d - &model.coulomb * z).collect() };
    let spectra = spectral_decomposition(&d, model.tol.eigen_tol)?;
    let fill = aufbau_fill(&spectra, model.params.q, model.tol.tie_tol(model.params.c))?;
    Ok(filled_state(&spectra, &fill))
}

pub fn scf_solve(model: &Model, eps_pen: f64, initial: Option<&DensityMatrix>) -> Result<Solution> {
    scf_solve_with(model, eps_pen, initial, ScfOptions::from_model(model))
}

pub fn scf_solve_with(
    model: &Model,
    eps_pen: f64,
    initial: Option<&DensityMatrix>,
    opts: ScfOptions,
) -> Result<Solution> {
    let p = model.params;
    let tie = model.tol.tie_tol(p.c);
    let ropts = RetractionOptions::from_model(model);
    let start = match initial {
        Some(g) => {
            g.validate(model.n_b(), p.q_f64(), 1.0e-10)?;
            if g.n_fibers() != model.n_fibers() {
                return Err(DfError::GridMismatch(format!(
                    "state has {} fibers, grid has {}",
                    g.n_fibers(),
                    model.n_fibers()
                )));
            }
            g.clone()
        }
        None => initial_state(model)?,
    };
    let (mut gamma, first_trace) = theta_dense(&start.to_operator(), model, None, ropts)?;
    let mut e = energy(&gamma, model, eps_pen);
    let mut history = Vec::new();
    let mut last_retr = first_trace.iterations;
    let mut prev_pen = f64::NAN;
    let mut beta_used = f64::NAN;
    for iter in 0..opts.max_iter {
        let d = mean_field_operator(&gamma, model);
        let spectra = spectral_decomposition(&d, model.tol.eigen_tol)?;
        let fill = aufbau_fill(&spectra, p.q, tie)?;
        let residual = scf_residual(&gamma, &spectra, &fill, model)?;
        history.push(ScfIterate {
            iter,
            energy: e.total,
            penalized_energy: e.penalized,
            residual,
            beta: beta_used,
            retraction_iters: last_retr,
        });
        let de = (e.penalized - prev_pen).abs();
        let e_ok = iter == 0 || de <= opts.energy_tol * e.penalized.abs().max(1.0);
        if residual <= opts.residual_tol && e_ok {
            return Ok(Solution {
                gamma: DensityMatrix::from_operator(&gamma, model.tol.eigen_tol)?,
                energy: e,
                eps_pen,
                filling: fill,
                spectra,
                residual,
                iterations: iter + 1,
                history,
            });
        }
        let target = filled_state(&spectra, &fill).to_operator();
        let dir = target.sub(&gamma);
        let n = model.n_fibers() as f64;
        let slope = d.fibers.iter().zip(&dir.fibers).map(|(a, b)| trace_product(a, b).re).sum::<f64>() / n
            - eps_pen * dir.trace();
        let curv = if p.alpha == 0.0 { 0.0 } else { 0.5 * p.alpha * exchange_bilinear(&dir, &dir, model) };
        if slope >= 0.0 && residual > opts.residual_tol.max(1.0e-6) {
            return Err(DfError::NoDescent { iteration: iter, slope });
        }
        // A non-negative slope near convergence is rounding noise: try the full step.
        let mut beta = if curv > 0.0 && slope < 0.0 { (-slope / (2.0 * curv)).min(1.0) } else { 1.0 };
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let mix = gamma.add_scaled(&dir, beta);
            let (cand, tr) = theta_dense(&mix, model, None, ropts)?;
            let ce = energy(&cand, model, eps_pen);
            if ce.penalized <= e.penalized + 1.0e-12 * e.penalized.abs().max(1.0) {
                accepted = Some((cand, ce, tr.iterations));
                break;
            }
            beta *= 0.5;
        }
        let Some((cand, ce, it)) = accepted else {
            return Err(DfError::ScfNotConverged { iterations: iter + 1, residual, energy_change: de });
        };
        prev_pen = e.penalized;
        gamma = cand;
        e = ce;
        last_retr = it;
        beta_used = beta;
    }
    let last = history.last().copied();
    Err(DfError::ScfNotConverged {
        iterations: opts.max_iter,
        residual: last.map_or(f64::NAN, |h| h.residual),
        energy_change: f64::NAN,
    })
}
