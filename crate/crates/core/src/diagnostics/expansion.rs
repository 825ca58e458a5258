//! Second-order expansion of the retracted, penalized energy
//! E(gamma) = Ecal(theta gamma) - eps_P Tr theta gamma around a minimizer:
//!
//! E(gamma + t h) = E(gamma) + t Tr[(D_gamma - eps_P) h] + (alpha t^2 / 2) Tr[V_h h]
//!                  + t^2 alpha_c^2 Err(t),   |Err| <= (2 + eps_P / c^2) N_{gamma + t h}(h).
//!
//! The residual is O(t^2) against O(1) energies, so theta(gamma + t h) is
//! computed as an offset from gamma in the eigenbasis of D_gamma; rounding
//! then scales with t instead of with the energy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochOperator;
use crate::constants::Constants;
use crate::error::{DfError, Result};
use crate::linalg::{max_abs, trace_norm_hermitian, CMat, C64};
use crate::model::Model;
use crate::operators::mean_field::{interaction_operator, mean_field_operator};
use crate::operators::spectral::spectral_decomposition;
use crate::params::Mode;
use crate::retraction::{apply_t, membership, theta_dense, RetractionOptions};
use crate::states::{energy, exchange_bilinear, Norms};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRow {
    pub t: f64,
    pub retracted: f64,
    pub quadratic_model: f64,
    pub residual: f64,
    /// residual / (t^2 alpha_c^2); NaN when alpha = 0.
    pub err: f64,
    /// (2 + eps_P / c^2) N_{gamma + t h}(h).
    pub bound: f64,
    pub bound_holds: bool,
    pub in_u_r: bool,
    /// Max entry of the offset-form limit minus the plain iterated retraction.
    pub theta_agreement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub rows: Vec<ExpansionRow>,
    /// log-log slope of |residual| against t (alpha > 0).
    pub slope: f64,
    pub linear_term: f64,
    pub quadratic_term: f64,
    pub base_energy: f64,
    pub max_rel_residual: f64,
}

/// gamma and D_gamma in the eigenbasis of D_gamma: D = U diag(lam) U^*,
/// gamma = U diag(occ) U^* with occ supported on the positive levels.
pub struct Frame {
    pub u: Vec<CMat>,
    pub lam: Vec<Vec<f64>>,
    pub first_positive: Vec<usize>,
    pub occ: Vec<Vec<f64>>,
}

impl Frame {
    /// Polishes gamma onto Gamma+ and diagonalizes its mean-field operator.
    pub fn new(gamma: &BlochOperator, model: &Model) -> Result<Self> {
        let base = polish(gamma, model)?;
        let spectra = spectral_decomposition(&mean_field_operator(&base, model), model.tol.eigen_tol)?;
        let mut frame = Frame { u: vec![], lam: vec![], first_positive: vec![], occ: vec![] };
        for (s, g) in spectra.into_iter().zip(&base.fibers) {
            let fp = s.first_positive();
            let rot = s.vectors.adjoint() * g * &s.vectors;
            let occ = (0..s.values.len()).map(|j| if j < fp { 0.0 } else { rot[(j, j)].re.clamp(0.0, 1.0) }).collect();
            frame.first_positive.push(fp);
            frame.lam.push(s.values);
            frame.u.push(s.vectors);
            frame.occ.push(occ);
        }
        Ok(frame)
    }

    pub fn to_plane_waves(&self, local: &[CMat]) -> BlochOperator {
        BlochOperator { fibers: local.iter().zip(&self.u).map(|(m, u)| u * m * u.adjoint()).collect() }
    }

    pub fn base(&self) -> BlochOperator {
        let diag: Vec<CMat> = self.occ.iter().map(|o| diag_matrix(o)).collect();
        self.to_plane_waves(&diag)
    }

    /// Offset theta(gamma + delta0) - gamma in frame coordinates.
    pub fn retract_offset(&self, delta0: &[CMat], model: &Model) -> Result<Vec<CMat>> {
        let mut delta = delta0.to_vec();
        let alpha = model.params.alpha;
        if alpha == 0.0 {
            return Ok(delta);
        }
        let mut last = f64::INFINITY;
        for _ in 0..100 {
            let v = interaction_operator(&self.to_plane_waves(&delta), model);
            let next: Vec<CMat> = (0..delta.len())
                .into_par_iter()
                .map(|f| {
                    let u = &self.u[f];
                    let e = (u.adjoint() * &v.fibers[f] * u) * C64::new(alpha, 0.0);
                    let pi = projector_shift(&self.lam[f], self.first_positive[f], &e);
                    let mut s = &delta[f] + diag_matrix(&self.occ[f]);
                    let fp = self.first_positive[f];
                    let mut p0s = s.clone();
                    p0s.rows_mut(0, fp).fill(C64::new(0.0, 0.0));
                    let mut p0d = delta[f].clone();
                    p0d.rows_mut(0, fp).fill(C64::new(0.0, 0.0));
                    p0d.columns_mut(0, fp).fill(C64::new(0.0, 0.0));
                    s = &pi * &s;
                    let mut pis_p0 = s.clone() * &pi;
                    let mut sp0 = s;
                    sp0.columns_mut(0, fp).fill(C64::new(0.0, 0.0));
                    let p0s_pi = &p0s * &pi;
                    pis_p0 += sp0 + p0s_pi + p0d;
                    pis_p0
                })
                .collect();
            let change = next.iter().zip(&delta).map(|(a, b)| max_abs(&(a - b))).fold(0.0, f64::max);
            let scale = next.iter().map(max_abs).fold(0.0, f64::max);
            delta = next;
            if change <= 1.0e-16 * scale || change >= last {
                break;
            }
            last = change;
        }
        Ok(delta)
    }
}

fn diag_matrix(d: &[f64]) -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_iterator(d.len(), d.iter().map(|x| C64::new(*x, 0.0))))
}

/// P+(diag(lam) + e) - P+(diag(lam)) from the Riccati equation for the
/// graph X of the positive invariant subspace span [X; I]:
/// X L+ - L- X = E_np + E_nn X - X E_pp - X E_pn X.
fn projector_shift(lam: &[f64], fp: usize, e: &CMat) -> CMat {
    let n = lam.len();
    let np = n - fp;
    let e_nn = e.view((0, 0), (fp, fp));
    let e_np = e.view((0, fp), (fp, np));
    let e_pn = e.view((fp, 0), (np, fp));
    let e_pp = e.view((fp, fp), (np, np));
    let mut x = CMat::zeros(fp, np);
    for _ in 0..200 {
        let rhs = e_np + e_nn * &x - &x * e_pp - &x * e_pn * &x;
        let next = CMat::from_fn(fp, np, |i, j| rhs[(i, j)] / (lam[fp + j] - lam[i]));
        let change = max_abs(&(&next - &x));
        let scale = max_abs(&next);
        x = next;
        if change <= 1.0e-17 + 1.0e-16 * scale {
            break;
        }
    }
    let xtx = x.adjoint() * &x;
    let g = (CMat::identity(np, np) + &xtx).try_inverse().expect("I + X*X is positive definite");
    let mut pi = CMat::zeros(n, n);
    pi.view_mut((0, 0), (fp, fp)).copy_from(&(&x * &g * x.adjoint()));
    pi.view_mut((0, fp), (fp, np)).copy_from(&(&x * &g));
    pi.view_mut((fp, 0), (np, fp)).copy_from(&(&g * x.adjoint()));
    pi.view_mut((fp, fp), (np, np)).copy_from(&(-(&g * xtx)));
    pi
}

/// Apply T until the step stops shrinking.
fn polish(gamma: &BlochOperator, model: &Model) -> Result<BlochOperator> {
    let norms = Norms::new(model);
    let mut cur = gamma.clone();
    let mut last = f64::INFINITY;
    for _ in 0..20 {
        let (next, _) = apply_t(&cur, model)?;
        let step = norms.xc_cap_yc(&next.sub(&cur));
        cur = next;
        if step >= 0.5 * last || step == 0.0 {
            break;
        }
        last = step;
    }
    Ok(cur)
}

/// Direction moving one electron from the highest occupied to the lowest
/// unoccupied positive level of D_gamma (possibly on different fibers), in
/// frame coordinates.
pub fn fermi_direction(frame: &Frame) -> Result<Vec<CMat>> {
    let mut homo: Option<(f64, usize, usize)> = None;
    let mut lumo: Option<(f64, usize, usize)> = None;
    for f in 0..frame.u.len() {
        for j in frame.first_positive[f]..frame.lam[f].len() {
            let (e, occ) = (frame.lam[f][j], frame.occ[f][j]);
            if occ > 0.5 && homo.is_none_or(|h| e > h.0) {
                homo = Some((e, f, j));
            }
            if occ < 0.5 && lumo.is_none_or(|l| e < l.0) {
                lumo = Some((e, f, j));
            }
        }
    }
    let (Some(h), Some(l)) = (homo, lumo) else {
        return Err(DfError::HypothesisViolated("no occupied/unoccupied pair for the direction".into()));
    };
    let n = frame.lam[0].len();
    let mut out = vec![CMat::zeros(n, n); frame.u.len()];
    out[l.1][(l.2, l.2)] += C64::new(1.0, 0.0);
    out[h.1][(h.2, h.2)] -= C64::new(1.0, 0.0);
    Ok(out)
}

/// N_gamma(h).
pub fn error_functional(gamma: &BlochOperator, h: &BlochOperator, model: &Model, consts: &Constants) -> f64 {
    let p = &model.params;
    let d = &consts.derived;
    let norms = Norms::new(model);
    let local = norms.x_cap_y_conv_local(h);
    let n = model.n_fibers() as f64;
    let s1: Vec<f64> = gamma.fibers.iter().map(trace_norm_hermitian).collect();
    let absd = norms.absd_per_fiber(gamma);
    let c_ee = consts.c_ee.value;
    let one_k = 1.0 - d.kappa;
    let t1 = c_ee * c_ee / (2.0 * one_k * one_k * d.lambda0)
        * local.iter().zip(&s1).map(|(a, b)| a * a * b).sum::<f64>()
        / n;
    let (ac, q, r) = (p.alpha_c(), p.q_f64(), consts.r.value);
    let pre = (q * ac * ac + r * ac * ac + ac) * 10.0 * c_ee.powi(4)
        / (one_k.powi(4) * d.lambda0.powf(2.5) * (1.0 - d.l).powi(2));
    let avg_term = local.iter().zip(&absd).map(|(a, b)| a * b).sum::<f64>() / n / p.c;
    let conv = norms.y_conv_local_from(&local).into_iter().fold(0.0, f64::max) / p.c;
    t1 + pre * (avg_term + conv).powi(2)
}

fn avg_diag_pairing(frame: &Frame, m: &[CMat], shift: f64) -> f64 {
    let s: f64 = m
        .iter()
        .zip(&frame.lam)
        .map(|(x, lam)| lam.iter().enumerate().map(|(j, l)| (l - shift) * x[(j, j)].re).sum::<f64>())
        .sum();
    s / m.len() as f64
}

pub fn expansion_check(
    gamma: &BlochOperator,
    model: &Model,
    consts: &Constants,
    eps_pen: f64,
    ts: &[f64],
    mode: Mode,
) -> Result<ExpansionReport> {
    let p = model.params;
    if mode == Mode::Strict && p.alpha > 0.0 && !(consts.derived.kappa < 1.0 && consts.derived.l < 1.0) {
        return Err(DfError::HypothesisViolated(format!(
            "need kappa < 1 and L < 1, have kappa = {}, L = {}",
            consts.derived.kappa, consts.derived.l
        )));
    }
    let frame = Frame::new(gamma, model)?;
    let base = frame.base();
    let h_local = fermi_direction(&frame)?;
    let h = frame.to_plane_waves(&h_local);
    let lin = avg_diag_pairing(&frame, &h_local, eps_pen);
    let b_hh = if p.alpha == 0.0 { 0.0 } else { exchange_bilinear(&h, &h, model) };
    let quad = 0.5 * p.alpha * b_hh;
    let e0 = energy(&base, model, eps_pen).penalized;
    let ropts = RetractionOptions { tol: 1.0e-3 * model.tol.retraction_tol(p.c), ..RetractionOptions::from_model(model) };
    let ac2 = p.alpha_c() * p.alpha_c();
    let factor = 2.0 + eps_pen / p.c2();
    let mut rows = Vec::new();
    for &t in ts {
        let moved = base.add_scaled(&h, t);
        let in_u_r = membership(&moved, model, consts)?.member;
        if !in_u_r && mode == Mode::Strict {
            return Err(DfError::HypothesisViolated(format!("gamma + t h leaves U_R at t = {t}")));
        }
        let start: Vec<CMat> = h_local.iter().map(|m| m * C64::new(t, 0.0)).collect();
        let offset = frame.retract_offset(&start, model)?;
        let delta = frame.to_plane_waves(&offset);
        let retracted = base.add_scaled(&delta, 1.0);
        let theta_agreement = match theta_dense(&moved, model, None, ropts) {
            Ok((r, _)) => r.sub(&retracted).max_abs(),
            Err(DfError::NonContraction { .. }) | Err(DfError::RetractionMaxIter { .. }) => f64::NAN,
            Err(e) => return Err(e),
        };
        // E is quadratic: E(gamma + delta) - E(gamma) = Tr[(D_gamma - eps) delta] + (alpha/2) B(delta, delta).
        let off: Vec<CMat> = offset.iter().zip(&start).map(|(a, b)| a - b).collect();
        let mut residual = avg_diag_pairing(&frame, &off, eps_pen);
        if p.alpha > 0.0 {
            residual += 0.5 * p.alpha * (exchange_bilinear(&delta, &delta, model) - t * t * b_hh);
        }
        let mdl = e0 + t * lin + t * t * quad;
        let (err, bound) = if p.alpha == 0.0 {
            (f64::NAN, 0.0)
        } else {
            (residual / (t * t * ac2), factor * error_functional(&moved, &h, model, consts))
        };
        rows.push(ExpansionRow {
            t,
            retracted: mdl + residual,
            quadratic_model: mdl,
            residual,
            err,
            bound,
            bound_holds: p.alpha == 0.0 || err.abs() <= bound,
            in_u_r,
            theta_agreement,
        });
    }
    let slope = super::loglog_slope(
        &rows.iter().map(|r| r.t).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.residual).collect::<Vec<_>>(),
    );
    let max_rel_residual = rows.iter().map(|r| r.residual.abs() / r.retracted.abs().max(1.0)).fold(0.0, f64::max);
    Ok(ExpansionReport { rows, slope, linear_term: lin, quadratic_term: quad, base_energy: e0, max_rel_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projector_shift_matches_eigenprojector() {
        let lam = [-3.0, -2.5, 1.0, 2.0, 4.0];
        let n = lam.len();
        let mut e = CMat::from_fn(n, n, |i, j| C64::new(0.01 * (i + 2 * j) as f64, 0.02 * (i as f64 - j as f64)));
        e = (&e + e.adjoint()) * C64::new(0.5, 0.0);
        let shifted = diag_matrix(&lam) + &e;
        let eig = crate::linalg::hermitian_eigen(&shifted, 0, 1.0e-12).expect("eigen");
        let v = eig.vectors.columns(2, 3);
        let p_plus = &v * v.adjoint();
        let p0 = diag_matrix(&[0.0, 0.0, 1.0, 1.0, 1.0]);
        let pi = projector_shift(&lam, 2, &e);
        assert!(max_abs(&(p_plus - p0 - pi)) <= 1.0e-13);
    }
}
