//! Exchange singularity on small quasi-momentum balls.
//!
//! h^lambda moves one electron per cell from Fermi-band states on the ball
//! B(xi_1, lambda) to those on B(xi_2, lambda); Tr[V_h h] then carries a
//! divergent negative part of order lambda^-2 coming from the exchange term.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochOperator;
use crate::error::{DfError, Result};
use crate::grid::BrillouinGrid;
use crate::linalg::{hermitian_eigen, C64};
use crate::model::Model;
use crate::operators::coulomb::g_hat;
use crate::operators::mean_field::mean_field_at;
use crate::weights::RegularizedWeights;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    /// Points per axis of the exchange-only grid.
    pub n_xi_fine: u32,
    /// Ball radii in units of the fine spacing. A radius that selects the same
    /// grid points as the previous one is skipped.
    pub radii: Vec<f64>,
    /// Fine-grid index triples of the two ball centers.
    pub centers: [[usize; 3]; 2],
    /// Positive band (0 = lowest) whose eigenvectors populate the balls;
    /// defaults to q - 1.
    #[serde(default)]
    pub band: Option<usize>,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            n_xi_fine: 12,
            radii: [4.0f64, 5.0, 6.0, 8.0, 9.0, 10.0, 11.0, 12.0].iter().map(|r| r.sqrt()).collect(),
            centers: [[3, 3, 3], [8, 8, 8]],
            band: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub lambda: f64,
    /// Radius of the continuum ball with the volume of the grid ball,
    /// s (3 N / 4 pi)^{1/3}; the fits use this radius.
    pub lambda_eff: f64,
    pub n_ball: [usize; 2],
    pub hartree: f64,
    pub exchange: f64,
    /// Tr[V_h h] = hartree - exchange.
    pub trace_vh: f64,
    /// Per-cell trace of h (zero by construction).
    pub trace_h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub spacing: f64,
    pub rows: Vec<ScalingRow>,
    /// Best exponent p of a + b lambda^p over a scan of p.
    pub fitted_exponent: f64,
    /// (a, b) of the fit with p = -2.
    pub a: f64,
    pub b: f64,
    /// Relative rms misfit of the p = -2 fit.
    pub misfit: f64,
}

/// Grid indices within `radius` of the grid point `center`.
pub fn ball_members(grid: &BrillouinGrid, center: [usize; 3], radius: f64) -> Vec<usize> {
    let c = grid.points[grid.index(center[0], center[1], center[2])];
    (0..grid.len())
        .filter(|&i| {
            let p = grid.points[i];
            let d2 = (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2);
            d2 <= radius * radius * (1.0 + 1.0e-12)
        })
        .collect()
}

/// Normalized projection of a fixed reference vector onto the eigenspace of
/// `band` (counted from the first positive level) of D_{gamma, xi}, with all
/// levels within the tie tolerance included.
fn tracked_vector(gamma: &BlochOperator, xi: &[f64; 3], band: usize, point: usize, model: &Model) -> Result<Vec<C64>> {
    let d = mean_field_at(gamma, xi, model);
    let e = hermitian_eigen(&d, point, model.tol.eigen_tol)?;
    let first = e.values.iter().position(|&v| v > 0.0).unwrap_or(e.values.len());
    let j = first + band;
    if j >= e.values.len() {
        return Err(DfError::InsufficientStates { available: e.values.len() - first, required: band + 1 });
    }
    let tie = model.tol.tie_tol(model.params.c);
    let reference = 4 * model.basis.mode_index([0, 0, 0]).expect("zero mode");
    let mut v = vec![C64::new(0.0, 0.0); e.values.len()];
    for (col, &lam) in e.values.iter().enumerate() {
        if (lam - e.values[j]).abs() <= tie {
            let amp = e.vectors[(reference, col)].conj();
            for (r, out) in v.iter_mut().enumerate() {
                *out += e.vectors[(r, col)] * amp;
            }
        }
    }
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1.0e-8 {
        return Err(DfError::AmbiguousTracking(point));
    }
    Ok(v.into_iter().map(|x| x / norm).collect())
}

fn fit_fixed(x: &[f64], y: &[f64], p: f64) -> (f64, f64, f64) {
    let u: Vec<f64> = x.iter().map(|l| l.powf(p)).collect();
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let suu: f64 = u.iter().map(|a| (a - mu).powi(2)).sum();
    let suy: f64 = u.iter().zip(y).map(|(a, b)| (a - mu) * (b - my)).sum();
    let b = suy / suu;
    let a = my - b * mu;
    let rss: f64 = u.iter().zip(y).map(|(a0, b0)| (a + b * a0 - b0).powi(2)).sum();
    (a, b, rss)
}

pub fn exchange_scaling(gamma: &BlochOperator, model: &Model, cfg: &ScalingConfig) -> Result<ScalingReport> {
    let p = &model.params;
    let grid = BrillouinGrid::new(p.ell, cfg.n_xi_fine as usize)?;
    let weights = RegularizedWeights::new(&grid, &model.basis, model.tol.weights_subsample)?;
    let s = grid.spacing;
    let r_max = cfg.radii.iter().cloned().fold(0.0, f64::max) * s;
    let band = cfg.band.unwrap_or(p.q as usize - 1);
    let outer: Vec<Vec<usize>> = cfg.centers.iter().map(|c| ball_members(&grid, *c, r_max)).collect();
    for (i, b) in outer.iter().enumerate() {
        if b.iter().any(|x| outer[1 - i].contains(x)) {
            return Err(DfError::InvalidParameter { name: "scaling.centers".into(), reason: "balls overlap".into() });
        }
    }
    let points: Vec<usize> = outer.concat();
    let psi: Vec<Vec<C64>> = points
        .par_iter()
        .map(|&i| tracked_vector(gamma, &grid.points[i], band, i, model))
        .collect::<Result<_>>()?;

    let basis = &model.basis;
    let n_fine = grid.len() as f64;
    let vol = p.ell.powi(3);
    // Per-point density Fourier coefficients sum_{m,s} psi(m+p,s) conj psi(m,s).
    let dens: Vec<Vec<C64>> = psi
        .par_iter()
        .map(|v| {
            basis
                .shift_pairs
                .iter()
                .map(|pairs| {
                    let mut acc = C64::new(0.0, 0.0);
                    for &(m, mk) in pairs {
                        for sp in 0..4 {
                            acc += v[4 * mk + sp] * v[4 * m + sp].conj();
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    // kernel[i][j] = sum_k w(k, xi_j, xi_i) |<psi_i, tau_k psi_j>|^2.
    let np = points.len();
    let kernel: Vec<Vec<f64>> = (0..np)
        .into_par_iter()
        .map(|i| {
            (0..np)
                .map(|j| {
                    let mut acc = 0.0;
                    for (k, pairs) in basis.shift_pairs.iter().enumerate() {
                        let mut ov = C64::new(0.0, 0.0);
                        for &(m, mk) in pairs {
                            for sp in 0..4 {
                                ov += psi[i][4 * mk + sp].conj() * psi[j][4 * m + sp];
                            }
                        }
                        acc += weights.weight(k, points[j], points[i]) * ov.norm_sqr();
                    }
                    acc
                })
                .collect()
        })
        .collect();

    let mut rows = Vec::new();
    for &r in &cfg.radii {
        let lambda = r * s;
        let mut coef = vec![0.0; np];
        let mut n_ball = [0usize; 2];
        for (bi, ball) in outer.iter().enumerate() {
            let members = ball_members(&grid, cfg.centers[bi], lambda);
            if bi == 0 && rows.last().is_some_and(|r: &ScalingRow| r.n_ball[0] == members.len()) {
                n_ball[0] = 0;
                break;
            }
            n_ball[bi] = members.len();
            if members.is_empty() {
                return Err(DfError::InvalidParameter { name: "scaling.radii".into(), reason: "empty ball".into() });
            }
            let eta = n_fine / members.len() as f64;
            let sign = if bi == 0 { 1.0 } else { -1.0 };
            let offset = if bi == 0 { 0 } else { outer[0].len() };
            for (local, idx) in ball.iter().enumerate() {
                if members.contains(idx) {
                    coef[offset + local] = sign * eta;
                }
            }
        }
        if n_ball[0] == 0 {
            continue;
        }
        let trace_h = coef.iter().sum::<f64>() / n_fine;
        let mut rho = vec![C64::new(0.0, 0.0); basis.shifts.len()];
        for (i, c) in coef.iter().enumerate() {
            if *c != 0.0 {
                for (acc, d) in rho.iter_mut().zip(&dens[i]) {
                    *acc += d * (*c / (n_fine * vol));
                }
            }
        }
        let hartree = vol
            * vol
            * basis.shifts.iter().zip(&rho).map(|(q, v)| g_hat(*q, p.ell) * v.norm_sqr()).sum::<f64>();
        let mut exchange = 0.0;
        for i in 0..np {
            if coef[i] == 0.0 {
                continue;
            }
            for j in 0..np {
                if coef[j] != 0.0 {
                    exchange += coef[i] * coef[j] * kernel[i][j];
                }
            }
        }
        exchange *= 4.0 * std::f64::consts::PI / vol / (n_fine * n_fine);
        let lambda_eff = s * (3.0 * n_ball[0] as f64 / (4.0 * std::f64::consts::PI)).cbrt();
        rows.push(ScalingRow { lambda, lambda_eff, n_ball, hartree, exchange, trace_vh: hartree - exchange, trace_h });
    }

    let x: Vec<f64> = rows.iter().map(|r| r.lambda_eff).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.trace_vh).collect();
    let mut best = (f64::INFINITY, f64::NAN);
    for step in 0..=400 {
        let pe = -4.0 + 0.01 * step as f64;
        if pe.abs() < 1.0e-9 {
            continue;
        }
        let (_, _, rss) = fit_fixed(&x, &y, pe);
        if rss < best.0 {
            best = (rss, pe);
        }
    }
    let (a, b, rss) = fit_fixed(&x, &y, -2.0);
    let scale = (y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64).sqrt().max(f64::MIN_POSITIVE);
    let misfit = (rss / y.len() as f64).sqrt() / scale;
    Ok(ScalingReport { spacing: s, rows, fitted_exponent: best.1, a, b, misfit })
}

