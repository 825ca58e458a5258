//! Fourier coefficients of the density of a Bloch operator, and the Hartree
//! potential rho * G in the plane-wave basis.

use crate::basis::PlaneWaveBasis;
use crate::bloch::BlochOperator;
use crate::linalg::{CMat, C64};
use crate::operators::coulomb::g_hat;

/// rho(x) = sum_p values[p] e^{2 i pi p.x / ell}, p over `basis.shifts`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFourier {
    pub values: Vec<C64>,
}

impl DensityFourier {
    /// Real-space value at x (for checks).
    pub fn eval(&self, basis: &PlaneWaveBasis, x: &[f64; 3]) -> f64 {
        let g = 2.0 * std::f64::consts::PI / basis.ell;
        let mut acc = C64::new(0.0, 0.0);
        for (p, v) in basis.shifts.iter().zip(&self.values) {
            let ph = g * (p[0] as f64 * x[0] + p[1] as f64 * x[1] + p[2] as f64 * x[2]);
            acc += v * C64::new(ph.cos(), ph.sin());
        }
        acc.re
    }
}

/// rho_hat(p) = ell^-3 avg_xi sum_{m,s} gamma_xi[(m+p, s), (m, s)].
pub fn density_fourier(gamma: &BlochOperator, basis: &PlaneWaveBasis) -> DensityFourier {
    let vol = basis.ell.powi(3);
    let w = 1.0 / (gamma.n_fibers() as f64 * vol);
    let values = basis
        .shift_pairs
        .iter()
        .map(|pairs| {
            let mut acc = C64::new(0.0, 0.0);
            for m in &gamma.fibers {
                for &(src, dst) in pairs {
                    for s in 0..4 {
                        acc += m[(4 * dst + s, 4 * src + s)];
                    }
                }
            }
            acc * w
        })
        .collect();
    DensityFourier { values }
}

/// (rho * G) as a multiplication operator: entries ell^3 g_hat(a-b) rho_hat(a-b).
pub fn hartree_matrix(rho: &DensityFourier, basis: &PlaneWaveBasis) -> CMat {
    let n = basis.n_b();
    let vol = basis.ell.powi(3);
    let mut h = CMat::zeros(n, n);
    for a in 0..basis.n_modes() {
        for b in 0..basis.n_modes() {
            let (ma, mb) = (basis.modes[a], basis.modes[b]);
            let p = [ma[0] - mb[0], ma[1] - mb[1], ma[2] - mb[2]];
            let g = g_hat(p, basis.ell);
            if g == 0.0 {
                continue;
            }
            let idx = basis.shift_index(p).expect("difference inside shift set");
            let v = rho.values[idx] * (vol * g);
            for s in 0..4 {
                h[(4 * a + s, 4 * b + s)] = v;
            }
        }
    }
    h
}
