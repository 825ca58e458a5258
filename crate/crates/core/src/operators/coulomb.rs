//! Periodic Coulomb potential G_ell with zero mean.

use crate::basis::PlaneWaveBasis;
use crate::linalg::{CMat, C64};

/// Fourier coefficient 1 / (pi ell |p|^2), zero at p = 0.
pub fn g_hat(p: [i32; 3], ell: f64) -> f64 {
    let n2 = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) as f64;
    if n2 == 0.0 {
        0.0
    } else {
        1.0 / (std::f64::consts::PI * ell * n2)
    }
}

/// Multiplication by G_ell in the plane-wave basis (independent of xi).
pub fn coulomb_matrix(basis: &PlaneWaveBasis) -> CMat {
    let n = basis.n_b();
    let mut g = CMat::zeros(n, n);
    for a in 0..basis.n_modes() {
        for b in 0..basis.n_modes() {
            let (ma, mb) = (basis.modes[a], basis.modes[b]);
            let v = g_hat([ma[0] - mb[0], ma[1] - mb[1], ma[2] - mb[2]], basis.ell);
            if v != 0.0 {
                for s in 0..4 {
                    g[(4 * a + s, 4 * b + s)] = C64::new(v, 0.0);
                }
            }
        }
    }
    g
}
