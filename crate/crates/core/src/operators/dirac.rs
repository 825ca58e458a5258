//! Free Dirac fiber D_xi = c alpha . (xi - i grad) + c^2 beta.

use crate::basis::PlaneWaveBasis;
use crate::linalg::{CMat, C64};

fn pauli(k: usize) -> [[C64; 2]; 2] {
    let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    match k {
        0 => [[z, o], [o, z]],
        1 => [[z, -i], [i, z]],
        _ => [[o, z], [z, -o]],
    }
}

/// 4x4 block c sum_k alpha_k p_k + c^2 beta, beta = diag(1, 1, -1, -1).
pub fn dirac_block(p: &[f64; 3], c: f64) -> [[C64; 4]; 4] {
    let mut b = [[C64::new(0.0, 0.0); 4]; 4];
    for (k, pk) in p.iter().enumerate() {
        let s = pauli(k);
        for r in 0..2 {
            for col in 0..2 {
                let v = s[r][col] * (c * pk);
                b[r][col + 2] += v;
                b[r + 2][col] += v;
            }
        }
    }
    let c2 = c * c;
    b[0][0] += c2;
    b[1][1] += c2;
    b[2][2] -= c2;
    b[3][3] -= c2;
    b
}

/// sqrt(c^4 + c^2 |p|^2).
pub fn free_dispersion(c: f64, p_sq: f64) -> f64 {
    (c * c * c * c + c * c * p_sq).sqrt()
}

pub fn free_dirac_at(basis: &PlaneWaveBasis, xi: &[f64; 3], c: f64) -> CMat {
    let n = basis.n_b();
    let mut d = CMat::zeros(n, n);
    for m in 0..basis.n_modes() {
        let blk = dirac_block(&basis.momentum(xi, m), c);
        for r in 0..4 {
            for col in 0..4 {
                d[(4 * m + r, 4 * m + col)] = blk[r][col];
            }
        }
    }
    d
}
