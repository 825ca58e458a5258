//! Plane-wave basis {e^{i(xi + 2 pi k / ell) x} e_s : |k|_inf <= k_cut}.
//!
//! Basis index = mode * 4 + spinor, modes lexicographic in (k1, k2, k3).

pub const SPINOR: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWaveBasis {
    pub k_cut: i32,
    pub ell: f64,
    pub modes: Vec<[i32; 3]>,
    /// Shift vectors with |k|_inf <= 2 k_cut, lexicographic.
    pub shifts: Vec<[i32; 3]>,
    /// For each shift k: (m, m + k) mode pairs with both inside the basis.
    pub shift_pairs: Vec<Vec<(usize, usize)>>,
}

impl PlaneWaveBasis {
    pub fn new(k_cut: u32, ell: f64) -> Self {
        let kc = k_cut as i32;
        let modes = cube(kc);
        let shifts = cube(2 * kc);
        let mut shift_pairs = Vec::with_capacity(shifts.len());
        for k in &shifts {
            let mut pairs = Vec::new();
            for (i, m) in modes.iter().enumerate() {
                let t = [m[0] + k[0], m[1] + k[1], m[2] + k[2]];
                if let Some(j) = mode_index(kc, t) {
                    pairs.push((i, j));
                }
            }
            shift_pairs.push(pairs);
        }
        PlaneWaveBasis { k_cut: kc, ell, modes, shifts, shift_pairs }
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn n_b(&self) -> usize {
        self.modes.len() * SPINOR
    }

    pub fn mode_index(&self, m: [i32; 3]) -> Option<usize> {
        mode_index(self.k_cut, m)
    }

    pub fn shift_index(&self, k: [i32; 3]) -> Option<usize> {
        mode_index(2 * self.k_cut, k)
    }

    /// xi + 2 pi m / ell.
    pub fn momentum(&self, xi: &[f64; 3], mode: usize) -> [f64; 3] {
        let m = self.modes[mode];
        let g = 2.0 * std::f64::consts::PI / self.ell;
        [xi[0] + g * m[0] as f64, xi[1] + g * m[1] as f64, xi[2] + g * m[2] as f64]
    }

    pub fn momentum_sq(&self, xi: &[f64; 3], mode: usize) -> f64 {
        let p = self.momentum(xi, mode);
        p[0] * p[0] + p[1] * p[1] + p[2] * p[2]
    }
}

fn cube(r: i32) -> Vec<[i32; 3]> {
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                out.push([a, b, c]);
            }
        }
    }
    out
}

fn mode_index(r: i32, m: [i32; 3]) -> Option<usize> {
    if m.iter().any(|x| x.abs() > r) {
        return None;
    }
    let w = (2 * r + 1) as usize;
    let f = |x: i32| (x + r) as usize;
    Some((f(m[0]) * w + f(m[1])) * w + f(m[2]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        for kc in 0..3u32 {
            let b = PlaneWaveBasis::new(kc, 1.0);
            let w = (2 * kc + 1) as usize;
            assert_eq!(b.n_b(), 4 * w * w * w);
            assert_eq!(b.shifts.len(), (4 * kc as usize + 1).pow(3));
        }
    }

    #[test]
    fn lexicographic_order_and_index() {
        let b = PlaneWaveBasis::new(1, 1.0);
        assert_eq!(b.modes[0], [-1, -1, -1]);
        assert_eq!(b.modes[13], [0, 0, 0]);
        for (i, m) in b.modes.iter().enumerate() {
            assert_eq!(b.mode_index(*m), Some(i));
        }
        assert_eq!(b.mode_index([2, 0, 0]), None);
    }

    #[test]
    fn shift_pairs_consistent() {
        let b = PlaneWaveBasis::new(1, 1.0);
        for (s, k) in b.shifts.iter().enumerate() {
            for &(i, j) in &b.shift_pairs[s] {
                let mi = b.modes[i];
                let mj = b.modes[j];
                assert_eq!([mi[0] + k[0], mi[1] + k[1], mi[2] + k[2]], mj);
            }
        }
        let zero = b.shift_index([0, 0, 0]).expect("zero shift");
        assert_eq!(b.shift_pairs[zero].len(), 27);
    }
}
