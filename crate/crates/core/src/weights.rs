//! Exchange kernel weights w(k, xi_i, xi_j) = 1 / |2 pi k / ell - (xi_i - xi_j)|^2.
//!
//! The single singular entry (k = 0, i = j) is replaced by the average of
//! 1/|eta|^2 over the grid voxel centred at the origin, computed by midpoint
//! sub-sampling. Off-grid targets (band paths) use the average over a ball of
//! the voxel's volume, blended smoothly into the pointwise formula.

use crate::basis::PlaneWaveBasis;
use crate::error::{DfError, Result};
use crate::grid::BrillouinGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedWeights {
    pub spacing: f64,
    pub subsample: usize,
    /// Voxel average of 1/|eta|^2, used for k = 0, i = j.
    pub singular: f64,
    /// Smallest non-singular denominator over the grid and shift set.
    pub min_denominator: f64,
    recip: f64,
    points: Vec<[f64; 3]>,
    shifts: Vec<[i32; 3]>,
}

/// Midpoint average of 1/|u|^2 over the unit cube [-1/2, 1/2)^3.
pub fn unit_cube_inverse_square_mean(subsample: usize) -> f64 {
    let n = subsample.max(2);
    let u: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64 - 0.5).collect();
    let mut total = 0.0;
    for &x in &u {
        let mut plane = 0.0;
        for &y in &u {
            let r2 = x * x + y * y;
            let mut line = 0.0;
            for &z in &u {
                line += 1.0 / (r2 + z * z);
            }
            plane += line;
        }
        total += plane;
    }
    total / (n * n * n) as f64
}

/// Mean of 1/|x|^2 over a ball of radius `a` whose centre is at distance `d`.
pub fn ball_inverse_square_mean(a: f64, d: f64) -> f64 {
    let u = d / a;
    if u < 1.0e-2 {
        let u2 = u * u;
        return 3.0 / (a * a) * (1.0 - u2 / 3.0 - u2 * u2 / 15.0);
    }
    let diff = (a - d).abs();
    let log = if diff == 0.0 { 0.0 } else { ((a + d) / diff).ln() };
    let bracket = 0.5 * (a * a - d * d) * log + a * d;
    3.0 / (4.0 * std::f64::consts::PI * a * a * a) * (2.0 * std::f64::consts::PI / d) * bracket
}

impl RegularizedWeights {
    pub fn new(grid: &BrillouinGrid, basis: &PlaneWaveBasis, subsample: usize) -> Result<Self> {
        let s = grid.spacing;
        let singular = unit_cube_inverse_square_mean(subsample) / (s * s);
        let n = grid.n_xi as i64;
        // Grid differences are s * d with d integer in (-n, n)^3, and
        // 2 pi k / ell = s * n * k, so every denominator is s^2 |n k - d|^2.
        let mut min_den = f64::INFINITY;
        for k in &basis.shifts {
            for d0 in -(n - 1)..n {
                for d1 in -(n - 1)..n {
                    for d2 in -(n - 1)..n {
                        let v = [
                            (n * k[0] as i64 - d0) as f64,
                            (n * k[1] as i64 - d1) as f64,
                            (n * k[2] as i64 - d2) as f64,
                        ];
                        let den = s * s * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
                        if den > 0.0 && den < min_den {
                            min_den = den;
                        }
                    }
                }
            }
        }
        let threshold = 1.0e-12 * s * s;
        if min_den < threshold {
            return Err(DfError::DegenerateKernel { value: min_den, threshold });
        }
        Ok(RegularizedWeights {
            spacing: s,
            subsample,
            singular,
            min_denominator: min_den,
            recip: 2.0 * std::f64::consts::PI / grid.ell,
            points: grid.points.clone(),
            shifts: basis.shifts.clone(),
        })
    }

    fn eta(&self, k: [i32; 3], src: &[f64; 3], target: &[f64; 3]) -> [f64; 3] {
        let g = self.recip;
        [
            g * k[0] as f64 - (src[0] - target[0]),
            g * k[1] as f64 - (src[1] - target[1]),
            g * k[2] as f64 - (src[2] - target[2]),
        ]
    }

    /// w(k, xi_src, xi_target) for grid indices; `shift` indexes `basis.shifts`.
    #[inline]
    pub fn weight(&self, shift: usize, src: usize, target: usize) -> f64 {
        let k = self.shifts[shift];
        if src == target && k == [0, 0, 0] {
            return self.singular;
        }
        let e = self.eta(k, &self.points[src], &self.points[target]);
        1.0 / (e[0] * e[0] + e[1] * e[1] + e[2] * e[2])
    }

    /// Weight for an arbitrary target quasi-momentum (continuous in `target`).
    pub fn weight_at(&self, shift: usize, src: usize, target: &[f64; 3]) -> f64 {
        let e = self.eta(self.shifts[shift], &self.points[src], target);
        let d = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
        let s = self.spacing;
        let (lo, hi) = (3.0 * s, 4.0 * s);
        if d >= hi {
            return 1.0 / (d * d);
        }
        let a = s * (3.0 / (4.0 * std::f64::consts::PI)).cbrt();
        let ball = ball_inverse_square_mean(a, d);
        if d <= lo {
            return ball;
        }
        let x = (d - lo) / (hi - lo);
        let t = x * x * (3.0 - 2.0 * x);
        (1.0 - t) * ball + t / (d * d)
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    /// sup_xi of the zone average of w(0, xi', xi) (the constant C_Y).
    pub fn c_y(&self, zero_shift: usize) -> f64 {
        let n = self.points.len();
        let w = 1.0 / n as f64;
        (0..n)
            .map(|t| (0..n).map(|s| self.weight(zero_shift, s, t)).sum::<f64>() * w)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsample_stability() {
        let a = unit_cube_inverse_square_mean(64);
        let b = unit_cube_inverse_square_mean(128);
        assert!(((a - b) / b).abs() <= 0.01);
    }

    #[test]
    fn singular_entry_scales_with_spacing() {
        // ell = 2 pi, n_xi = 2: spacing 1/2 and voxel [-1/4, 1/4)^3.
        let grid = BrillouinGrid::new(2.0 * std::f64::consts::PI, 2).expect("grid");
        let basis = PlaneWaveBasis::new(0, grid.ell);
        let w = RegularizedWeights::new(&grid, &basis, 32).expect("weights");
        assert!((grid.spacing - 0.5).abs() <= 1.0e-15);
        let direct = {
            let n = 32;
            let h = 0.5 / n as f64;
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let x = -0.25 + h * (i as f64 + 0.5);
                        let y = -0.25 + h * (j as f64 + 0.5);
                        let z = -0.25 + h * (k as f64 + 0.5);
                        acc += 1.0 / (x * x + y * y + z * z);
                    }
                }
            }
            acc / (n * n * n) as f64
        };
        assert!(((w.singular - direct) / direct).abs() <= 1.0e-12);
    }

    #[test]
    fn pointwise_entries_and_symmetry() {
        let grid = BrillouinGrid::new(3.0, 3).expect("grid");
        let basis = PlaneWaveBasis::new(1, grid.ell);
        let w = RegularizedWeights::new(&grid, &basis, 16).expect("weights");
        assert!(w.min_denominator >= grid.spacing * grid.spacing * (1.0 - 1.0e-12));
        for (s, k) in basis.shifts.iter().enumerate() {
            let minus = basis.shift_index([-k[0], -k[1], -k[2]]).expect("shift");
            for i in 0..grid.len() {
                for j in 0..grid.len() {
                    let a = w.weight(s, i, j);
                    let b = w.weight(minus, j, i);
                    assert!((a - b).abs() <= 1.0e-12 * a.abs());
                    assert!(a > 0.0);
                }
            }
        }
    }

    #[test]
    fn ball_mean_limits() {
        let a = 0.7;
        assert!((ball_inverse_square_mean(a, 0.0) - 3.0 / (a * a)).abs() <= 1.0e-14);
        // Far away the ball looks like a point.
        let d = 50.0;
        let v = ball_inverse_square_mean(a, d);
        assert!(((v * d * d) - 1.0).abs() <= 1.0e-3);
        // Continuity across the series switch and across d = a.
        let e = 1.0e-2 * a;
        let l = ball_inverse_square_mean(a, e * (1.0 - 1.0e-9));
        let r = ball_inverse_square_mean(a, e * (1.0 + 1.0e-9));
        assert!((l - r).abs() <= 1.0e-9 * l);
        let l = ball_inverse_square_mean(a, a * (1.0 - 1.0e-7));
        let r = ball_inverse_square_mean(a, a * (1.0 + 1.0e-7));
        assert!((l - r).abs() <= 1.0e-5 * l);
    }

    #[test]
    fn ball_mean_matches_quadrature() {
        let a = 1.0;
        let d = 0.4;
        let n = 120;
        let h = 2.0 * a / n as f64;
        let (mut acc, mut count) = (0.0, 0usize);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let x = -a + h * (i as f64 + 0.5);
                    let y = -a + h * (j as f64 + 0.5);
                    let z = -a + h * (k as f64 + 0.5);
                    if x * x + y * y + z * z <= a * a {
                        count += 1;
                        let dx = x - d;
                        acc += 1.0 / (dx * dx + y * y + z * z);
                    }
                }
            }
        }
        let q = acc / count as f64;
        let v = ball_inverse_square_mean(a, d);
        assert!(((q - v) / v).abs() <= 0.02, "{q} vs {v}");
    }
}
