//! Uniform midpoint sampling of the Brillouin zone [-pi/ell, pi/ell)^3.

use serde::{Deserialize, Serialize};

use crate::error::{DfError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BrillouinGrid {
    pub ell: f64,
    pub n_xi: usize,
    /// Spacing 2 pi / (ell n_xi) along each axis.
    pub spacing: f64,
    pub points: Vec<[f64; 3]>,
}

impl BrillouinGrid {
    pub fn new(ell: f64, n_xi: usize) -> Result<Self> {
        if !(ell.is_finite() && ell > 0.0) || n_xi == 0 {
            return Err(DfError::InvalidParameter {
                name: "grid".into(),
                reason: format!("ell = {ell}, n_xi = {n_xi}"),
            });
        }
        let spacing = 2.0 * std::f64::consts::PI / (ell * n_xi as f64);
        let axis: Vec<f64> = (0..n_xi)
            .map(|i| -std::f64::consts::PI / ell + spacing * (i as f64 + 0.5))
            .collect();
        let mut points = Vec::with_capacity(n_xi * n_xi * n_xi);
        for &a in &axis {
            for &b in &axis {
                for &c in &axis {
                    points.push([a, b, c]);
                }
            }
        }
        Ok(BrillouinGrid { ell, n_xi, spacing, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Quadrature weight of each point (the average over the zone).
    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n_xi + j) * self.n_xi + k
    }

    pub fn axis_indices(&self, idx: usize) -> [usize; 3] {
        let n = self.n_xi;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn descriptor(&self) -> GridDescriptor {
        GridDescriptor { ell: self.ell, n_xi: self.n_xi }
    }
}

/// Minimal description used to check that stored states match a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDescriptor {
    pub ell: f64,
    pub n_xi: usize,
}
