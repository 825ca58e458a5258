//! Positive bands of D_{gamma, xi} along a path in the zone, with gamma
//! frozen, and their empirical Hoelder moduli.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochOperator;
use crate::error::{DfError, Result};
use crate::linalg::hermitian_values;
use crate::model::Model;
use crate::operators::mean_field::mean_field_at;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandPath {
    /// Corners of a piecewise-linear path.
    pub vertices: Vec<[f64; 3]>,
    pub samples: usize,
    /// Number of positive bands to follow.
    pub bands: usize,
}

impl BandPath {
    /// Gamma -> X -> M -> Gamma -> R of the cubic zone.
    pub fn standard(ell: f64, samples: usize, bands: usize) -> Self {
        let h = std::f64::consts::PI / ell * (1.0 - 1.0e-9);
        BandPath {
            vertices: vec![[0.0; 3], [h, 0.0, 0.0], [h, h, 0.0], [0.0; 3], [h, h, h]],
            samples,
            bands,
        }
    }

    /// Points equally spaced in arclength, with their arclength coordinate.
    pub fn sample(&self) -> Vec<(f64, [f64; 3])> {
        let seg: Vec<f64> = self.vertices.windows(2).map(|w| dist(&w[0], &w[1])).collect();
        let total: f64 = seg.iter().sum();
        let n = self.samples.max(2);
        (0..n)
            .map(|i| {
                let s = total * i as f64 / (n - 1) as f64;
                let mut rest = s;
                let mut j = 0;
                while j + 1 < seg.len() && rest > seg[j] {
                    rest -= seg[j];
                    j += 1;
                }
                let t = if seg[j] > 0.0 { (rest / seg[j]).min(1.0) } else { 0.0 };
                let (a, b) = (self.vertices[j], self.vertices[j + 1]);
                (s, [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])])
            })
            .collect()
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub arclength: Vec<f64>,
    /// bands[k][i]: k-th positive eigenvalue at sample i.
    pub bands: Vec<Vec<f64>>,
    pub exponents: Vec<f64>,
    /// moduli[k][e] = max_i |Delta lambda_k| / |Delta s|^exponents[e].
    pub moduli: Vec<Vec<f64>>,
    /// (band, step) pairs whose difference quotient exceeds 10x the band's median.
    pub flagged: Vec<(usize, usize)>,
}

pub const EXPONENTS: [f64; 3] = [0.5, 0.9, 1.0];

pub fn band_continuity(gamma: &BlochOperator, model: &Model, path: &BandPath) -> Result<BandReport> {
    if path.vertices.len() < 2 {
        return Err(DfError::InvalidParameter { name: "path.vertices".into(), reason: "need two vertices".into() });
    }
    let pts = path.sample();
    let levels: Vec<Vec<f64>> = pts
        .par_iter()
        .map(|(_, xi)| {
            let vals = hermitian_values(&mean_field_at(gamma, xi, model));
            let first = vals.iter().position(|&v| v > 0.0).unwrap_or(vals.len());
            vals[first..].iter().take(path.bands).cloned().collect::<Vec<f64>>()
        })
        .collect();
    let nb = levels.iter().map(Vec::len).min().unwrap_or(0);
    if nb < path.bands {
        return Err(DfError::InsufficientStates { available: nb, required: path.bands });
    }
    let bands: Vec<Vec<f64>> = (0..nb).map(|k| levels.iter().map(|l| l[k]).collect()).collect();
    let s: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let floor = 1.0e-12 * model.params.c2();
    let mut moduli = Vec::new();
    let mut flagged = Vec::new();
    for (k, b) in bands.iter().enumerate() {
        let quot: Vec<(f64, f64)> = b.windows(2).zip(s.windows(2)).map(|(v, t)| ((v[1] - v[0]).abs(), t[1] - t[0])).collect();
        moduli.push(
            EXPONENTS
                .iter()
                .map(|&e| quot.iter().filter(|q| q.1 > 0.0).map(|q| q.0 / q.1.powf(e)).fold(0.0, f64::max))
                .collect(),
        );
        let mut ratios: Vec<f64> = quot.iter().filter(|q| q.1 > 0.0).map(|q| q.0 / q.1).collect();
        ratios.sort_by(|a, b| a.total_cmp(b));
        let median = ratios.get(ratios.len() / 2).cloned().unwrap_or(0.0);
        let limit = 10.0 * median.max(floor);
        for (i, q) in quot.iter().enumerate() {
            if q.1 > 0.0 && q.0 / q.1 > limit {
                flagged.push((k, i));
            }
        }
    }
    Ok(BandReport { arclength: s, bands, exponents: EXPONENTS.to_vec(), moduli, flagged })
}
