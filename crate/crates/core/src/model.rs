//! Discretized model: grid, basis, kernel weights and cached fiber data.

use crate::basis::PlaneWaveBasis;
use crate::error::Result;
use crate::grid::BrillouinGrid;
use crate::linalg::CMat;
use crate::operators::coulomb::coulomb_matrix;
use crate::operators::dirac::{free_dirac_at, free_dispersion};
use crate::params::{ModelParams, Tolerances};
use crate::weights::RegularizedWeights;

#[derive(Debug, Clone)]
pub struct Model {
    pub params: ModelParams,
    pub tol: Tolerances,
    pub grid: BrillouinGrid,
    pub basis: PlaneWaveBasis,
    pub weights: RegularizedWeights,
    /// G_ell in the basis; identical on every fiber.
    pub coulomb: CMat,
    /// Free Dirac fiber D_xi per grid point.
    pub free: Vec<CMat>,
    /// |D_xi| = sqrt(c^4 + c^2 |p|^2) per basis index.
    pub abs_dirac: Vec<Vec<f64>>,
    /// 1 + |p|^2 per basis index.
    pub laplace: Vec<Vec<f64>>,
    pub zero_shift: usize,
}

impl Model {
    pub fn new(params: ModelParams, tol: Tolerances) -> Result<Self> {
        params.validate()?;
        let grid = BrillouinGrid::new(params.ell, params.n_xi as usize)?;
        Self::with_grid(params, tol, grid)
    }

    /// Same physics on a different quasi-momentum grid.
    pub fn with_n_xi(&self, n_xi: u32) -> Result<Self> {
        let mut p = self.params;
        p.n_xi = n_xi;
        Model::new(p, self.tol)
    }

    fn with_grid(params: ModelParams, tol: Tolerances, grid: BrillouinGrid) -> Result<Self> {
        let basis = PlaneWaveBasis::new(params.k_cut, params.ell);
        let weights = RegularizedWeights::new(&grid, &basis, tol.weights_subsample)?;
        let coulomb = coulomb_matrix(&basis);
        let free = grid.points.iter().map(|xi| free_dirac_at(&basis, xi, params.c)).collect();
        let (abs_dirac, laplace) = grid
            .points
            .iter()
            .map(|xi| fiber_diagonals(&basis, xi, params.c))
            .unzip();
        let zero_shift = basis.shift_index([0, 0, 0]).expect("zero shift");
        Ok(Model { params, tol, grid, basis, weights, coulomb, free, abs_dirac, laplace, zero_shift })
    }

    pub fn n_fibers(&self) -> usize {
        self.grid.len()
    }

    pub fn n_b(&self) -> usize {
        self.basis.n_b()
    }

    pub fn fiber_weight(&self) -> f64 {
        self.grid.weight()
    }
}

/// (|D_xi|, 1 - Delta_xi) diagonals at an arbitrary quasi-momentum.
pub fn fiber_diagonals(basis: &PlaneWaveBasis, xi: &[f64; 3], c: f64) -> (Vec<f64>, Vec<f64>) {
    let mut ad = Vec::with_capacity(basis.n_b());
    let mut lap = Vec::with_capacity(basis.n_b());
    for m in 0..basis.n_modes() {
        let p2 = basis.momentum_sq(xi, m);
        for _ in 0..4 {
            ad.push(free_dispersion(c, p2));
            lap.push(1.0 + p2);
        }
    }
    (ad, lap)
}
