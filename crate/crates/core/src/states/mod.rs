//! Density matrices, the Dirac-Fock energy and the norms used by the theory.

pub mod density_matrix;
pub mod energy;
pub mod norms;

pub use density_matrix::{DensityMatrix, FiberState, RANK_TOL};
pub use energy::{directional_linear, energy, exchange_bilinear, EnergyBreakdown};
pub use norms::Norms;
