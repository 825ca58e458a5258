//! Fiber operators: free Dirac, periodic Coulomb, density, Hartree, exchange
//! and the mean-field operator D_gamma, plus spectral decompositions.

pub mod coulomb;
pub mod density;
pub mod dirac;
pub mod exchange;
pub mod mean_field;
pub mod spectral;

pub use coulomb::{coulomb_matrix, g_hat};
pub use density::{density_fourier, hartree_matrix, DensityFourier};
pub use dirac::{dirac_block, free_dirac_at, free_dispersion};
pub use exchange::{exchange_matrix, exchange_matrix_at, exchange_operator};
pub use mean_field::{interaction_operator, mean_field_at, mean_field_operator};
pub use spectral::{spectral_decomposition, FiberSpectrum, Spectra};
