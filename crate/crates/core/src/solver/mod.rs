//! Aufbau filling and the retracted SCF iteration.

pub mod aufbau;
pub mod scf;

pub use aufbau::{aufbau_fill, filled_state, FillingResult};
pub use scf::{free_reference_energy, initial_state, scf_residual, scf_solve, scf_solve_with, ScfIterate, ScfOptions, Solution};
