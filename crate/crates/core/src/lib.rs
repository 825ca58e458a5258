//! Periodic Dirac-Fock model of a crystal.
//!
//! The functional is discretized with plane waves on a uniform
//! quasi-momentum grid and minimized by a damped SCF iteration in which each
//! iterate is pulled back onto the positive spectral subspace of its own
//! mean-field operator by the retraction `theta`. Diagnostics check the
//! projector property of minimizers, the second-order expansion of the
//! retracted energy, the small-ball exchange scaling and band continuity.
//!
//! Start with `cargo run --example free_model`.

pub mod basis;
pub mod cli;
pub mod bloch;
pub mod constants;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod model;
pub mod operators;
pub mod params;
pub mod retraction;
pub mod solver;
pub mod states;
pub mod weights;

pub use bloch::BlochOperator;
pub use error::{DfError, Result};
pub use model::Model;
pub use params::{Mode, ModelParams, Tolerances};
