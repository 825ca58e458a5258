//! Non-interacting crystal (z = 0, alpha = 0): the solver must reproduce the
//! filled free Dirac levels exactly, in one iteration.
//!
//! cargo run --release --example free_model

use dfcrystal::constants::{penalization, ConstantOverrides, Constants};
use dfcrystal::diagnostics::shell_report;
use dfcrystal::solver::{free_reference_energy, scf_solve};
use dfcrystal::{Model, ModelParams, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams { ell: 2.0 * std::f64::consts::PI, z: 0.0, q: 2, alpha: 0.0, c: 1.0, k_cut: 1, n_xi: 2, eps_margin: None };
    let model = Model::new(params, Tolerances::default())?;
    let consts = Constants::from_overrides(&params, &ConstantOverrides::default());
    let pen = penalization(&model, &consts);
    let sol = scf_solve(&model, pen.eps_pen, None)?;
    let reference = free_reference_energy(&model);
    let shell = shell_report(&sol, model.tol.occupation_tol);

    println!("basis size per fiber   {}", model.n_b());
    println!("fibers                 {}", model.n_fibers());
    println!("energy                 {:.15}", sol.energy.total);
    println!("free reference         {reference:.15}");
    println!("relative difference    {:.2e}", (sol.energy.total - reference).abs() / reference.abs());
    println!("iterations             {}", sol.iterations);
    println!("Fermi level            {:.12}", sol.nu());
    println!("last shell             {:?} ({} states)", shell.classification, shell.band_size);
    Ok(())
}
