//! Interacting crystal on a 2x2x2 zone grid: estimate the constants, pick the
//! penalization, run the SCF and classify the last occupied shell.
//!
//! cargo run --release --example solve_interacting

use dfcrystal::constants::{penalization, ConstantOverrides, Constants};
use dfcrystal::diagnostics::shell_report;
use dfcrystal::solver::scf_solve;
use dfcrystal::{Model, ModelParams, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams { ell: 2.0 * std::f64::consts::PI, z: 2.0, q: 2, alpha: 0.1, c: 10.0, k_cut: 1, n_xi: 2, eps_margin: None };
    let model = Model::new(params, Tolerances::default())?;
    let consts = Constants::estimate(&model, &ConstantOverrides::default(), 8, 1)?;
    let pen = penalization(&model, &consts);
    println!("c*(q+1) = {:.6}  (analytic bound {:.6}),  eps_P = {:.6}", pen.c_star, pen.analytic_bound, pen.eps_pen);

    let sol = scf_solve(&model, pen.eps_pen, None)?;
    println!("{:>4} {:>22} {:>11} {:>8} {:>5}", "iter", "energy", "residual", "beta", "theta");
    for h in &sol.history {
        println!("{:4} {:22.14} {:11.3e} {:8.4} {:5}", h.iter, h.energy, h.residual, h.beta, h.retraction_iters);
    }
    let e = &sol.energy;
    println!("kinetic {:.10}  external {:.10}  hartree {:.10}  exchange {:.10}", e.dirac, e.external, e.hartree, e.exchange);
    let shell = shell_report(&sol, model.tol.occupation_tol);
    println!("nu = {:.10}  residual = {:.2e}  last shell {:?}", sol.nu(), sol.residual, shell.classification);
    println!("max |gamma^2 - gamma| = {:.2e}", shell.projector_deviation);
    Ok(())
}
