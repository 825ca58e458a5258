//! Second-order expansion of the retracted energy around the minimizer along
//! a one-electron transfer direction, with the a-priori bound on Err(t).
//!
//! cargo run --release --example expansion_check

use dfcrystal::constants::{penalization, ConstantOverrides, Constants};
use dfcrystal::diagnostics::expansion_check;
use dfcrystal::solver::scf_solve;
use dfcrystal::{Mode, Model, ModelParams, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams { ell: 3.0, z: 0.5, q: 2, alpha: 0.6, c: 3.0, k_cut: 1, n_xi: 1, eps_margin: None };
    let model = Model::new(params, Tolerances::default())?;
    let consts = Constants::estimate(&model, &ConstantOverrides::default(), 8, 1)?;
    let pen = penalization(&model, &consts);
    let sol = scf_solve(&model, pen.eps_pen, None)?;
    let ts = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
    let rep = expansion_check(&sol.gamma.to_operator(), &model, &consts, pen.eps_pen, &ts, Mode::Strict)?;

    println!("linear term {:.10}  quadratic term {:.10}", rep.linear_term, rep.quadratic_term);
    println!("{:>8} {:>13} {:>13} {:>11}", "t", "residual", "Err(t)", "bound");
    for r in &rep.rows {
        println!("{:8.0e} {:13.5e} {:13.5e} {:11.4e}", r.t, r.residual, r.err, r.bound);
    }
    println!("log-log slope of the residual: {:.4}", rep.slope);
    Ok(())
}
