//! Tr[V_h h] for an electron moved between two small zone balls of radius
//! lambda, on a 12^3 exchange-only grid: the exchange term diverges like
//! -b / lambda^2.
//!
//! cargo run --release --example exchange_scaling

use dfcrystal::constants::{penalization, ConstantOverrides, Constants};
use dfcrystal::diagnostics::{exchange_scaling, ScalingConfig};
use dfcrystal::solver::scf_solve;
use dfcrystal::{Model, ModelParams, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams { ell: 2.0 * std::f64::consts::PI, z: 0.5, q: 2, alpha: 0.5, c: 2.0, k_cut: 1, n_xi: 1, eps_margin: None };
    let model = Model::new(params, Tolerances::default())?;
    let consts = Constants::estimate(&model, &ConstantOverrides::default(), 8, 1)?;
    let sol = scf_solve(&model, penalization(&model, &consts).eps_pen, None)?;
    let rep = exchange_scaling(&sol.gamma.to_operator(), &model, &ScalingConfig::default())?;

    println!("{:>9} {:>6} {:>12} {:>13}", "lambda", "|B|", "hartree", "Tr[V_h h]");
    for r in &rep.rows {
        println!("{:9.5} {:6} {:12.4e} {:13.6}", r.lambda_eff, r.n_ball[0], r.hartree, r.trace_vh);
    }
    // Two balls, unit overlaps, and the mean of 1/|x - y|^2 over a unit ball (9/4).
    let continuum = -2.0 * 4.0 * std::f64::consts::PI / params.ell.powi(3) * 2.25;
    println!("fit a + b lambda^-2: a = {:.5}, b = {:.5} (continuum {:.5}), misfit {:.2e}", rep.a, rep.b, continuum, rep.misfit);
    println!("best free exponent: {:.2}", rep.fitted_exponent);
    Ok(())
}
