//! Positive bands of the converged mean-field operator along
//! Gamma-X-M-Gamma-R, evaluated off the solver grid with the state frozen.
//!
//! cargo run --release --example band_continuity

use dfcrystal::constants::{penalization, ConstantOverrides, Constants};
use dfcrystal::diagnostics::{band_continuity, BandPath};
use dfcrystal::solver::scf_solve;
use dfcrystal::{Model, ModelParams, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams { ell: 2.0 * std::f64::consts::PI, z: 1.0, q: 2, alpha: 0.2, c: 3.0, k_cut: 1, n_xi: 2, eps_margin: None };
    let model = Model::new(params, Tolerances::default())?;
    let consts = Constants::estimate(&model, &ConstantOverrides::default(), 8, 1)?;
    let sol = scf_solve(&model, penalization(&model, &consts).eps_pen, None)?;
    let rep = band_continuity(&sol.gamma.to_operator(), &model, &BandPath::standard(params.ell, 100, 4))?;

    for (k, b) in rep.bands.iter().enumerate() {
        let lo = b.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = b.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let m: Vec<String> = rep.exponents.iter().zip(&rep.moduli[k]).map(|(p, v)| format!("p={p}: {v:.4}")).collect();
        println!("band {k}: [{lo:.6}, {hi:.6}]  moduli {}", m.join("  "));
    }
    println!("flagged steps: {}", rep.flagged.len());
    Ok(())
}
