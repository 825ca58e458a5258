//! Constant estimates and the assumption clauses for a desk-scale crystal,
//! and the same clauses for a physical-scale configuration with every
//! constant set to 1.
//!
//! cargo run --release --example check_assumptions

use dfcrystal::constants::{check_assumptions, penalization, AssumptionReport, ConstantOverrides, Constants};
use dfcrystal::{Model, ModelParams, Tolerances};

fn show(title: &str, rep: &AssumptionReport) {
    println!("{title}");
    for c in &rep.clauses {
        println!("  {:12} {:5}  slack {:11.4e}  {}", c.name, c.holds, c.slack, c.detail);
    }
    println!("  weak {}  strong {}", rep.weak, rep.strong);
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let desk = ModelParams { ell: 2.0 * std::f64::consts::PI, z: 0.5, q: 2, alpha: 0.2, c: 3.0, k_cut: 1, n_xi: 2, eps_margin: None };
    let model = Model::new(desk, Tolerances::default())?;
    let consts = Constants::estimate(&model, &ConstantOverrides::default(), 16, 7)?;
    for (name, c) in consts.named() {
        println!("{name:10} {:12.6} {:?}", c.value, c.provenance);
    }
    let d = &consts.derived;
    println!("kappa {:.4}  lambda0 {:.4}  L {:.4}  C_cri {:.2}", d.kappa, d.lambda0, d.l, d.c_cri);
    let pen = penalization(&model, &consts);
    show("desk crystal", &check_assumptions(&desk, &consts, pen.c_star));

    let alpha = 1.0 / 137.0;
    let phys = ModelParams { ell: 1000.0, z: 17.0 * alpha, q: 17, alpha, c: 1.0, k_cut: 0, n_xi: 1, eps_margin: None };
    let ones = ConstantOverrides::all(1.0);
    let k = Constants::from_overrides(&phys, &ones);
    let model = Model::new(phys, Tolerances::default())?;
    let pen = penalization(&model, &k);
    show("ell = 1000, q = 17, all constants 1", &check_assumptions(&phys, &k, pen.c_star));
    Ok(())
}
