//! Iterate T(gamma) = P+_gamma gamma P+_gamma from the free filling and
//! compare the step ratios with the contraction constant L.
//!
//! cargo run --release --example retraction_contraction

use dfcrystal::constants::{ConstantOverrides, Constants};
use dfcrystal::diagnostics::contraction_check;
use dfcrystal::solver::initial_state;
use dfcrystal::{Model, ModelParams, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams { ell: 3.0, z: 0.5, q: 2, alpha: 0.6, c: 3.0, k_cut: 1, n_xi: 1, eps_margin: None };
    let model = Model::new(params, Tolerances::default())?;
    let consts = Constants::estimate(&model, &ConstantOverrides::default(), 8, 1)?;
    let start = initial_state(&model)?.to_operator();
    let rep = contraction_check(&start, &model, &consts)?;

    println!("L = {:.6}  R = {:.4}  start in U_R: {}", rep.l, consts.r.value, rep.start_membership.member);
    println!("{:>4} {:>14} {:>10} {:>10}", "n", "step", "ratio", "margin");
    for s in &rep.trace.steps {
        println!("{:4} {:14.6e} {:10.6} {:10.4}", s.iteration, s.step_norm_xc.max(model.params.c * s.step_norm_yc), s.ratio, s.margin);
    }
    println!("max ratio {:.6} <= L: {}", rep.max_ratio, rep.within_l);
    println!("idempotence {:.2e}, Gamma+ defect {:.2e} (tol {:.1e})", rep.idempotence, rep.gamma_plus_defect, rep.tol);
    Ok(())
}
