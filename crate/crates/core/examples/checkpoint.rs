//! Save a converged state, reload it, and restart the SCF from it.
//!
//! cargo run --release --example checkpoint

use dfcrystal::constants::{penalization, ConstantOverrides, Constants};
use dfcrystal::io::{read_checkpoint, save_checkpoint, Checkpoint};
use dfcrystal::solver::scf_solve;
use dfcrystal::{Model, ModelParams, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams { ell: 2.0 * std::f64::consts::PI, z: 1.0, q: 2, alpha: 0.3, c: 4.0, k_cut: 1, n_xi: 1, eps_margin: None };
    let model = Model::new(params, Tolerances::default())?;
    let consts = Constants::estimate(&model, &ConstantOverrides::default(), 8, 1)?;
    let eps = penalization(&model, &consts).eps_pen;
    let sol = scf_solve(&model, eps, None)?;

    let dir = std::env::temp_dir().join("dfcrystal-checkpoint-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("gamma.ckpt.json");
    save_checkpoint(&path, &sol.gamma, &model)?;
    let first = std::fs::read_to_string(&path)?;
    let ck = read_checkpoint(&path)?;
    let gamma = ck.state(&model)?;
    let again = Checkpoint::new(&gamma, &model).to_string()?;
    println!("wrote {} ({} bytes), byte-identical after reload: {}", path.display(), first.len(), first == again);

    let restarted = scf_solve(&model, eps, Some(&gamma))?;
    println!("fresh solve: {} iterations, E = {:.14}", sol.iterations, sol.energy.total);
    println!("restart:     {} iterations, E = {:.14}", restarted.iterations, restarted.energy.total);
    Ok(())
}
