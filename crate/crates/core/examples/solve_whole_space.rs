//! Whole-space system with a resonant sphere, a zero-rate component and a
//! decaying component, solved from two random starting points.

use std::path::Path;

use nonlocal_fixpoint::{certify, Result, RunConfig, SolveOptions};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn main() -> Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/whole_space.json");
    let config = RunConfig::from_path(&path)?;
    let certification = certify(&config)?;
    let system = &certification.system;
    for c in &certification.report.multipliers.components {
        println!("component {} [{}]: M_k = {:.6}", c.component + 1, c.regime, c.constant);
    }
    let cert = system.certificate();
    println!("M = {:.6}, q = {:.6}", cert.system_constant, cert.q);

    let opts = SolveOptions::default();
    let mut rng = StdRng::seed_from_u64(config.solver.seed);
    let a = system.solve_fixed_point(Some(&system.random_state(&mut rng, 5.0)?), &opts)?;
    let b = system.solve_fixed_point(Some(&system.random_state(&mut rng, 5.0)?), &opts)?;
    let gap = system.geometry().h2_norm(&a.state.sub(&b.state)?)?;
    println!(
        "runs took {} and {} iterations; solutions differ by {gap:.2e} in H^2",
        a.trace.iterations(),
        b.trace.iterations()
    );
    println!(
        "measured contraction ratio {:.4} <= q",
        a.trace.max_ratio().unwrap_or(0.0)
    );
    println!("probe over 100 random pairs: {:.4}", system.contraction_probe(100, 1)?);

    let grid = system.geometry().inverse_transform(&a.state)?;
    for j in (0..grid.components[0].len()).step_by(32) {
        let x = system.geometry().grid_point(j)[0];
        let u: Vec<String> = grid.components.iter().map(|c| format!("{:+.6}", c[j])).collect();
        println!("x = {x:>8.3}: u = ({})", u.join(", "));
    }
    Ok(())
}
