//! Layer geometry I x R with all four regimes.

use std::path::Path;

use nonlocal_fixpoint::{certify, Result, RunConfig, SolveOptions};

fn main() -> Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/layer.json");
    let config = RunConfig::from_path(&path)?;
    let certification = certify(&config)?;
    for a in &certification.report.admissibility {
        let defects: Vec<String> = a
            .conditions
            .iter()
            .map(|c| format!("{} {:.1e}", c.id, c.defect))
            .collect();
        println!("component {} [{}]: {}", a.component + 1, a.regime, defects.join(", "));
    }
    let system = &certification.system;
    let cert = system.certificate();
    println!(
        "R = {:.6}, L = {}, q = {:.6}",
        cert.system_constant, cert.lipschitz, cert.q
    );
    let solution = system.solve_fixed_point(None, &SolveOptions::default())?;
    println!(
        "{} iterations, fixed-point residual {:.2e}, norm-bound probe {:.4}",
        solution.trace.iterations(),
        solution.residual,
        system.norm_bound_probe(20, 0)?
    );
    println!("nontriviality: {:?}", solution.nontriviality.verdict);
    Ok(())
}
