//! Certify and solve a three-component system on the periodic interval.

use std::path::Path;

use nonlocal_fixpoint::{certify, Result, RunConfig, SolveOptions};

fn main() -> Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/interval.json");
    let config = RunConfig::from_path(&path)?;
    let certification = certify(&config)?;
    let report = &certification.report;
    let cert = &report.certificate;
    println!(
        "P = {:.6}, L = {:.3}, q = {:.2}*P*L = {:.6}, certified: {}",
        cert.system_constant, cert.lipschitz, cert.prefactor, cert.q, cert.certified
    );
    println!("nontriviality: {:?}", report.nontriviality.verdict);

    let system = &certification.system;
    let solution = system.solve_fixed_point(
        None,
        &SolveOptions {
            tolerance: 1e-12,
            ..SolveOptions::default()
        },
    )?;
    for (j, (inc, ratio)) in solution
        .trace
        .increments
        .iter()
        .zip(&solution.trace.ratios)
        .enumerate()
        .take(8)
    {
        match ratio {
            Some(r) => println!("iter {:>2}: increment {inc:.3e}, ratio {r:.4}", j + 1),
            None => println!("iter {:>2}: increment {inc:.3e}", j + 1),
        }
    }
    println!(
        "converged after {} iterations, residual {:.2e}, ||v||_H2 = {:.6}",
        solution.trace.iterations(),
        solution.residual,
        system.geometry().h2_norm(&solution.state)?
    );
    for k in 0..system.components() {
        let zeroed: Vec<i64> = system
            .constrained_entries(k)
            .iter()
            .map(|&i| system.geometry().lattice().modes(i)[0])
            .collect();
        if !zeroed.is_empty() {
            println!("component {} has exact zeros at modes {zeroed:?}", k + 1);
        }
    }
    Ok(())
}
