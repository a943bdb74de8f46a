//! Driving the command-line front end from code: certify, solve and
//! re-verify a configuration, writing all artifacts to a scratch directory.

use std::path::Path;

use nonlocal_fixpoint::cli::run_cli;

fn main() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/interval.json");
    let config = config.to_str().expect("utf-8 path");
    let out = std::env::temp_dir().join("nonlocal-fixpoint-example");
    let out = out.to_str().expect("utf-8 path");

    let code = run_cli(["nonlocal-fixpoint", "solve", config, "--out", out, "--tol", "1e-11"]);
    eprintln!("solve exited with {code}");
    let solution = format!("{out}/solution.csv");
    let code = run_cli(["nonlocal-fixpoint", "residual", config, &solution]);
    eprintln!("residual exited with {code}");
    for file in ["solution.csv", "spectrum.csv", "trace.csv", "report.json"] {
        eprintln!("wrote {out}/{file}");
    }
}
