//! The nonlinearity catalog: evaluation, Lipschitz and growth checks.

use nonlocal_fixpoint::nonlinearity::growth_bound_excess;
use nonlocal_fixpoint::{
    eval_nonlinearity, lipschitz_certificate, parse_expr, ComponentNonlinearity, Geometry, GeometryConfig, GridField,
    NonlinearitySpec, Result, Saturation,
};

fn main() -> Result<()> {
    let spec = NonlinearitySpec::new(vec![
        ComponentNonlinearity {
            saturation: Saturation::Tanh,
            epsilon: 0.1,
            coupling: vec![1.0, -0.5],
            forcing: parse_expr("exp(-x^2)")?,
        },
        ComponentNonlinearity {
            saturation: Saturation::Sin,
            epsilon: -0.2,
            coupling: vec![0.3, 0.3],
            forcing: parse_expr("1/(1 + x^2)")?,
        },
    ])?;
    let geometry = Geometry::new(GeometryConfig::whole_space(1, 6.0, 64))?;
    println!("Lipschitz constant L = {:.6}", spec.lipschitz_constant());
    println!("growth constant K = {:.6}", spec.growth_constant());

    let state = GridField::sample(&geometry, &[|x: &[f64]| x[0].sin(), |x: &[f64]| x[0].cos()]);
    let f = eval_nonlinearity(&spec, &state, &geometry)?;
    for j in [0, 16, 32, 48] {
        let x = geometry.grid_point(j)[0];
        println!(
            "x = {x:>6.3}: F = ({:.6}, {:.6})",
            f.components[0][j], f.components[1][j]
        );
    }

    let cert = lipschitz_certificate(&spec, &geometry, 10_000, 0)?;
    println!(
        "sampled difference quotient {:.6} <= {:.6}: {}",
        cert.empirical, cert.analytic, cert.passed
    );
    println!(
        "worst growth-bound excess {:.3e}",
        growth_bound_excess(&spec, &geometry, 10_000, 0)?
    );
    Ok(())
}
