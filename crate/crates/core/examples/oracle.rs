//! Cross-check of the spectral map against dense real-space quadrature.

use nonlocal_fixpoint::{
    brute_force_oracle, parse_expr, residual, ComponentNonlinearity, Geometry, GeometryConfig, GeometryKind,
    KernelDefinition, KernelSpec, NonlinearitySpec, RegimeCase, RegimeTag, Result, Saturation, SolveOptions, System,
    SystemSpec,
};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn main() -> Result<()> {
    let geometry = Geometry::new(GeometryConfig::interval(16))?;
    let i = GeometryKind::Interval;
    let kernels = [
        ("exp(cos(x)) - 1.2660658777520084", RegimeCase::III, 0.0),
        ("sin(x) + 0.5*cos(2*x)", RegimeCase::I, 2.5),
        ("1/(2 + cos(x))", RegimeCase::IV, 1.0),
    ];
    let spec = SystemSpec {
        geometry,
        n_plus: 2,
        kernels: kernels
            .iter()
            .enumerate()
            .map(|(k, (src, case, a))| {
                Ok(KernelSpec {
                    component: k,
                    definition: KernelDefinition::physical(src)?,
                    regime: RegimeTag::new(i, *case, *a, None)?,
                })
            })
            .collect::<Result<_>>()?,
        nonlinearity: NonlinearitySpec::new(
            ["cos(x)", "1 + sin(3*x)", "0.5"]
                .iter()
                .map(|g| {
                    Ok(ComponentNonlinearity {
                        saturation: Saturation::Sin,
                        epsilon: 0.01,
                        coupling: vec![0.5, -0.5, 1.0],
                        forcing: parse_expr(g)?,
                    })
                })
                .collect::<Result<_>>()?,
        )?,
    };
    let system = System::new(spec)?;
    let mut rng = StdRng::seed_from_u64(3);
    for trial in 0..5 {
        let v = system.random_state(&mut rng, 4.0)?;
        let fast = system.apply_map(&v)?;
        let slow = brute_force_oracle(&system, &system.geometry().inverse_transform(&v)?)?;
        let diff = fast
            .components
            .iter()
            .zip(&slow.components)
            .flat_map(|(a, b)| a.coefficients.iter().zip(&b.coefficients).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max);
        println!("trial {trial}: max coefficient difference {diff:.2e}");
    }
    let solution = system.solve_fixed_point(None, &SolveOptions::default())?;
    println!(
        "q = {:.4}; solved in {} iterations; stationary-equation residual {:.2e}",
        solution.certificate.q,
        solution.trace.iterations(),
        residual(&system, &solution.state)?
    );
    Ok(())
}
