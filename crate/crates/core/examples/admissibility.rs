//! Kernel spectra and admissibility reports.

use nonlocal_fixpoint::{
    check_admissibility, Geometry, GeometryConfig, GeometryKind, KernelDefinition, KernelSpec, RegimeCase, RegimeTag,
    Result,
};

fn kernel(src: &str, kind: GeometryKind, case: RegimeCase, rate: f64) -> Result<KernelSpec> {
    Ok(KernelSpec {
        component: 0,
        definition: KernelDefinition::physical(src)?,
        regime: RegimeTag::new(kind, case, rate, None)?,
    })
}

fn main() -> Result<()> {
    let interval = Geometry::new(GeometryConfig::interval(64))?;
    let line = Geometry::new(GeometryConfig::whole_space(1, 10.0, 256))?;
    let plane = Geometry::new(GeometryConfig::whole_space(2, 10.0, 64))?;
    let cases = [
        ("cos(2*x)", &interval, RegimeCase::III, 0.0),
        ("cos(2*x)", &interval, RegimeCase::II, 2.0),
        ("cos(3*x) + 1", &interval, RegimeCase::II, 2.0),
        ("x*exp(-x^2)", &line, RegimeCase::II, 0.0),
        ("exp(-x^2)", &line, RegimeCase::I, 1.0),
        ("(x1^2 + x2^2 - 2)*exp(-(x1^2 + x2^2)/2)", &plane, RegimeCase::II, 0.0),
    ];
    for (src, geometry, case, rate) in cases {
        let spec = kernel(src, geometry.kind(), case, rate)?;
        let report = check_admissibility(&spec, geometry, 1e-8)?;
        println!(
            "G = {src} [{}]: {}",
            report.regime,
            if report.passed { "admissible" } else { "rejected" }
        );
        print!("{}", report.to_key_value());
        println!();
    }
    Ok(())
}
