//! Resonance ratios at the resonant set and multiplier constants.

use std::f64::consts::{E, PI};

use nonlocal_fixpoint::{
    multiplier_norms, resonance_ratio, Geometry, GeometryConfig, GeometryKind, KernelDefinition, KernelSpec,
    KernelTransform, RegimeCase, RegimeTag, ResonanceOptions, Result,
};

fn main() -> Result<()> {
    let opts = ResonanceOptions::default();

    let line = Geometry::new(GeometryConfig::whole_space(1, 8.0 * PI, 256))?;
    let spec = KernelSpec {
        component: 0,
        definition: KernelDefinition::spectral("(p^2 - 1)*exp(-p^2)", GeometryKind::WholeSpace, 1)?,
        regime: RegimeTag::new(GeometryKind::WholeSpace, RegimeCase::I, 1.0, None)?,
    };
    let t = KernelTransform::new(&spec, &line)?;
    for p in [0.5, 0.9, 0.999, 1.0, 1.001, 2.0] {
        println!(
            "G^(p)/(|p| - 1) at p = {p:<6} : {:.6}",
            resonance_ratio(&t, &[p], &opts)?.re
        );
    }
    println!("limit at |p| = 1: 2/e = {:.6}\n", 2.0 / E);

    let interval = Geometry::new(GeometryConfig::interval(64))?;
    let kernels = [(RegimeCase::II, 1.0), (RegimeCase::III, 0.0), (RegimeCase::IV, 3.0)]
        .into_iter()
        .enumerate()
        .map(|(k, (case, a))| {
            KernelTransform::new(
                &KernelSpec {
                    component: k,
                    definition: KernelDefinition::physical("cos(2*x)")?,
                    regime: RegimeTag::new(GeometryKind::Interval, case, a, None)?,
                },
                &interval,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let report = multiplier_norms(&kernels, &opts)?;
    for c in &report.components {
        println!(
            "component {} [{}]: sup|G/D| = {:.5}, sup|xi|^2|G/D| = {:.5}, constant = {:.5} at {:?}",
            c.component + 1,
            c.regime,
            c.ratio_sup,
            c.second_sup,
            c.constant,
            c.location
        );
    }
    println!("system constant {:?} = {:.5}", report.kind, report.system_constant);
    Ok(())
}
