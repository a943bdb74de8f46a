//! Geometries, transforms, H^2 norms and constrained projections.

use std::f64::consts::PI;

use nonlocal_fixpoint::kernel::RegimeCase;
use nonlocal_fixpoint::{Geometry, GeometryConfig, GeometryKind, GridField, RegimeTag, Result};

fn main() -> Result<()> {
    let interval = Geometry::new(GeometryConfig::interval(16))?;
    let field = GridField::sample(&interval, &[|x: &[f64]| (2.0 * x[0]).cos() + x[0].sin()]);
    let spectrum = interval.forward_transform(&field)?;
    println!("interval, u = cos(2x) + sin(x):");
    for (i, c) in spectrum.components[0].coefficients.iter().enumerate() {
        if c.norm() > 1e-12 {
            println!("  n = {:>3}  u_n = {:.6}", interval.lattice().modes(i)[0], c);
        }
    }
    println!("  H^2 norm = {:.6}", interval.h2_norm(&spectrum)?);
    println!(
        "  L^2 norm (grid) = {:.6}, (Parseval) = {:.6}",
        interval.grid_l2_norm(&field),
        interval.l2_norm(&spectrum)?
    );

    let constrained = interval.project_constrained(
        &spectrum,
        &[RegimeTag::new(GeometryKind::Interval, RegimeCase::II, 2.0, None)?],
    )?;
    println!(
        "  after removing n = +-2: H^2 norm = {:.6}",
        interval.h2_norm(&constrained)?
    );

    let line = Geometry::new(GeometryConfig::whole_space(1, 8.0, 128))?;
    let gaussian = GridField::sample(&line, &[|x: &[f64]| (-x[0] * x[0]).exp()]);
    let spectrum = line.forward_transform(&gaussian)?;
    let origin = line.lattice().index_of_modes(&[0]).expect("zero mode");
    println!(
        "whole space d=1, dp = {:.4}: transform of exp(-x^2) at p=0 is {:.8} (exact {:.8})",
        line.continuous_frequency_step(),
        spectrum.components[0].coefficients[origin].re,
        1.0 / 2.0f64.sqrt()
    );
    let back = line.inverse_transform(&spectrum)?;
    let err = back.components[0]
        .iter()
        .zip(&gaussian.components[0])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("  round-trip error {err:.2e}");

    let layer = Geometry::new(GeometryConfig::layer(1, 8, PI, 16))?;
    println!(
        "layer d=1: lattice shape {:?}, {} entries",
        layer.shape(),
        layer.lattice().len()
    );
    Ok(())
}
