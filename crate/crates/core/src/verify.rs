//! Independent checks: a dense real-space oracle for the interval map and
//! the spectral residual of the stationary equations.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{GeometryKind, GridField, SpectralField, StateVector};
use crate::kernel::{KernelDefinition, KernelTransform, RegimeCase, Sign};
use crate::solver::System;

/// Largest interval resolution the dense oracle accepts.
pub const MAX_ORACLE_MODES: usize = 32;

/// Resonant right-hand side coefficients above this are a blow-up.
pub const ORACLE_RESONANCE_TOLERANCE: f64 = 1e-8;

fn check_oracle(system: &System, v: &GridField) -> Result<usize> {
    let geometry = system.geometry();
    if geometry.kind() != GeometryKind::Interval {
        return Err(Error::InvalidGeometry(
            "the dense oracle needs an interval geometry".into(),
        ));
    }
    let n = geometry.grid_len();
    if n > MAX_ORACLE_MODES {
        return Err(Error::OracleTooLarge {
            modes: n,
            max: MAX_ORACLE_MODES,
        });
    }
    if v.components.len() != system.components() {
        return Err(Error::SizeMismatch {
            expected: system.components(),
            found: v.components.len(),
        });
    }
    if v.components.iter().any(|c| c.len() != n) {
        return Err(Error::LatticeMismatch);
    }
    Ok(n)
}

/// Kernel values at `x_j = 2 pi j / n`.
fn kernel_samples(kernel: &KernelTransform, n: usize) -> Result<Vec<f64>> {
    let h = 2.0 * PI / n as f64;
    match &kernel.spec().definition {
        KernelDefinition::Physical(expr) => (0..n).map(|j| expr.eval(&[j as f64 * h])).collect(),
        _ => {
            let half = (n / 2) as i64;
            let coeffs = (-half..half)
                .map(|m| kernel.value_at(&[m as f64]))
                .collect::<Result<Vec<_>>>()?;
            Ok((0..n)
                .map(|j| {
                    let x = j as f64 * h;
                    (-half..half)
                        .zip(&coeffs)
                        .map(|(m, c)| (c * Complex64::from_polar(1.0, m as f64 * x)).re)
                        .sum::<f64>()
                        / (2.0 * PI).sqrt()
                })
                .collect())
        }
    }
}

/// `int_0^{2pi} G_k(x - y) F_k(v(y), y) dy` at every grid point by the
/// periodic trapezoid rule.
pub fn oracle_convolution(system: &System, v: &GridField) -> Result<GridField> {
    let n = check_oracle(system, v)?;
    let geometry = system.geometry();
    let h = 2.0 * PI / n as f64;
    let nonlinearity = &system.spec().nonlinearity;
    let mut rhs = vec![vec![0.0; n]; system.components()];
    let mut u = vec![0.0; system.components()];
    for j in 0..n {
        for (slot, c) in u.iter_mut().zip(&v.components) {
            *slot = c[j];
        }
        let f = nonlinearity.eval_point(&u, &[j as f64 * h])?;
        for (k, value) in f.into_iter().enumerate() {
            rhs[k][j] = value;
        }
    }
    let mut out = Vec::with_capacity(system.components());
    for (k, kernel) in system.kernels().iter().enumerate() {
        let g = kernel_samples(kernel, n)?;
        let conv = (0..n)
            .map(|i| (0..n).map(|j| g[(i + n - j) % n] * rhs[k][j]).sum::<f64>() * h)
            .collect();
        out.push(conv);
    }
    GridField::new(geometry, out)
}

/// The map `v -> u` computed densely: quadrature convolution, expansion in
/// `e^{inx}/sqrt(2pi)`, division by `|n| -+ a` and zeroing of the
/// constrained modes.
pub fn brute_force_oracle(system: &System, v: &GridField) -> Result<StateVector> {
    let conv = oracle_convolution(system, v)?;
    let n = conv.components.first().map_or(0, Vec::len);
    let geometry = system.geometry();
    let lattice = geometry.lattice();
    let h = 2.0 * PI / n as f64;
    let mut components = Vec::with_capacity(system.components());
    for (k, kernel) in system.kernels().iter().enumerate() {
        let regime = kernel.regime();
        let mut coefficients = vec![Complex64::new(0.0, 0.0); n];
        for (i, slot) in coefficients.iter_mut().enumerate() {
            let m = lattice.modes(i)[0];
            let c: Complex64 = conv.components[k]
                .iter()
                .enumerate()
                .map(|(j, value)| value * Complex64::from_polar(1.0, -(m as f64) * j as f64 * h))
                .sum::<Complex64>()
                * h
                / (2.0 * PI).sqrt();
            let magnitude = m.unsigned_abs() as f64;
            let constrained = match regime.case {
                RegimeCase::II => magnitude == regime.rate,
                RegimeCase::III => m == 0,
                _ => false,
            };
            if constrained {
                continue;
            }
            let den = match regime.sign() {
                Sign::Plus => magnitude - regime.rate,
                Sign::Minus => magnitude + regime.rate,
            };
            if den == 0.0 {
                if c.norm() > ORACLE_RESONANCE_TOLERANCE {
                    return Err(Error::BlowUp {
                        component: k,
                        frequency: vec![m as f64],
                        defect: c.norm(),
                    });
                }
                continue;
            }
            *slot = c / den;
        }
        components.push(SpectralField::from_coefficients(geometry, coefficients)?);
    }
    StateVector::new(components)
}

/// `sqrt(sum_k sum_xi w |D_k(xi) u_k(xi) - C_geo G_k(xi) f_k(xi)|^2)` with
/// `f_k` the transform of `F_k(u(x), x)`.
pub fn residual(system: &System, state: &StateVector) -> Result<f64> {
    let geometry = system.geometry();
    let f = geometry.forward_transform(&system.nonlinearity_on_grid(state)?)?;
    let lattice = geometry.lattice();
    let factor = geometry.convolution_factor();
    let mut total = 0.0;
    for (k, kernel) in system.kernels().iter().enumerate() {
        let regime = kernel.regime();
        let g = &kernel.spectrum().coefficients;
        let u = &state.components[k].coefficients;
        let fk = &f.components[k].coefficients;
        for i in 0..lattice.len() {
            let r = u[i] * regime.denominator(lattice.magnitudes()[i]) - g[i] * fk[i] * factor;
            total += lattice.weight(i) * r.norm_sqr();
        }
    }
    Ok(total.sqrt())
}
