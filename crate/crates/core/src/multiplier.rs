//! Fourier multipliers of the linear solves and their sup-norm constants.
//!
//! For a component with kernel transform `G^` and denominator
//! `D(xi) = |xi| -+ a`, the linear solve multiplies the right-hand side by
//! `G^(xi) / D(xi)`. The constant of a component is
//! `max(sup |G^/D|, sup |xi|^2 |G^/D|)` over the lattice (plus samples of
//! the resonant set); the system constant is the maximum over components
//! and is called `M`, `P` or `R` on the whole space, interval and layer.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GeometryKind, SpectralField};
use crate::kernel::{
    sphere_samples, KernelTransform, Sign, DEFAULT_ADMISSIBILITY_TOLERANCE, SPHERE_SAMPLES_PER_CIRCLE,
};

/// Resonance handling parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResonanceOptions {
    /// A point is resonant when `|D| < epsilon_scale * max(1, a)`.
    pub epsilon_scale: f64,
    /// Radial step of the limit rule; `None` means a quarter of the
    /// continuous frequency spacing.
    pub radial_step: Option<f64>,
    /// Largest `|G^|` on the resonant set that still counts as admissible.
    pub tolerance: f64,
    /// Report inadmissible resonances as flagged values instead of errors.
    pub allow_blow_up: bool,
}

impl Default for ResonanceOptions {
    fn default() -> Self {
        ResonanceOptions {
            epsilon_scale: 1e-6,
            radial_step: None,
            tolerance: DEFAULT_ADMISSIBILITY_TOLERANCE,
            allow_blow_up: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstantKind {
    /// Whole space.
    M,
    /// Interval.
    P,
    /// Layer.
    R,
}

impl ConstantKind {
    pub fn for_geometry(kind: GeometryKind) -> Self {
        match kind {
            GeometryKind::WholeSpace => ConstantKind::M,
            GeometryKind::Interval => ConstantKind::P,
            GeometryKind::Layer => ConstantKind::R,
        }
    }
}

/// Outcome of evaluating one ratio, with a flag for unresolved blow-up.
#[derive(Clone, Copy, Debug, PartialEq)]
struct RatioValue {
    value: Complex64,
    /// Modulus entering the sup-norm constants (at least `|value|`).
    peak: f64,
    blow_up: bool,
}

impl RatioValue {
    fn plain(value: Complex64) -> Self {
        RatioValue {
            value,
            peak: value.norm(),
            blow_up: false,
        }
    }
}

fn magnitude(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `G^(xi) / D(xi)`, with the radial limit on the resonant set.
///
/// On the interval the resonant modes are exact integers and the ratio is
/// zero there. On continuous axes the value at a resonant point is the mean
/// of the ratio at the two points displaced by `+-h` along the radius, which
/// for a simple zero of `D` is the central difference of `G^` in `|xi|`.
/// At the origin of the transverse variables (where `D` has no sign change)
/// the value is the mean over the displacements `+-h e_s`, which keeps real
/// kernels real; the multiplier constants use the largest of those samples.
pub fn resonance_ratio(kernel: &KernelTransform, xi: &[f64], options: &ResonanceOptions) -> Result<Complex64> {
    Ok(ratio_at(kernel, xi, None, options)?.value)
}

fn ratio_at(
    kernel: &KernelTransform,
    xi: &[f64],
    lattice_value: Option<Complex64>,
    options: &ResonanceOptions,
) -> Result<RatioValue> {
    let regime = kernel.regime();
    let den = regime.denominator(magnitude(xi));
    let eps = options.epsilon_scale * regime.rate.max(1.0);
    let value = match lattice_value {
        Some(v) => v,
        None => kernel.value_at(xi)?,
    };
    if regime.sign() == Sign::Minus || den.abs() >= eps {
        return Ok(RatioValue::plain(value / den));
    }

    let geometry = kernel.geometry();
    let blow_up = |defect: f64, at: &[f64]| -> Result<RatioValue> {
        if options.allow_blow_up {
            Ok(RatioValue {
                blow_up: true,
                ..RatioValue::plain(value / eps)
            })
        } else {
            Err(Error::BlowUp {
                component: kernel.spec().component,
                frequency: at.to_vec(),
                defect,
            })
        }
    };

    if geometry.kind() == GeometryKind::Interval {
        if value.norm() > options.tolerance {
            return blow_up(value.norm(), xi);
        }
        return Ok(RatioValue::plain(Complex64::new(0.0, 0.0)));
    }

    // Split into the periodic coordinate (layer only) and the transverse part.
    let offset = usize::from(geometry.kind() == GeometryKind::Layer);
    let leading = &xi[..offset];
    let p = &xi[offset..];
    let n2: f64 = leading.iter().map(|n| n * n).sum();
    let rho = (regime.rate * regime.rate - n2).max(0.0).sqrt();
    let p_norm = magnitude(p);
    let dim = p.len();
    let projected: Vec<f64> = if p_norm > 0.0 {
        p.iter().map(|x| x * rho / p_norm).collect()
    } else {
        let mut e = vec![0.0; dim];
        e[0] = rho;
        e
    };
    let with_p = |q: &[f64]| -> Vec<f64> {
        let mut v = leading.to_vec();
        v.extend_from_slice(q);
        v
    };
    let star = with_p(&projected);
    let defect = kernel.value_at(&star)?.norm();
    if defect > options.tolerance {
        return blow_up(defect, &star);
    }

    let h = options
        .radial_step
        .unwrap_or_else(|| geometry.continuous_frequency_step() / 4.0);
    let plain = |point: &[f64]| -> Result<Complex64> {
        let full = with_p(point);
        Ok(kernel.value_at(&full)? / regime.denominator(magnitude(&full)))
    };

    if rho > h {
        let dir: Vec<f64> = projected.iter().map(|x| x / rho).collect();
        let outer: Vec<f64> = projected.iter().zip(&dir).map(|(x, d)| x + h * d).collect();
        let inner: Vec<f64> = projected.iter().zip(&dir).map(|(x, d)| x - h * d).collect();
        return Ok(RatioValue::plain((plain(&outer)? + plain(&inner)?) / 2.0));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut peak = 0.0f64;
    for s in 0..dim {
        for sign in [1.0, -1.0] {
            let mut q = projected.clone();
            q[s] += sign * h;
            let r = plain(&q)?;
            sum += r;
            peak = peak.max(r.norm());
        }
    }
    Ok(RatioValue {
        value: sum / (2 * dim) as f64,
        peak,
        blow_up: false,
    })
}

/// `G^/D` on every lattice entry of the kernel's geometry.
pub fn ratio_on_lattice(kernel: &KernelTransform, options: &ResonanceOptions) -> Result<Vec<Complex64>> {
    Ok(lattice_ratios(kernel, options)?.into_iter().map(|r| r.value).collect())
}

fn lattice_ratios(kernel: &KernelTransform, options: &ResonanceOptions) -> Result<Vec<RatioValue>> {
    let lattice = kernel.geometry().lattice();
    let spectrum: &SpectralField = kernel.spectrum();
    (0..lattice.len())
        .map(|i| ratio_at(kernel, &lattice.frequency(i), Some(spectrum.coefficients[i]), options))
        .collect()
}

/// Points of the resonant set `|xi| = a` of a plus component on continuous axes.
fn resonant_samples(kernel: &KernelTransform) -> Vec<Vec<f64>> {
    let regime = kernel.regime();
    let geometry = kernel.geometry();
    if regime.sign() == Sign::Minus {
        return Vec::new();
    }
    let a = regime.rate;
    let d = geometry.transverse_dim();
    match geometry.kind() {
        GeometryKind::Interval => Vec::new(),
        GeometryKind::WholeSpace => sphere_samples(d, a, SPHERE_SAMPLES_PER_CIRCLE),
        GeometryKind::Layer => {
            let axis = geometry.axes()[0];
            let top = a.floor() as i64;
            let mut out = Vec::new();
            for n in -top..=top {
                if axis.index_of_mode(n).is_none() {
                    continue;
                }
                let rho = (a * a - (n * n) as f64).max(0.0).sqrt();
                for p in sphere_samples(d, rho, SPHERE_SAMPLES_PER_CIRCLE) {
                    let mut xi = vec![n as f64];
                    xi.extend(p);
                    out.push(xi);
                }
            }
            out
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentMultiplier {
    pub component: usize,
    pub regime: String,
    /// `sup |G^/D|`.
    pub ratio_sup: f64,
    /// `sup |xi|^2 |G^/D|` (equal to `sup |xi| |G^|` when `a = 0`).
    pub second_sup: f64,
    pub constant: f64,
    /// Frequency where the constant is attained (first in lattice order).
    pub location: Vec<f64>,
    pub finite: bool,
    pub warning: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierReport {
    pub kind: ConstantKind,
    pub components: Vec<ComponentMultiplier>,
    pub system_constant: f64,
    pub epsilon_scale: f64,
    pub radial_step: f64,
}

fn component_multiplier(kernel: &KernelTransform, options: &ResonanceOptions) -> Result<ComponentMultiplier> {
    let lattice = kernel.geometry().lattice();
    let mut ratio_sup = 0.0f64;
    let mut second_sup = 0.0f64;
    let mut constant = 0.0f64;
    let mut location = lattice.frequency(lattice.len() / 2);
    let mut blow_up_at: Option<Vec<f64>> = None;

    let mut visit = |xi: Vec<f64>, r: RatioValue| {
        let mag = magnitude(&xi);
        let first = r.peak;
        let second = mag * mag * first;
        ratio_sup = ratio_sup.max(first);
        second_sup = second_sup.max(second);
        if r.blow_up && blow_up_at.is_none() {
            blow_up_at = Some(xi.clone());
        }
        if first.max(second) > constant {
            constant = first.max(second);
            location = xi;
        }
    };

    for (i, r) in lattice_ratios(kernel, options)?.into_iter().enumerate() {
        visit(lattice.frequency(i), r);
    }
    for xi in resonant_samples(kernel) {
        let r = ratio_at(kernel, &xi, None, options)?;
        visit(xi, r);
    }

    Ok(ComponentMultiplier {
        component: kernel.spec().component,
        regime: kernel.regime().label(),
        ratio_sup,
        second_sup,
        constant,
        location,
        finite: blow_up_at.is_none(),
        warning: blow_up_at.map(|xi| {
            format!("kernel does not vanish on the resonant set near {xi:?}; constant is resolution dependent")
        }),
    })
}

/// Component and system multiplier constants.
pub fn multiplier_norms(kernels: &[KernelTransform], options: &ResonanceOptions) -> Result<MultiplierReport> {
    let Some(first) = kernels.first() else {
        return Err(Error::InvalidSystem("no kernels".into()));
    };
    let geometry = first.geometry();
    let components = kernels
        .iter()
        .map(|k| component_multiplier(k, options))
        .collect::<Result<Vec<_>>>()?;
    let system_constant = components.iter().map(|c| c.constant).fold(0.0, f64::max);
    Ok(MultiplierReport {
        kind: ConstantKind::for_geometry(geometry.kind()),
        components,
        system_constant,
        epsilon_scale: options.epsilon_scale,
        radial_step: options
            .radial_step
            .unwrap_or_else(|| geometry.continuous_frequency_step() / 4.0),
    })
}
