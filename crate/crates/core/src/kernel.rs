//! Integral kernels, their regimes, spectra and admissibility checks.
//!
//! A component's regime fixes the sign of its rate term and which
//! orthogonality conditions its kernel must satisfy so that the multiplier
//! `G^(xi) / (|xi| - a)` stays bounded on the resonant set. Conditions are
//! identified by the keys `or1` ... `or11`:
//!
//! | geometry | case | conditions |
//! |----------|------|------------|
//! | whole space | I (`a > 0`) | `or1` (d = 1, `G^(+-a) = 0`) or `or2` (sphere `|p| = a`) |
//! | whole space | II (`a = 0`) | `or3`: `(G, 1) = 0` |
//! | interval | II (`a = n_k`) | `or4`: `G_{+-n_k} = 0` |
//! | interval | III (`a = 0`) | `or5`: `(G, 1) = 0` |
//! | layer | I (`n_k < a < n_k + 1`) | `or6` / `or7` for `|n| <= n_k` |
//! | layer | II (`a = n_k`) | `or8` / `or9` for `|n| <= n_k - 1`, plus `or10` moments |
//! | layer | III (`a = 0`) | `or11`: `(G, 1) = 0` |
//!
//! Case IV (minus sign, `a > 0`) and interval case I only need integrability.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr, Variables};
use crate::geometry::{Axis, Geometry, GeometryKind, SpectralField};

/// Default orthogonality tolerance.
pub const DEFAULT_ADMISSIBILITY_TOLERANCE: f64 = 1e-8;

/// Samples per great circle when checking sphere conditions.
pub const SPHERE_SAMPLES_PER_CIRCLE: usize = 64;

/// Maximal relative growth of a truncated integral under box doubling
/// before it is flagged as divergent.
pub const DIVERGENCE_GROWTH: f64 = 0.01;

const PERIODICITY_TOLERANCE: f64 = 1e-8;
const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeCase {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for RegimeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegimeCase::I => "I",
            RegimeCase::II => "II",
            RegimeCase::III => "III",
            RegimeCase::IV => "IV",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    /// Natality dominates: `sqrt(-Delta) u - a u`.
    Plus,
    /// Mortality dominates: `sqrt(-Delta) u + a u`.
    Minus,
}

/// Regime of one component: geometry, case, rate `a_k` and resonant integer `n_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeTag {
    pub geometry: GeometryKind,
    pub case: RegimeCase,
    pub rate: f64,
    pub resonant_mode: Option<i64>,
}

fn is_natural(x: f64) -> bool {
    x >= 1.0 && x.fract() == 0.0
}

impl RegimeTag {
    pub fn new(geometry: GeometryKind, case: RegimeCase, rate: f64, resonant_mode: Option<i64>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidRegime(msg));
        if !(rate.is_finite() && rate >= 0.0) {
            return bad(format!("rate must be finite and nonnegative, got {rate}"));
        }
        let mut tag = RegimeTag {
            geometry,
            case,
            rate,
            resonant_mode,
        };
        use GeometryKind::*;
        use RegimeCase::*;
        match (geometry, case) {
            (_, IV) => {
                if rate <= 0.0 {
                    return bad("case IV needs a positive rate".into());
                }
            }
            (WholeSpace, III) => return bad("the whole space has no case III; use II for a = 0".into()),
            (WholeSpace, II) | (Interval | Layer, III) => {
                if rate != 0.0 {
                    return bad(format!("case {case} on the {geometry} needs a = 0, got {rate}"));
                }
            }
            (WholeSpace, I) => {
                if rate <= 0.0 {
                    return bad("case I needs a positive rate".into());
                }
            }
            (Interval, I) => {
                if rate <= 0.0 || rate.fract() == 0.0 {
                    return bad(format!("interval case I needs a > 0 not an integer, got {rate}"));
                }
            }
            (Interval | Layer, II) => {
                if !is_natural(rate) {
                    return bad(format!("case II needs a natural rate a = n_k, got {rate}"));
                }
                let n = rate as i64;
                if resonant_mode.is_some_and(|m| m != n) {
                    return bad(format!(
                        "case II needs a = n_k, got a = {rate}, n_k = {resonant_mode:?}"
                    ));
                }
                tag.resonant_mode = Some(n);
            }
            (Layer, I) => {
                let n = rate.floor() as i64;
                if rate <= 0.0 || rate.fract() == 0.0 {
                    return bad(format!("layer case I needs n_k < a < n_k + 1, got a = {rate}"));
                }
                if resonant_mode.is_some_and(|m| m != n) {
                    return bad(format!(
                        "layer case I needs n_k < a < n_k + 1, got a = {rate}, n_k = {resonant_mode:?}"
                    ));
                }
                tag.resonant_mode = Some(n);
            }
        }
        Ok(tag)
    }

    pub fn sign(&self) -> Sign {
        if self.case == RegimeCase::IV {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    /// `|xi| - a` for plus components, `|xi| + a` for minus components.
    pub fn denominator(&self, magnitude: f64) -> f64 {
        match self.sign() {
            Sign::Plus => magnitude - self.rate,
            Sign::Minus => magnitude + self.rate,
        }
    }

    pub fn label(&self) -> String {
        let geo = match self.geometry {
            GeometryKind::Interval => "INT",
            GeometryKind::WholeSpace => "WS",
            GeometryKind::Layer => "LAY",
        };
        format!("{geo}-{}", self.case)
    }
}

/// One entry of a spectral kernel table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub modes: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum KernelDefinition {
    /// `G(x)` in physical coordinates.
    Physical(Expr),
    /// Real closed form of `G^(xi)` in the frequency variables.
    SpectralExpr(Expr),
    /// Coefficients at listed lattice modes; all others are zero.
    SpectralTable(Vec<TableEntry>),
}

impl KernelDefinition {
    pub fn physical(source: &str) -> Result<Self> {
        Ok(KernelDefinition::Physical(parse_expr(source)?))
    }

    pub fn spectral(source: &str, geometry: GeometryKind, dim: usize) -> Result<Self> {
        Ok(KernelDefinition::SpectralExpr(Expr::parse_with(
            source,
            &spectral_variables(geometry, dim),
        )?))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        use crate::expr::{BinOp, ExprAst};
        match self {
            KernelDefinition::Physical(e) | KernelDefinition::SpectralExpr(e) => {
                let ast = ExprAst::Binary(BinOp::Mul, Box::new(ExprAst::Const(factor)), Box::new(e.ast().clone()));
                let scaled = Expr::from_parts(format!("{factor}*({})", e.source()), ast);
                if matches!(self, KernelDefinition::Physical(_)) {
                    KernelDefinition::Physical(scaled)
                } else {
                    KernelDefinition::SpectralExpr(scaled)
                }
            }
            KernelDefinition::SpectralTable(t) => KernelDefinition::SpectralTable(
                t.iter()
                    .map(|e| TableEntry {
                        modes: e.modes.clone(),
                        re: e.re * factor,
                        im: e.im * factor,
                    })
                    .collect(),
            ),
        }
    }
}

/// Frequency variables of spectral kernel expressions.
///
/// Interval: `n`; whole space: `p` (= `p1`), `p2`, `p3`; layer: `n` and
/// `p` (= `p1`), `p2`. Everywhere `r` is the magnitude `|xi|`.
pub fn spectral_variables(geometry: GeometryKind, dim: usize) -> Variables {
    let mut names: Vec<(String, usize)> = Vec::new();
    let offset = match geometry {
        GeometryKind::Interval => {
            names.push(("n".into(), 0));
            names.push(("r".into(), 1));
            return Variables::new(names);
        }
        GeometryKind::WholeSpace => 0,
        GeometryKind::Layer => {
            names.push(("n".into(), 0));
            1
        }
    };
    names.push(("p".into(), offset));
    for s in 0..dim {
        names.push((format!("p{}", s + 1), offset + s));
    }
    names.push(("r".into(), offset + dim));
    Variables::new(names)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    /// Zero-based component index.
    pub component: usize,
    pub definition: KernelDefinition,
    pub regime: RegimeTag,
}

/// A kernel resolved on a geometry: grid samples, lattice spectrum, and
/// off-lattice evaluation of its transform.
#[derive(Clone, Debug)]
pub struct KernelTransform {
    geometry: Geometry,
    spec: KernelSpec,
    samples: Vec<f64>,
    spectrum: SpectralField,
}

/// Returns the kernel's transform on the geometry's lattice.
pub fn kernel_spectrum(kernel: &KernelSpec, geometry: &Geometry) -> Result<SpectralField> {
    Ok(KernelTransform::new(kernel, geometry)?.spectrum)
}

/// Evaluates the kernel's orthogonality and integrability conditions.
pub fn check_admissibility(kernel: &KernelSpec, geometry: &Geometry, tolerance: f64) -> Result<AdmissibilityReport> {
    KernelTransform::new(kernel, geometry)?.admissibility(tolerance)
}

impl KernelTransform {
    pub fn new(spec: &KernelSpec, geometry: &Geometry) -> Result<Self> {
        if spec.regime.geometry != geometry.kind() {
            return Err(Error::InvalidRegime(format!(
                "regime {} used on a {} geometry",
                spec.regime.label(),
                geometry.kind()
            )));
        }
        let lattice = geometry.lattice();
        let (samples, spectrum) = match &spec.definition {
            KernelDefinition::Physical(expr) => {
                if expr.arity() > geometry.total_dim() {
                    return Err(Error::InvalidSystem(format!(
                        "kernel `{}` uses more coordinates than the geometry has",
                        expr.source()
                    )));
                }
                let samples = (0..geometry.grid_len())
                    .map(|i| expr.eval(&geometry.grid_point(i)))
                    .collect::<Result<Vec<_>>>()?;
                if geometry.axes()[0].is_periodic() {
                    check_periodic(geometry, |x| expr.eval(x))?;
                }
                let spectrum = geometry.forward(&samples)?;
                (samples, spectrum)
            }
            KernelDefinition::SpectralExpr(expr) => {
                let coefficients = (0..lattice.len())
                    .map(|i| {
                        let mut vars = lattice.frequency(i);
                        vars.push(lattice.magnitude(i));
                        expr.eval(&vars).map(|v| Complex64::new(v, 0.0))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let spectrum = SpectralField::from_coefficients(geometry, coefficients)?;
                check_symmetry(&spectrum, geometry)?;
                (geometry.inverse(&spectrum)?, spectrum)
            }
            KernelDefinition::SpectralTable(entries) => {
                let mut spectrum = SpectralField::zeros(geometry);
                for entry in entries {
                    let index = lattice
                        .index_of_modes(&entry.modes)
                        .ok_or_else(|| Error::Config(format!("table mode {:?} is not on the lattice", entry.modes)))?;
                    spectrum.coefficients[index] = Complex64::new(entry.re, entry.im);
                }
                check_symmetry(&spectrum, geometry)?;
                (geometry.inverse(&spectrum)?, spectrum)
            }
        };

        let transform = KernelTransform {
            geometry: geometry.clone(),
            spec: spec.clone(),
            samples,
            spectrum,
        };
        let sup = transform
            .spectrum
            .coefficients
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        let bound = transform.l1_norm() / geometry.convolution_factor();
        if sup > bound * (1.0 + 1e-9) + 1e-14 {
            return Err(Error::BoundViolation { sup, bound });
        }
        Ok(transform)
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn regime(&self) -> &RegimeTag {
        &self.spec.regime
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn spectrum(&self) -> &SpectralField {
        &self.spectrum
    }

    /// Kernel values on the physical grid.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Trapezoid value of `||G||_{L^1}` on the truncated domain.
    pub fn l1_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.abs()).sum::<f64>() * self.geometry.cell_volume()
    }

    /// Transform of the kernel at an arbitrary frequency point. Periodic
    /// coordinates must be integers.
    pub fn value_at(&self, xi: &[f64]) -> Result<Complex64> {
        let axes = self.geometry.axes();
        if xi.len() != axes.len() {
            return Err(Error::SizeMismatch {
                expected: axes.len(),
                found: xi.len(),
            });
        }
        match &self.spec.definition {
            KernelDefinition::SpectralExpr(expr) => {
                let mut vars = xi.to_vec();
                vars.push(xi.iter().map(|x| x * x).sum::<f64>().sqrt());
                Ok(Complex64::new(expr.eval(&vars)?, 0.0))
            }
            KernelDefinition::SpectralTable(_) => Ok(interpolate(&self.geometry, &self.spectrum, xi)),
            KernelDefinition::Physical(_) => Ok(direct_transform(&self.geometry, &self.samples, xi)),
        }
    }

    fn gradient_samples(&self) -> Result<Vec<Vec<f64>>> {
        let lattice = self.geometry.lattice();
        (0..self.geometry.total_dim())
            .map(|axis| {
                let n = self.geometry.shape()[axis];
                let coefficients = (0..lattice.len())
                    .map(|i| {
                        let pos = lattice.unravel(i)[axis];
                        if pos == 0 && n > 1 {
                            // odd derivatives drop the self-conjugate Nyquist mode
                            return Complex64::new(0.0, 0.0);
                        }
                        let freq = self.geometry.axes()[axis].frequency(pos);
                        self.spectrum.coefficients[i] * Complex64::new(0.0, freq)
                    })
                    .collect();
                let field = SpectralField::from_coefficients(&self.geometry, coefficients)?;
                self.geometry.inverse(&field)
            })
            .collect()
    }

    fn integrals(&self) -> Result<Vec<(String, f64)>> {
        let g = &self.geometry;
        let cell = g.cell_volume();
        let mut out = vec![("G_L1".to_string(), self.l1_norm())];

        let grads = self.gradient_samples()?;
        let grad_l1 = (0..g.grid_len())
            .map(|i| grads.iter().map(|d| d[i] * d[i]).sum::<f64>().sqrt())
            .sum::<f64>()
            * cell;
        out.push(("grad_G_L1".into(), grad_l1));

        let moment = |power: i32, skip_periodic: bool| -> f64 {
            (0..g.grid_len())
                .map(|i| {
                    let x = g.grid_point(i);
                    let r2: f64 = x
                        .iter()
                        .zip(g.axes())
                        .filter(|(_, a)| !(skip_periodic && a.is_periodic()))
                        .map(|(v, _)| v * v)
                        .sum();
                    r2.sqrt().powi(power) * self.samples[i].abs()
                })
                .sum::<f64>()
                * cell
        };
        match g.kind() {
            GeometryKind::Interval => {}
            GeometryKind::WholeSpace => out.push(("xG_L1".into(), moment(1, false))),
            GeometryKind::Layer => {
                out.push(("x_perp_G_L1".into(), moment(1, true)));
                out.push(("x_perp2_G_L1".into(), moment(2, true)));
            }
        }
        Ok(out)
    }

    fn required_integrals(&self) -> Vec<&'static str> {
        let mut req = vec!["G_L1", "grad_G_L1"];
        match (self.geometry.kind(), self.regime().case) {
            (GeometryKind::WholeSpace, RegimeCase::I | RegimeCase::II) => req.push("xG_L1"),
            (GeometryKind::Layer, RegimeCase::I | RegimeCase::III) => req.push("x_perp_G_L1"),
            (GeometryKind::Layer, RegimeCase::II) => req.push("x_perp2_G_L1"),
            _ => {}
        }
        req
    }

    /// Max defect of `G^` over points `(n, p)` with `p` on the sphere of
    /// the given radius (the layer's periodic coordinate `n` is prepended).
    fn sphere_defect(&self, leading: Option<f64>, radius: f64) -> Result<(f64, usize)> {
        let dim = self.geometry.transverse_dim().max(1);
        let points = sphere_samples(dim, radius, SPHERE_SAMPLES_PER_CIRCLE);
        let mut defect: f64 = 0.0;
        for p in &points {
            let mut xi = Vec::with_capacity(dim + 1);
            xi.extend(leading);
            xi.extend_from_slice(p);
            defect = defect.max(self.value_at(&xi)?.norm());
        }
        Ok((defect, points.len()))
    }

    pub fn admissibility(&self, tolerance: f64) -> Result<AdmissibilityReport> {
        if tolerance.is_nan() || tolerance <= 0.0 {
            return Err(Error::InvalidTolerance(tolerance));
        }
        let g = &self.geometry;
        let regime = self.regime();
        let d = g.transverse_dim();
        let a = regime.rate;
        let mut conditions: Vec<ConditionCheck> = Vec::new();
        let mut push = |id: &str, description: String, defect: f64, samples: usize| {
            conditions.push(ConditionCheck {
                id: id.to_string(),
                description,
                defect,
                samples,
                passed: defect <= tolerance,
            });
        };

        match (g.kind(), regime.case) {
            (GeometryKind::WholeSpace, RegimeCase::I) => {
                let (defect, samples) = self.sphere_defect(None, a)?;
                if d == 1 {
                    push("or1", format!("G^(+-{a}) = 0"), defect, samples);
                } else {
                    push("or2", format!("G^ = 0 on the sphere |p| = {a}"), defect, samples);
                }
            }
            (GeometryKind::WholeSpace, RegimeCase::II) => {
                let defect = self.value_at(&vec![0.0; d])?.norm() * g.convolution_factor();
                push("or3", "(G, 1) = 0".into(), defect, 1);
            }
            (GeometryKind::Interval, RegimeCase::II) => {
                let n = regime.resonant_mode.unwrap_or(a as i64) as f64;
                let defect = self.value_at(&[n])?.norm().max(self.value_at(&[-n])?.norm());
                push("or4", format!("G_(+-{n}) = 0"), defect, 2);
            }
            (GeometryKind::Interval, RegimeCase::III) => {
                let defect = self.value_at(&[0.0])?.norm() * g.convolution_factor();
                push("or5", "(G, 1) = 0".into(), defect, 1);
            }
            (GeometryKind::Layer, RegimeCase::I) => {
                let nk = regime.resonant_mode.unwrap_or(a.floor() as i64);
                let id = if d == 1 { "or6" } else { "or7" };
                let (mut defect, mut samples) = (0.0f64, 0);
                for n in -nk..=nk {
                    let radius = (a * a - (n * n) as f64).sqrt();
                    let (def, s) = self.sphere_defect(Some(n as f64), radius)?;
                    defect = defect.max(def);
                    samples += s;
                }
                push(
                    id,
                    format!("G^_n = 0 on |p| = sqrt({a}^2 - n^2), |n| <= {nk}"),
                    defect,
                    samples,
                );
            }
            (GeometryKind::Layer, RegimeCase::II) => {
                let nk = regime.resonant_mode.unwrap_or(a as i64);
                let id = if d == 1 { "or8" } else { "or9" };
                let (mut defect, mut samples) = (0.0f64, 0);
                for n in -(nk - 1)..=(nk - 1) {
                    let radius = ((nk * nk - n * n) as f64).sqrt();
                    let (def, s) = self.sphere_defect(Some(n as f64), radius)?;
                    defect = defect.max(def);
                    samples += s;
                }
                push(
                    id,
                    format!("G^_n = 0 on |p| = sqrt({nk}^2 - n^2), |n| <= {}", nk - 1),
                    defect,
                    samples,
                );

                let mut moments: f64 = 0.0;
                let scale = g.cell_volume() / (2.0 * PI).sqrt();
                for sgn in [-1.0, 1.0] {
                    let n = sgn * nk as f64;
                    let mut zeroth = Complex64::new(0.0, 0.0);
                    let mut first = vec![Complex64::new(0.0, 0.0); d];
                    for i in 0..g.grid_len() {
                        let x = g.grid_point(i);
                        let w = Complex64::from_polar(self.samples[i] * scale, -n * x[0]);
                        zeroth += w;
                        for s in 0..d {
                            first[s] += w * x[s + 1];
                        }
                    }
                    moments = moments.max(zeroth.norm());
                    for f in first {
                        moments = moments.max(f.norm());
                    }
                }
                push(
                    "or10",
                    format!("zeroth and first transverse moments against e^(+-i{nk}x1)"),
                    moments,
                    2 * (d + 1),
                );
            }
            (GeometryKind::Layer, RegimeCase::III) => {
                let defect = self.value_at(&vec![0.0; d + 1])?.norm() * g.convolution_factor();
                push("or11", "(G, 1) = 0".into(), defect, 1);
            }
            _ => {}
        }

        let required = self.required_integrals();
        let base = self.integrals()?;
        let refined = match (&self.spec.definition, g.kind()) {
            (KernelDefinition::SpectralTable(_), _) | (_, GeometryKind::Interval) => None,
            _ => {
                let fine = g.refined_box()?;
                Some(KernelTransform::new(&self.spec, &fine)?.integrals()?)
            }
        };
        let integrals = base
            .iter()
            .enumerate()
            .map(|(i, (name, value))| {
                let refined_value = refined.as_ref().map(|r| r[i].1);
                let finite = value.is_finite()
                    && refined_value.is_none_or(|r| r.is_finite() && r <= value * (1.0 + DIVERGENCE_GROWTH) + 1e-300);
                IntegralCheck {
                    name: name.clone(),
                    value: *value,
                    refined_value,
                    finite,
                    required: required.contains(&name.as_str()),
                }
            })
            .collect::<Vec<_>>();

        let sup = self.spectrum.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let passed = conditions.iter().all(|c| c.passed) && integrals.iter().all(|i| i.finite || !i.required);
        Ok(AdmissibilityReport {
            component: self.spec.component,
            regime: regime.label(),
            rate: regime.rate,
            tolerance,
            conditions,
            integrals,
            spectrum_sup: sup,
            spectrum_bound: self.l1_norm() / g.convolution_factor(),
            passed,
        })
    }
}

fn check_periodic(geometry: &Geometry, f: impl Fn(&[f64]) -> Result<f64>) -> Result<()> {
    let transverse: usize = geometry.shape()[1..].iter().product();
    let mut defect: f64 = 0.0;
    for t in 0..transverse {
        let mut x = geometry.grid_point(t);
        x[0] = 0.0;
        let left = f(&x)?;
        x[0] = 2.0 * PI;
        let right = f(&x)?;
        defect = defect.max((left - right).abs());
    }
    if defect > PERIODICITY_TOLERANCE {
        return Err(Error::Periodicity { defect });
    }
    Ok(())
}

fn check_symmetry(spectrum: &SpectralField, geometry: &Geometry) -> Result<()> {
    let lattice = geometry.lattice();
    let sup = spectrum.coefficients.iter().map(|c| c.norm()).fold(1.0, f64::max);
    for i in 0..spectrum.len() {
        let j = lattice.conjugate_index(i);
        let defect = (spectrum.coefficients[j] - spectrum.coefficients[i].conj()).norm();
        if defect > SYMMETRY_TOLERANCE * sup {
            return Err(Error::SymmetryViolation { index: i, defect });
        }
    }
    Ok(())
}

/// Quadrature transform of grid samples at an arbitrary frequency.
pub(crate) fn direct_transform(geometry: &Geometry, samples: &[f64], xi: &[f64]) -> Complex64 {
    let axes = geometry.axes();
    let mut tensor: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for (axis_index, axis) in axes.iter().enumerate().rev() {
        let n = axis.points();
        let phases: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(1.0, -xi[axis_index] * axis.coordinate(j)))
            .collect();
        let scale = axis.grid_step() / (2.0 * PI).sqrt();
        tensor = tensor
            .chunks(n)
            .map(|line| line.iter().zip(&phases).map(|(v, p)| v * p).sum::<Complex64>() * scale)
            .collect();
    }
    tensor[0]
}

/// Multilinear interpolation of a lattice field at an off-lattice point.
/// Periodic coordinates are rounded to the nearest mode; points outside the
/// lattice evaluate to zero.
pub(crate) fn interpolate(geometry: &Geometry, field: &SpectralField, xi: &[f64]) -> Complex64 {
    let axes = geometry.axes();
    let mut stencil: Vec<(Vec<usize>, f64)> = vec![(Vec::new(), 1.0)];
    for (axis, &x) in axes.iter().zip(xi) {
        let n = axis.points() as i64;
        let t = x / axis.frequency_step() + (n / 2) as f64;
        let nodes: Vec<(i64, f64)> = match axis {
            Axis::Periodic { .. } => vec![(t.round() as i64, 1.0)],
            Axis::Continuous { .. } => {
                let lo = t.floor();
                let frac = t - lo;
                vec![(lo as i64, 1.0 - frac), (lo as i64 + 1, frac)]
            }
        };
        let mut next = Vec::new();
        for (prefix, w) in &stencil {
            for &(i, wi) in &nodes {
                if wi == 0.0 {
                    continue;
                }
                if i < 0 || i >= n {
                    continue;
                }
                let mut p = prefix.clone();
                p.push(i as usize);
                next.push((p, w * wi));
            }
        }
        stencil = next;
    }
    let lattice = geometry.lattice();
    stencil
        .iter()
        .map(|(p, w)| field.coefficients[lattice.ravel(p)] * *w)
        .sum()
}

/// Uniform samples of the sphere `|p| = radius` in `R^dim`: the two points
/// `+-radius` for `dim = 1`, `per_circle` points for `dim = 2`, and a
/// latitude/longitude net plus both poles for `dim = 3`.
pub fn sphere_samples(dim: usize, radius: f64, per_circle: usize) -> Vec<Vec<f64>> {
    if radius == 0.0 {
        return vec![vec![0.0; dim]];
    }
    match dim {
        1 => vec![vec![radius], vec![-radius]],
        2 => (0..per_circle)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / per_circle as f64;
                vec![radius * t.cos(), radius * t.sin()]
            })
            .collect(),
        _ => {
            let rings = per_circle / 2;
            let mut pts = vec![vec![0.0, 0.0, radius], vec![0.0, 0.0, -radius]];
            for i in 0..rings {
                let theta = PI * (i as f64 + 0.5) / rings as f64;
                for j in 0..per_circle {
                    let phi = 2.0 * PI * j as f64 / per_circle as f64;
                    pts.push(vec![
                        radius * theta.sin() * phi.cos(),
                        radius * theta.sin() * phi.sin(),
                        radius * theta.cos(),
                    ]);
                }
            }
            pts
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub id: String,
    pub description: String,
    /// Largest absolute value of the orthogonality integral over its samples.
    pub defect: f64,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralCheck {
    pub name: String,
    pub value: f64,
    /// Same integral on the doubled box, when a refinement is possible.
    pub refined_value: Option<f64>,
    pub finite: bool,
    pub required: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub component: usize,
    pub regime: String,
    pub rate: f64,
    pub tolerance: f64,
    pub conditions: Vec<ConditionCheck>,
    pub integrals: Vec<IntegralCheck>,
    pub spectrum_sup: f64,
    pub spectrum_bound: f64,
    pub passed: bool,
}

impl AdmissibilityReport {
    pub fn condition(&self, id: &str) -> Option<&ConditionCheck> {
        self.conditions.iter().find(|c| c.id == id)
    }

    /// Flat `key=value` listing, one entry per line.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let mut line = |k: String, v: String| {
            out.push_str(&k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        let c = self.component + 1;
        line(format!("component.{c}.regime"), self.regime.clone());
        line(format!("component.{c}.rate"), format!("{:e}", self.rate));
        line(format!("component.{c}.tolerance"), format!("{:e}", self.tolerance));
        for cond in &self.conditions {
            line(
                format!("component.{c}.{}.defect", cond.id),
                format!("{:e}", cond.defect),
            );
            line(
                format!("component.{c}.{}.verdict", cond.id),
                if cond.passed { "pass" } else { "fail" }.into(),
            );
        }
        for int in &self.integrals {
            line(format!("component.{c}.{}.value", int.name), format!("{:e}", int.value));
            line(format!("component.{c}.{}.finite", int.name), int.finite.to_string());
        }
        line(
            format!("component.{c}.verdict"),
            if self.passed { "pass" } else { "fail" }.into(),
        );
        out
    }
}
