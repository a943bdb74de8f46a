//! Domain geometries, their frequency lattices, and the spectral transforms.
//!
//! Three domains are supported: the periodic interval `[0, 2pi]`, the whole
//! space `R^d` (truncated to the box `[-L, L]^d`), and the layer
//! `[0, 2pi] x R^d`. Every geometry is a product of axes, each either
//! periodic (integer modes) or continuous (trapezoid rule on a uniform grid).
//!
//! Transform conventions:
//!
//! * periodic axis: `G_n = int_0^{2pi} G(x) e^{-inx} / sqrt(2pi) dx`
//! * continuous axis: `G^(p) = (2pi)^{-1/2} int G(x) e^{-ipx} dx`
//!
//! Both are discretized on `n` uniform points and evaluated with an FFT.
//! Lattice entries are stored in row-major order over the axes, with
//! centered modes `-n/2, ..., n/2 - 1` on every axis.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{RegimeCase, RegimeTag};

/// Imaginary parts below this (relative to the field's sup norm, floored at
/// one) are discarded after an inverse transform; larger ones are an error.
pub const REALNESS_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Interval,
    WholeSpace,
    Layer,
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GeometryKind::Interval => "interval",
            GeometryKind::WholeSpace => "whole_space",
            GeometryKind::Layer => "layer",
        };
        f.write_str(name)
    }
}

fn default_dim() -> usize {
    1
}

fn default_box_half_width() -> f64 {
    10.0
}

fn default_grid_points() -> usize {
    64
}

fn default_mode_cutoff() -> usize {
    32
}

/// User-facing geometry parameters.
///
/// `dim` is the transverse dimension (ignored on the interval),
/// `box_half_width` and `grid_points` describe the continuous axes and
/// `mode_cutoff` the periodic one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub kind: GeometryKind,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_box_half_width")]
    pub box_half_width: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_mode_cutoff")]
    pub mode_cutoff: usize,
}

impl GeometryConfig {
    pub fn interval(mode_cutoff: usize) -> Self {
        GeometryConfig {
            kind: GeometryKind::Interval,
            dim: default_dim(),
            box_half_width: default_box_half_width(),
            grid_points: default_grid_points(),
            mode_cutoff,
        }
    }

    pub fn whole_space(dim: usize, box_half_width: f64, grid_points: usize) -> Self {
        GeometryConfig {
            kind: GeometryKind::WholeSpace,
            dim,
            box_half_width,
            grid_points,
            mode_cutoff: default_mode_cutoff(),
        }
    }

    pub fn layer(dim: usize, mode_cutoff: usize, box_half_width: f64, grid_points: usize) -> Self {
        GeometryConfig {
            kind: GeometryKind::Layer,
            dim,
            box_half_width,
            grid_points,
            mode_cutoff,
        }
    }
}

/// One tensor-product axis of a geometry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Axis {
    /// `[0, 2pi)` sampled at `points` nodes, integer modes.
    Periodic { points: usize },
    /// `[-half_width, half_width)` sampled at `points` nodes.
    Continuous { points: usize, half_width: f64 },
}

impl Axis {
    pub fn points(&self) -> usize {
        match *self {
            Axis::Periodic { points } | Axis::Continuous { points, .. } => points,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Axis::Periodic { .. })
    }

    pub fn grid_step(&self) -> f64 {
        match *self {
            Axis::Periodic { points } => 2.0 * PI / points as f64,
            Axis::Continuous { points, half_width } => 2.0 * half_width / points as f64,
        }
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        match *self {
            Axis::Periodic { .. } => j as f64 * self.grid_step(),
            Axis::Continuous { half_width, .. } => -half_width + j as f64 * self.grid_step(),
        }
    }

    /// Frequency spacing: 1 on periodic axes, `pi / L` on continuous ones.
    pub fn frequency_step(&self) -> f64 {
        match *self {
            Axis::Periodic { .. } => 1.0,
            Axis::Continuous { half_width, .. } => PI / half_width,
        }
    }

    /// Centered integer mode of the `i`-th lattice entry along this axis.
    pub fn mode(&self, i: usize) -> i64 {
        i as i64 - (self.points() / 2) as i64
    }

    pub fn frequency(&self, i: usize) -> f64 {
        self.mode(i) as f64 * self.frequency_step()
    }

    /// Lattice position of a centered mode, if it lies on this axis.
    pub fn index_of_mode(&self, mode: i64) -> Option<usize> {
        let i = mode + (self.points() / 2) as i64;
        (0..self.points() as i64).contains(&i).then_some(i as usize)
    }

    /// Index of the entry holding mode `-m` (the Nyquist mode is its own partner).
    pub fn conjugate_index(&self, i: usize) -> usize {
        let n = self.points();
        (n - i) % n
    }

    fn forward_scale(&self) -> f64 {
        self.grid_step() / (2.0 * PI).sqrt()
    }

    fn inverse_scale(&self) -> f64 {
        self.frequency_step() / (2.0 * PI).sqrt()
    }

    /// `e^{-i p x_0}` for the grid origin of this axis, which is `(-1)^m` on
    /// continuous axes and 1 on periodic ones.
    fn origin_phase(&self, i: usize) -> f64 {
        match self {
            Axis::Periodic { .. } => 1.0,
            Axis::Continuous { .. } => {
                if self.mode(i).rem_euclid(2) == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// Ordered set of frequency points of a geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyLattice {
    axes: Vec<Axis>,
    shape: Vec<usize>,
    magnitudes: Vec<f64>,
    weight: f64,
}

impl FrequencyLattice {
    fn new(axes: Vec<Axis>) -> Self {
        let shape: Vec<usize> = axes.iter().map(Axis::points).collect();
        let len = shape.iter().product();
        let weight = axes.iter().map(Axis::frequency_step).product();
        let mut lattice = FrequencyLattice {
            axes,
            shape,
            magnitudes: Vec::with_capacity(len),
            weight,
        };
        for index in 0..len {
            let mag = lattice.frequency(index).iter().map(|x| x * x).sum::<f64>().sqrt();
            lattice.magnitudes.push(mag);
        }
        lattice
    }

    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Per-axis lattice positions of a flat index.
    pub fn unravel(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.shape.len()];
        for (slot, &n) in out.iter_mut().zip(&self.shape).rev() {
            *slot = index % n;
            index /= n;
        }
        out
    }

    pub fn ravel(&self, positions: &[usize]) -> usize {
        positions.iter().zip(&self.shape).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn modes(&self, index: usize) -> Vec<i64> {
        self.unravel(index)
            .iter()
            .zip(&self.axes)
            .map(|(&i, axis)| axis.mode(i))
            .collect()
    }

    pub fn frequency(&self, index: usize) -> Vec<f64> {
        self.unravel(index)
            .iter()
            .zip(&self.axes)
            .map(|(&i, axis)| axis.frequency(i))
            .collect()
    }

    pub fn magnitude(&self, index: usize) -> f64 {
        self.magnitudes[index]
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    /// Parseval weight of an entry; uniform over the lattice.
    pub fn weight(&self, _index: usize) -> f64 {
        self.weight
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::repeat_n(self.weight, self.len())
    }

    pub fn conjugate_index(&self, index: usize) -> usize {
        let positions: Vec<usize> = self
            .unravel(index)
            .iter()
            .zip(&self.axes)
            .map(|(&i, axis)| axis.conjugate_index(i))
            .collect();
        self.ravel(&positions)
    }

    pub fn index_of_modes(&self, modes: &[i64]) -> Option<usize> {
        if modes.len() != self.axes.len() {
            return None;
        }
        let positions = modes
            .iter()
            .zip(&self.axes)
            .map(|(&m, axis)| axis.index_of_mode(m))
            .collect::<Option<Vec<_>>>()?;
        Some(self.ravel(&positions))
    }
}

#[derive(Clone)]
struct AxisPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// A validated domain together with its lattice and FFT plans.
#[derive(Clone)]
pub struct Geometry {
    config: GeometryConfig,
    lattice: Arc<FrequencyLattice>,
    plans: Arc<Vec<AxisPlan>>,
}

impl fmt::Debug for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Geometry")
            .field("config", &self.config)
            .field("shape", &self.lattice.shape)
            .finish()
    }
}

impl PartialEq for Geometry {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
    }
}

/// Validates the parameters and returns the geometry with its lattice.
pub fn build_geometry(config: &GeometryConfig) -> Result<(Geometry, Arc<FrequencyLattice>)> {
    let geometry = Geometry::new(config.clone())?;
    let lattice = geometry.lattice_arc();
    Ok((geometry, lattice))
}

impl Geometry {
    pub fn new(config: GeometryConfig) -> Result<Self> {
        let periodic = |n: usize| -> Result<Axis> {
            if n == 0 || !n.is_multiple_of(2) {
                return Err(Error::InvalidGeometry(format!(
                    "mode cutoff must be a positive even integer, got {n}"
                )));
            }
            Ok(Axis::Periodic { points: n })
        };
        let continuous = |config: &GeometryConfig| -> Result<Axis> {
            if config.grid_points == 0 || !config.grid_points.is_multiple_of(2) {
                return Err(Error::InvalidGeometry(format!(
                    "grid points must be a positive even integer, got {}",
                    config.grid_points
                )));
            }
            if !(config.box_half_width > 0.0 && config.box_half_width.is_finite()) {
                return Err(Error::InvalidGeometry(format!(
                    "box half width must be positive, got {}",
                    config.box_half_width
                )));
            }
            Ok(Axis::Continuous {
                points: config.grid_points,
                half_width: config.box_half_width,
            })
        };

        let axes = match config.kind {
            GeometryKind::Interval => vec![periodic(config.mode_cutoff)?],
            GeometryKind::WholeSpace => {
                if !(1..=3).contains(&config.dim) {
                    return Err(Error::InvalidGeometry(format!(
                        "whole space dimension must be 1..=3, got {}",
                        config.dim
                    )));
                }
                let axis = continuous(&config)?;
                vec![axis; config.dim]
            }
            GeometryKind::Layer => {
                if !(1..=2).contains(&config.dim) {
                    return Err(Error::InvalidGeometry(format!(
                        "layer transverse dimension must be 1..=2, got {}",
                        config.dim
                    )));
                }
                let axis = continuous(&config)?;
                let mut axes = vec![periodic(config.mode_cutoff)?];
                axes.extend(std::iter::repeat_n(axis, config.dim));
                axes
            }
        };

        let mut planner = FftPlanner::new();
        let plans = axes
            .iter()
            .map(|axis| AxisPlan {
                forward: planner.plan_fft_forward(axis.points()),
                inverse: planner.plan_fft_inverse(axis.points()),
            })
            .collect();

        Ok(Geometry {
            config,
            lattice: Arc::new(FrequencyLattice::new(axes)),
            plans: Arc::new(plans),
        })
    }

    pub fn config(&self) -> &GeometryConfig {
        &self.config
    }

    pub fn kind(&self) -> GeometryKind {
        self.config.kind
    }

    /// Transverse dimension `d` (zero on the interval).
    pub fn transverse_dim(&self) -> usize {
        match self.kind() {
            GeometryKind::Interval => 0,
            _ => self.config.dim,
        }
    }

    /// Number of axes of the domain.
    pub fn total_dim(&self) -> usize {
        self.lattice.axes.len()
    }

    pub fn lattice(&self) -> &FrequencyLattice {
        &self.lattice
    }

    pub fn lattice_arc(&self) -> Arc<FrequencyLattice> {
        Arc::clone(&self.lattice)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.lattice.axes
    }

    pub fn shape(&self) -> &[usize] {
        &self.lattice.shape
    }

    /// Number of grid points (equal to the number of lattice entries).
    pub fn grid_len(&self) -> usize {
        self.lattice.len()
    }

    /// Trapezoid weight of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.axes().iter().map(Axis::grid_step).product()
    }

    pub fn grid_point(&self, index: usize) -> Vec<f64> {
        self.lattice
            .unravel(index)
            .iter()
            .zip(self.axes())
            .map(|(&j, axis)| axis.coordinate(j))
            .collect()
    }

    /// `(2pi)^{D/2}` with `D` the number of axes: the factor a convolution
    /// picks up under the transform.
    pub fn convolution_factor(&self) -> f64 {
        (2.0 * PI).powf(self.total_dim() as f64 / 2.0)
    }

    /// Smallest frequency spacing over continuous axes (1 if there are none).
    pub fn continuous_frequency_step(&self) -> f64 {
        self.axes()
            .iter()
            .filter(|a| !a.is_periodic())
            .map(Axis::frequency_step)
            .fold(f64::INFINITY, f64::min)
            .min(1.0)
    }

    /// Same geometry with the box doubled at fixed grid spacing.
    pub fn refined_box(&self) -> Result<Geometry> {
        let mut config = self.config.clone();
        config.box_half_width *= 2.0;
        config.grid_points *= 2;
        Geometry::new(config)
    }

    fn check_shape(&self, shape: &[usize]) -> Result<()> {
        if shape != self.shape() {
            return Err(Error::LatticeMismatch);
        }
        Ok(())
    }

    /// Transform of one real component sampled on the grid.
    pub fn forward(&self, samples: &[f64]) -> Result<SpectralField> {
        if samples.len() != self.grid_len() {
            return Err(Error::SizeMismatch {
                expected: self.grid_len(),
                found: samples.len(),
            });
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for axis in 0..self.total_dim() {
            self.transform_axis(&mut buf, axis, true);
        }
        Ok(SpectralField {
            shape: self.shape().to_vec(),
            coefficients: buf,
        })
    }

    /// Complex grid values of the inverse transform, without realness check.
    pub fn inverse_complex(&self, field: &SpectralField) -> Result<Vec<Complex64>> {
        self.check_shape(&field.shape)?;
        let mut buf = field.coefficients.clone();
        for axis in 0..self.total_dim() {
            self.transform_axis(&mut buf, axis, false);
        }
        Ok(buf)
    }

    /// Inverse transform of one component; errors if the result is not real.
    pub fn inverse(&self, field: &SpectralField) -> Result<Vec<f64>> {
        let values = self.inverse_complex(field)?;
        let sup = values.iter().map(|v| v.re.abs()).fold(1.0, f64::max);
        let max_imag = values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        if max_imag > REALNESS_TOLERANCE * sup {
            return Err(Error::ImaginaryResidue { max_imag });
        }
        Ok(values.iter().map(|v| v.re).collect())
    }

    fn transform_axis(&self, buf: &mut [Complex64], axis: usize, forward: bool) {
        let shape = self.shape();
        let n = shape[axis];
        let stride: usize = shape[axis + 1..].iter().product();
        let outer: usize = shape[..axis].iter().product();
        let spec = self.axes()[axis];
        let plan = &self.plans[axis];
        let half = n / 2;
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); n];

        for o in 0..outer {
            for s in 0..stride {
                let base = o * n * stride + s;
                if forward {
                    for (j, slot) in line.iter_mut().enumerate() {
                        *slot = buf[base + j * stride];
                    }
                    plan.forward.process(&mut line);
                    let scale = spec.forward_scale();
                    for i in 0..n {
                        buf[base + i * stride] = line[(i + half) % n] * (scale * spec.origin_phase(i));
                    }
                } else {
                    for i in 0..n {
                        scratch[(i + half) % n] = buf[base + i * stride] * spec.origin_phase(i);
                    }
                    line.copy_from_slice(&scratch);
                    plan.inverse.process(&mut line);
                    let scale = spec.inverse_scale();
                    for (j, value) in line.iter().enumerate() {
                        buf[base + j * stride] = value * scale;
                    }
                }
            }
        }
    }

    pub fn forward_transform(&self, field: &GridField) -> Result<StateVector> {
        let components = field
            .components
            .iter()
            .map(|c| self.forward(c))
            .collect::<Result<Vec<_>>>()?;
        StateVector::new(components)
    }

    pub fn inverse_transform(&self, state: &StateVector) -> Result<GridField> {
        let components = state
            .components
            .iter()
            .map(|c| self.inverse(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(GridField {
            shape: self.shape().to_vec(),
            components,
        })
    }

    /// Spectral H^2 norm: `sqrt(sum_k sum_xi w (1 + |xi|^4) |u_k(xi)|^2)`.
    pub fn h2_norm(&self, state: &StateVector) -> Result<f64> {
        let lattice = self.lattice();
        let mut total = 0.0;
        for component in &state.components {
            self.check_shape(&component.shape)?;
            for (i, c) in component.coefficients.iter().enumerate() {
                let m2 = lattice.magnitudes[i] * lattice.magnitudes[i];
                total += lattice.weight(i) * (1.0 + m2 * m2) * c.norm_sqr();
            }
        }
        Ok(total.sqrt())
    }

    /// Spectral L^2 norm, equal to the trapezoid L^2 norm on the grid.
    pub fn l2_norm(&self, state: &StateVector) -> Result<f64> {
        let lattice = self.lattice();
        let mut total = 0.0;
        for component in &state.components {
            self.check_shape(&component.shape)?;
            total += component
                .coefficients
                .iter()
                .enumerate()
                .map(|(i, c)| lattice.weight(i) * c.norm_sqr())
                .sum::<f64>();
        }
        Ok(total.sqrt())
    }

    /// Trapezoid L^2 norm of grid samples.
    pub fn grid_l2_norm(&self, field: &GridField) -> f64 {
        let cell = self.cell_volume();
        field
            .components
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v * v * cell)
            .sum::<f64>()
            .sqrt()
    }

    /// Coefficients of `Delta u` (multiplication by `-|xi|^2`).
    pub fn laplacian(&self, field: &SpectralField) -> Result<SpectralField> {
        self.check_shape(&field.shape)?;
        let lattice = self.lattice();
        let coefficients = field
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| c * -(lattice.magnitudes[i] * lattice.magnitudes[i]))
            .collect();
        Ok(SpectralField {
            shape: field.shape.clone(),
            coefficients,
        })
    }

    /// Lattice entries that a component with this regime must leave at zero
    /// on the interval: `+-n_k` for case II, the zero mode for case III.
    pub fn constrained_entries(&self, regime: &RegimeTag) -> Vec<usize> {
        if self.kind() != GeometryKind::Interval {
            return Vec::new();
        }
        let lattice = self.lattice();
        let modes: Vec<i64> = match regime.case {
            RegimeCase::II => {
                let n = regime.resonant_mode.unwrap_or(regime.rate.round() as i64);
                vec![-n, n]
            }
            RegimeCase::III => vec![0],
            _ => Vec::new(),
        };
        let mut entries: Vec<usize> = modes
            .iter()
            .filter_map(|&m| {
                // +N/2 is aliased onto the stored -N/2 entry.
                let n = lattice.shape[0] as i64;
                lattice
                    .index_of_modes(&[m])
                    .or_else(|| (m == n / 2).then(|| lattice.index_of_modes(&[-m])).flatten())
            })
            .collect();
        entries.sort_unstable();
        entries.dedup();
        entries
    }

    /// Zeroes the resonant interval modes of case II and III components.
    pub fn project_constrained(&self, state: &StateVector, regimes: &[RegimeTag]) -> Result<StateVector> {
        if self.kind() != GeometryKind::Interval {
            return Err(Error::InvalidGeometry(
                "mode constraints are only defined on the interval".into(),
            ));
        }
        if regimes.len() != state.len() {
            return Err(Error::InvalidSystem(format!(
                "{} regimes for {} components",
                regimes.len(),
                state.len()
            )));
        }
        let mut out = state.clone();
        for (component, regime) in out.components.iter_mut().zip(regimes) {
            self.check_shape(&component.shape)?;
            for i in self.constrained_entries(regime) {
                component.coefficients[i] = Complex64::new(0.0, 0.0);
            }
        }
        Ok(out)
    }
}

/// Fourier coefficients of one component on a geometry's lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    shape: Vec<usize>,
    pub coefficients: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(geometry: &Geometry) -> Self {
        SpectralField {
            shape: geometry.shape().to_vec(),
            coefficients: vec![Complex64::new(0.0, 0.0); geometry.grid_len()],
        }
    }

    pub fn from_coefficients(geometry: &Geometry, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != geometry.grid_len() {
            return Err(Error::SizeMismatch {
                expected: geometry.grid_len(),
                found: coefficients.len(),
            });
        }
        Ok(SpectralField {
            shape: geometry.shape().to_vec(),
            coefficients,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Largest `|c(-xi) - conj(c(xi))|` over the lattice.
    pub fn symmetry_defect(&self, lattice: &FrequencyLattice) -> f64 {
        (0..self.len())
            .map(|i| {
                let j = lattice.conjugate_index(i);
                (self.coefficients[j] - self.coefficients[i].conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SpectralField {
            shape: self.shape.clone(),
            coefficients: self.coefficients.iter().map(|c| c * factor).collect(),
        }
    }
}

/// Vector of `N_2` spectral components sharing one lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub components: Vec<SpectralField>,
}

impl StateVector {
    pub fn new(components: Vec<SpectralField>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidSystem("state needs at least one component".into()));
        };
        if components.iter().any(|c| c.shape != first.shape) {
            return Err(Error::LatticeMismatch);
        }
        Ok(StateVector { components })
    }

    pub fn zeros(geometry: &Geometry, components: usize) -> Self {
        StateVector {
            components: vec![SpectralField::zeros(geometry); components],
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn sub(&self, other: &StateVector) -> Result<StateVector> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &StateVector) -> Result<StateVector> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scaled(&self, factor: f64) -> StateVector {
        StateVector {
            components: self.components.iter().map(|c| c.scaled(factor)).collect(),
        }
    }

    fn zip_with(&self, other: &StateVector, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<StateVector> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| {
                if a.shape != b.shape {
                    return Err(Error::LatticeMismatch);
                }
                Ok(SpectralField {
                    shape: a.shape.clone(),
                    coefficients: a
                        .coefficients
                        .iter()
                        .zip(&b.coefficients)
                        .map(|(&x, &y)| f(x, y))
                        .collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StateVector { components })
    }
}

/// Real samples on the physical grid, one block per component.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    shape: Vec<usize>,
    pub components: Vec<Vec<f64>>,
}

impl GridField {
    pub fn new(geometry: &Geometry, components: Vec<Vec<f64>>) -> Result<Self> {
        for c in &components {
            if c.len() != geometry.grid_len() {
                return Err(Error::SizeMismatch {
                    expected: geometry.grid_len(),
                    found: c.len(),
                });
            }
        }
        Ok(GridField {
            shape: geometry.shape().to_vec(),
            components,
        })
    }

    /// Samples `f(x)` for each component function.
    pub fn sample<F>(geometry: &Geometry, functions: &[F]) -> Self
    where
        F: Fn(&[f64]) -> f64,
    {
        let points: Vec<Vec<f64>> = (0..geometry.grid_len()).map(|i| geometry.grid_point(i)).collect();
        let components = functions
            .iter()
            .map(|f| points.iter().map(|x| f(x)).collect())
            .collect();
        GridField {
            shape: geometry.shape().to_vec(),
            components,
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}
