//! Linear solves, the fixed-point map, contraction certificates and the
//! fixed-point iteration.

use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Geometry, GeometryKind, GridField, SpectralField, StateVector};
use crate::kernel::{KernelSpec, KernelTransform, RegimeTag, Sign};
use crate::multiplier::{multiplier_norms, ratio_on_lattice, ConstantKind, MultiplierReport, ResonanceOptions};
use crate::nonlinearity::NonlinearitySpec;

/// Support threshold for the nontriviality test.
pub const NONTRIVIALITY_THRESHOLD: f64 = 1e-12;

/// Growth of the increment over the first one that counts as divergence.
pub const DIVERGENCE_FACTOR: f64 = 10.0;

/// Components `0..n_plus` carry the plus sign, the rest the minus sign.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub geometry: Geometry,
    pub n_plus: usize,
    pub kernels: Vec<KernelSpec>,
    pub nonlinearity: NonlinearitySpec,
}

impl SystemSpec {
    pub fn components(&self) -> usize {
        self.kernels.len()
    }

    pub fn regimes(&self) -> Vec<RegimeTag> {
        self.kernels.iter().map(|k| k.regime.clone()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.components();
        if self.n_plus < 1 || self.n_plus >= n {
            return Err(Error::InvalidSystem(format!(
                "need 1 <= N1 < N2, got N1 = {} and N2 = {n}",
                self.n_plus
            )));
        }
        if self.nonlinearity.len() != n {
            return Err(Error::InvalidSystem(format!(
                "{} nonlinearity components for {n} kernels",
                self.nonlinearity.len()
            )));
        }
        for (k, kernel) in self.kernels.iter().enumerate() {
            if kernel.component != k {
                return Err(Error::InvalidSystem(format!(
                    "kernel {} is tagged as component {}",
                    k + 1,
                    kernel.component + 1
                )));
            }
            let expected = if k < self.n_plus { Sign::Plus } else { Sign::Minus };
            if kernel.regime.sign() != expected {
                return Err(Error::InvalidSystem(format!(
                    "component {} has regime {} but belongs to the {} block",
                    k + 1,
                    kernel.regime.label(),
                    if expected == Sign::Plus { "plus" } else { "minus" }
                )));
            }
            if kernel.regime.geometry != self.geometry.kind() {
                return Err(Error::InvalidRegime(format!(
                    "component {} regime is for {}, system geometry is {}",
                    k + 1,
                    kernel.regime.geometry,
                    self.geometry.kind()
                )));
            }
        }
        self.nonlinearity.validate_for(&self.geometry)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    pub kind: ConstantKind,
    pub system_constant: f64,
    pub lipschitz: f64,
    /// `sqrt(2) (2pi)^{D/2}`.
    pub prefactor: f64,
    pub q: f64,
    pub certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub override_uncertified: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tolerance: 1e-10,
            max_iterations: 1000,
            override_uncertified: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    /// `||v^(j) - v^(j-1)||_{H^2}` for `j = 1, 2, ..`.
    pub increments: Vec<f64>,
    /// Ratio of successive increments (absent for the first one).
    pub ratios: Vec<Option<f64>>,
    pub wall_time_seconds: f64,
}

impl IterationTrace {
    pub fn iterations(&self) -> usize {
        self.increments.len()
    }

    pub fn max_ratio(&self) -> Option<f64> {
        self.ratios.iter().flatten().copied().reduce(f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    GuaranteedNontrivial,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NontrivialityWitness {
    pub component: usize,
    pub frequency: Vec<f64>,
    pub kernel_magnitude: f64,
    pub forcing_magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nontriviality {
    pub verdict: Verdict,
    pub threshold: f64,
    pub witness: Option<NontrivialityWitness>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub state: StateVector,
    /// `||v - T v||_{H^2}` at the returned state.
    pub residual: f64,
    pub certificate: ContractionCertificate,
    pub trace: IterationTrace,
    pub nontriviality: Nontriviality,
}

/// A validated system with its multipliers precomputed.
#[derive(Clone, Debug)]
pub struct System {
    spec: SystemSpec,
    kernels: Vec<KernelTransform>,
    transfer: Vec<Vec<Complex64>>,
    constrained: Vec<Vec<usize>>,
    forcing: GridField,
    multipliers: MultiplierReport,
}

impl System {
    pub fn new(spec: SystemSpec) -> Result<Self> {
        Self::with_options(spec, &ResonanceOptions::default())
    }

    pub fn with_options(spec: SystemSpec, resonance: &ResonanceOptions) -> Result<Self> {
        spec.validate()?;
        let geometry = &spec.geometry;
        let kernels = spec
            .kernels
            .iter()
            .map(|k| KernelTransform::new(k, geometry))
            .collect::<Result<Vec<_>>>()?;
        let factor = geometry.convolution_factor();
        let transfer = kernels
            .iter()
            .map(|k| {
                Ok(ratio_on_lattice(k, resonance)?
                    .into_iter()
                    .map(|r| r * factor)
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        let constrained = spec
            .kernels
            .iter()
            .map(|k| geometry.constrained_entries(&k.regime))
            .collect();
        let forcing = spec.nonlinearity.forcing_samples(geometry)?;
        let multipliers = multiplier_norms(&kernels, resonance)?;
        Ok(System {
            spec,
            kernels,
            transfer,
            constrained,
            forcing,
            multipliers,
        })
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn geometry(&self) -> &Geometry {
        &self.spec.geometry
    }

    pub fn components(&self) -> usize {
        self.spec.components()
    }

    pub fn kernels(&self) -> &[KernelTransform] {
        &self.kernels
    }

    pub fn multipliers(&self) -> &MultiplierReport {
        &self.multipliers
    }

    /// `C_geo * G^/D` for one component on the lattice.
    pub fn transfer(&self, component: usize) -> &[Complex64] {
        &self.transfer[component]
    }

    /// Lattice entries held at zero for one component.
    pub fn constrained_entries(&self, component: usize) -> &[usize] {
        &self.constrained[component]
    }

    /// `u_k = C_geo G_k^ f_k^ / D_k` with constrained modes set to zero.
    pub fn linear_solve(&self, rhs: &StateVector) -> Result<StateVector> {
        if rhs.len() != self.components() {
            return Err(Error::SizeMismatch {
                expected: self.components(),
                found: rhs.len(),
            });
        }
        let geometry = self.geometry();
        let components = rhs
            .components
            .iter()
            .enumerate()
            .map(|(k, f)| {
                if f.shape() != geometry.shape() {
                    return Err(Error::LatticeMismatch);
                }
                let mut coefficients: Vec<Complex64> = f
                    .coefficients
                    .iter()
                    .zip(&self.transfer[k])
                    .map(|(c, t)| c * t)
                    .collect();
                for &i in &self.constrained[k] {
                    coefficients[i] = Complex64::new(0.0, 0.0);
                }
                SpectralField::from_coefficients(geometry, coefficients)
            })
            .collect::<Result<Vec<_>>>()?;
        StateVector::new(components)
    }

    /// `F_k(v(x), x)` on the grid.
    pub fn nonlinearity_on_grid(&self, v: &StateVector) -> Result<GridField> {
        let grid = self.geometry().inverse_transform(v)?;
        self.spec.nonlinearity.eval_with_forcing(&grid, &self.forcing)
    }

    /// The fixed-point map `v -> u`.
    pub fn apply_map(&self, v: &StateVector) -> Result<StateVector> {
        Ok(self.apply_map_with_rhs(v)?.0)
    }

    /// The map together with the grid values of the right-hand side.
    pub fn apply_map_with_rhs(&self, v: &StateVector) -> Result<(StateVector, GridField)> {
        if v.len() != self.components() {
            return Err(Error::SizeMismatch {
                expected: self.components(),
                found: v.len(),
            });
        }
        let f = self.nonlinearity_on_grid(v)?;
        let rhs = self.geometry().forward_transform(&f)?;
        Ok((self.linear_solve(&rhs)?, f))
    }

    pub fn certificate(&self) -> ContractionCertificate {
        let prefactor = std::f64::consts::SQRT_2 * self.geometry().convolution_factor();
        let lipschitz = self.spec.nonlinearity.lipschitz_constant();
        let system_constant = self.multipliers.system_constant;
        let q = prefactor * system_constant * lipschitz;
        ContractionCertificate {
            kind: self.multipliers.kind,
            system_constant,
            lipschitz,
            prefactor,
            q,
            certified: q < 1.0,
        }
    }

    /// Constant `c` in `||T v||^2_{H^2} <= c sum_k ||F_k||^2_{L^2}`.
    pub fn norm_bound_constant(&self) -> f64 {
        let c = self.geometry().convolution_factor() * self.multipliers.system_constant;
        2.0 * c * c
    }

    pub fn check_nontriviality(&self) -> Result<Nontriviality> {
        self.check_nontriviality_with(NONTRIVIALITY_THRESHOLD)
    }

    /// Looks for a lattice frequency where both `G_k^` and the transform of
    /// `F_k(0, x)` exceed the threshold (and the mode is not constrained).
    pub fn check_nontriviality_with(&self, threshold: f64) -> Result<Nontriviality> {
        let geometry = self.geometry();
        let zero = StateVector::zeros(geometry, self.components());
        let f0 = geometry.forward_transform(&self.nonlinearity_on_grid(&zero)?)?;
        let lattice = geometry.lattice();
        for (k, kernel) in self.kernels.iter().enumerate() {
            let g = &kernel.spectrum().coefficients;
            let f = &f0.components[k].coefficients;
            for i in 0..lattice.len() {
                if self.constrained[k].contains(&i) || self.transfer[k][i] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                if g[i].norm() > threshold && f[i].norm() > threshold {
                    return Ok(Nontriviality {
                        verdict: Verdict::GuaranteedNontrivial,
                        threshold,
                        witness: Some(NontrivialityWitness {
                            component: k,
                            frequency: lattice.frequency(i),
                            kernel_magnitude: g[i].norm(),
                            forcing_magnitude: f[i].norm(),
                        }),
                    });
                }
            }
        }
        Ok(Nontriviality {
            verdict: Verdict::Inconclusive,
            threshold,
            witness: None,
        })
    }

    /// `||v - T v||_{H^2}`.
    pub fn fixed_point_residual(&self, v: &StateVector) -> Result<f64> {
        self.geometry().h2_norm(&v.sub(&self.apply_map(v)?)?)
    }

    /// Iterates the map from `init` (zero when absent).
    pub fn solve_fixed_point(&self, init: Option<&StateVector>, options: &SolveOptions) -> Result<Solution> {
        self.solve_fixed_point_observed(init, options, |_, _| {})
    }

    /// As [`System::solve_fixed_point`], calling `observer(j, v^(j))` after every step.
    pub fn solve_fixed_point_observed(
        &self,
        init: Option<&StateVector>,
        options: &SolveOptions,
        mut observer: impl FnMut(usize, &StateVector),
    ) -> Result<Solution> {
        if options.tolerance.is_nan() || options.tolerance <= 0.0 {
            return Err(Error::InvalidTolerance(options.tolerance));
        }
        if options.max_iterations == 0 {
            return Err(Error::Config("max_iter must be positive".into()));
        }
        let certificate = self.certificate();
        if !certificate.certified && !options.override_uncertified {
            return Err(Error::Uncertified { q: certificate.q });
        }
        let geometry = self.geometry();
        let start = Instant::now();
        let mut v = match init {
            Some(v) => v.clone(),
            None => StateVector::zeros(geometry, self.components()),
        };
        let mut trace = IterationTrace::default();
        let mut converged = false;
        for j in 1..=options.max_iterations {
            let next = self.apply_map(&v)?;
            let increment = geometry.h2_norm(&next.sub(&v)?)?;
            let ratio = trace
                .increments
                .last()
                .and_then(|&prev| (prev > 0.0).then(|| increment / prev));
            trace.increments.push(increment);
            trace.ratios.push(ratio);
            observer(j, &next);
            v = next;
            if increment <= options.tolerance {
                converged = true;
                break;
            }
            if !increment.is_finite() || increment > DIVERGENCE_FACTOR * trace.increments[0] {
                return Err(Error::Divergence {
                    iteration: j,
                    increment,
                });
            }
        }
        trace.wall_time_seconds = start.elapsed().as_secs_f64();
        if !converged {
            return Err(Error::MaxIterations {
                iterations: options.max_iterations,
                increment: trace.increments.last().copied().unwrap_or(f64::NAN),
            });
        }
        Ok(Solution {
            residual: self.fixed_point_residual(&v)?,
            state: v,
            certificate,
            trace,
            nontriviality: self.check_nontriviality()?,
        })
    }

    /// Random real state with spectrum damped by `1/(1 + |xi|^2)`.
    pub fn random_state(&self, rng: &mut StdRng, amplitude: f64) -> Result<StateVector> {
        random_state(self.geometry(), self.components(), rng, amplitude)
    }

    /// Largest `||T v1 - T v2|| / ||v1 - v2||` over random pairs.
    pub fn contraction_probe(&self, pairs: usize, seed: u64) -> Result<f64> {
        let mut rng = StdRng::seed_from_u64(seed);
        let geometry = self.geometry();
        let mut worst = 0.0f64;
        for _ in 0..pairs {
            let amplitude = rng.gen_range(0.1..10.0);
            let v1 = self.random_state(&mut rng, amplitude)?;
            let v2 = self.random_state(&mut rng, amplitude)?;
            let den = geometry.h2_norm(&v1.sub(&v2)?)?;
            let num = geometry.h2_norm(&self.apply_map(&v1)?.sub(&self.apply_map(&v2)?)?)?;
            if den > 0.0 {
                worst = worst.max(num / den);
            }
        }
        Ok(worst)
    }

    /// Largest `||T v||^2 / (c sum_k ||F_k||^2)` over random states.
    pub fn norm_bound_probe(&self, states: usize, seed: u64) -> Result<f64> {
        let mut rng = StdRng::seed_from_u64(seed);
        let geometry = self.geometry();
        let c = self.norm_bound_constant();
        let mut worst = 0.0f64;
        for _ in 0..states {
            let amplitude = rng.gen_range(0.1..10.0);
            let v = self.random_state(&mut rng, amplitude)?;
            let (u, f) = self.apply_map_with_rhs(&v)?;
            let lhs = geometry.h2_norm(&u)?.powi(2);
            let rhs = c * geometry.grid_l2_norm(&f).powi(2);
            if rhs > 0.0 {
                worst = worst.max(lhs / rhs);
            } else if lhs > 0.0 {
                worst = f64::INFINITY;
            }
        }
        Ok(worst)
    }
}

/// Random real state: uniform grid noise in `[-amplitude, amplitude]`
/// with its spectrum damped by `1/(1 + |xi|^2)`.
pub fn random_state(geometry: &Geometry, components: usize, rng: &mut StdRng, amplitude: f64) -> Result<StateVector> {
    let lattice = geometry.lattice();
    let fields = (0..components)
        .map(|_| {
            let samples: Vec<f64> = (0..geometry.grid_len())
                .map(|_| rng.gen_range(-amplitude..=amplitude))
                .collect();
            let mut field = geometry.forward(&samples)?;
            for (c, m) in field.coefficients.iter_mut().zip(lattice.magnitudes()) {
                *c /= 1.0 + m * m;
            }
            Ok(field)
        })
        .collect::<Result<Vec<_>>>()?;
    StateVector::new(fields)
}

impl GeometryKind {
    /// `sqrt(2) (2pi)^{D/2}` for this geometry in `dim` transverse dimensions.
    pub fn contraction_prefactor(self, dim: usize) -> f64 {
        let axes = match self {
            GeometryKind::Interval => 1,
            GeometryKind::WholeSpace => dim,
            GeometryKind::Layer => dim + 1,
        };
        std::f64::consts::SQRT_2 * (2.0 * std::f64::consts::PI).powf(axes as f64 / 2.0)
    }
}
