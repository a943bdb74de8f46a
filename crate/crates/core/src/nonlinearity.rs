//! Catalog nonlinearities `F_k(u, x) = eps_k * sigma(<c_k, u>) + g_k(x)`.

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{Geometry, GeometryKind, GridField};

/// Periodicity tolerance for forcings on periodic axes.
pub const FORCING_PERIODICITY_TOLERANCE: f64 = 1e-8;

/// Radius of the coordinate box used for random states in the sampled checks.
pub const SAMPLING_RADIUS: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Saturation {
    Tanh,
    Sin,
}

impl Saturation {
    pub fn apply(self, s: f64) -> f64 {
        match self {
            Saturation::Tanh => s.tanh(),
            Saturation::Sin => s.sin(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentNonlinearity {
    pub saturation: Saturation,
    pub epsilon: f64,
    pub coupling: Vec<f64>,
    pub forcing: Expr,
}

impl ComponentNonlinearity {
    /// `F_k = g_k(x)`.
    pub fn pure_forcing(forcing: Expr, components: usize) -> Self {
        ComponentNonlinearity {
            saturation: Saturation::Tanh,
            epsilon: 0.0,
            coupling: vec![0.0; components],
            forcing,
        }
    }

    fn saturated(&self, u: &[f64]) -> f64 {
        if self.epsilon == 0.0 {
            return 0.0;
        }
        let s: f64 = self.coupling.iter().zip(u).map(|(c, v)| c * v).sum();
        self.epsilon * self.saturation.apply(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonlinearitySpec {
    components: Vec<ComponentNonlinearity>,
}

impl NonlinearitySpec {
    pub fn new(components: Vec<ComponentNonlinearity>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::InvalidSystem("nonlinearity has no components".into()));
        }
        for (k, c) in components.iter().enumerate() {
            if c.coupling.len() != n {
                return Err(Error::InvalidSystem(format!(
                    "coupling of component {} has {} entries, expected {n}",
                    k + 1,
                    c.coupling.len()
                )));
            }
            if !c.epsilon.is_finite() || c.coupling.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidSystem(format!(
                    "non-finite coefficient in component {}",
                    k + 1
                )));
            }
        }
        Ok(NonlinearitySpec { components })
    }

    pub fn pure_forcing(forcings: Vec<Expr>) -> Result<Self> {
        let n = forcings.len();
        Self::new(
            forcings
                .into_iter()
                .map(|g| ComponentNonlinearity::pure_forcing(g, n))
                .collect(),
        )
    }

    pub fn components(&self) -> &[ComponentNonlinearity] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `|| diag(eps) C ||_2`, the Lipschitz constant of `u -> (eps_k sigma(<c_k, u>))_k`.
    pub fn lipschitz_constant(&self) -> f64 {
        let n = self.len();
        let m = DMatrix::from_fn(n, n, |k, j| self.components[k].epsilon * self.components[k].coupling[j]);
        m.singular_values().max()
    }

    /// Growth constant `K` with `|F(u, x)| <= K |u| + h(x)`.
    pub fn growth_constant(&self) -> f64 {
        self.lipschitz_constant()
    }

    /// `h(x) = |(|g_k(x)| + |eps_k|)_k|`.
    pub fn envelope(&self, x: &[f64]) -> Result<f64> {
        let mut sum = 0.0;
        for c in &self.components {
            let h = c.forcing.eval(x)?.abs() + c.epsilon.abs();
            sum += h * h;
        }
        Ok(sum.sqrt())
    }

    /// `F(u, x)` at one point.
    pub fn eval_point(&self, u: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        self.components
            .iter()
            .map(|c| Ok(c.saturated(u) + c.forcing.eval(x)?))
            .collect()
    }

    /// Checks expression arity and, on periodic axes, `g_k(0, ..) = g_k(2pi, ..)`.
    pub fn validate_for(&self, geometry: &Geometry) -> Result<()> {
        let dim = geometry.total_dim();
        for (k, c) in self.components.iter().enumerate() {
            if c.forcing.arity() > dim {
                return Err(Error::InvalidSystem(format!(
                    "forcing of component {} uses x{} on a {dim}-dimensional geometry",
                    k + 1,
                    c.forcing.arity()
                )));
            }
        }
        if geometry.kind() == GeometryKind::WholeSpace {
            return Ok(());
        }
        let transverse: Vec<Vec<f64>> = if geometry.kind() == GeometryKind::Interval {
            vec![Vec::new()]
        } else {
            let axes = &geometry.axes()[1..];
            let count: usize = axes.iter().map(|a| a.points()).product();
            (0..count)
                .map(|mut i| {
                    let mut p = vec![0.0; axes.len()];
                    for (s, axis) in axes.iter().enumerate().rev() {
                        p[s] = axis.coordinate(i % axis.points());
                        i /= axis.points();
                    }
                    p
                })
                .collect()
        };
        for c in &self.components {
            for rest in &transverse {
                let mut left = vec![0.0];
                left.extend_from_slice(rest);
                let mut right = vec![2.0 * std::f64::consts::PI];
                right.extend_from_slice(rest);
                let (l, r) = (c.forcing.eval(&left)?, c.forcing.eval(&right)?);
                let defect = (l - r).abs();
                if defect > FORCING_PERIODICITY_TOLERANCE * l.abs().max(r.abs()).max(1.0) {
                    return Err(Error::Periodicity { defect });
                }
            }
        }
        Ok(())
    }

    /// Forcing samples `g_k(x_j)` on the grid.
    pub fn forcing_samples(&self, geometry: &Geometry) -> Result<GridField> {
        let points: Vec<Vec<f64>> = (0..geometry.grid_len()).map(|j| geometry.grid_point(j)).collect();
        let components = self
            .components
            .iter()
            .map(|c| points.iter().map(|x| c.forcing.eval(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        GridField::new(geometry, components)
    }

    /// `F_k(v(x_j), x_j)` given precomputed forcing samples.
    pub fn eval_with_forcing(&self, state: &GridField, forcing: &GridField) -> Result<GridField> {
        if state.components.len() != self.len() || forcing.components.len() != self.len() {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                found: state.components.len(),
            });
        }
        if state.shape() != forcing.shape() {
            return Err(Error::LatticeMismatch);
        }
        let points = forcing.components.first().map_or(0, Vec::len);
        let mut u = vec![0.0; self.len()];
        let mut out = forcing.clone();
        for j in 0..points {
            for (slot, comp) in u.iter_mut().zip(&state.components) {
                *slot = comp[j];
            }
            for (k, c) in self.components.iter().enumerate() {
                out.components[k][j] += c.saturated(&u);
            }
        }
        Ok(out)
    }
}

/// `F_k(v(x), x)` on every grid point.
pub fn eval_nonlinearity(spec: &NonlinearitySpec, state: &GridField, geometry: &Geometry) -> Result<GridField> {
    let forcing = spec.forcing_samples(geometry)?;
    spec.eval_with_forcing(state, &forcing)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzCertificate {
    pub analytic: f64,
    pub empirical: f64,
    pub samples: usize,
    pub passed: bool,
}

fn random_point(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.gen_range(-SAMPLING_RADIUS..=SAMPLING_RADIUS))
        .collect()
}

/// Analytic Lipschitz constant and the largest sampled difference quotient.
pub fn lipschitz_certificate(
    spec: &NonlinearitySpec,
    geometry: &Geometry,
    samples: usize,
    seed: u64,
) -> Result<LipschitzCertificate> {
    let analytic = spec.lipschitz_constant();
    let mut rng = StdRng::seed_from_u64(seed);
    let n = spec.len();
    let mut empirical = 0.0f64;
    for _ in 0..samples {
        let u1 = random_point(&mut rng, n);
        let u2 = random_point(&mut rng, n);
        let x = geometry.grid_point(rng.gen_range(0..geometry.grid_len()));
        let f1 = spec.eval_point(&u1, &x)?;
        let f2 = spec.eval_point(&u2, &x)?;
        let num = f1.iter().zip(&f2).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let den = u1.iter().zip(&u2).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if den > 0.0 {
            empirical = empirical.max(num / den);
        }
    }
    Ok(LipschitzCertificate {
        analytic,
        empirical,
        samples,
        passed: empirical <= analytic + 1e-9,
    })
}

/// Largest sampled `|F(u, x)| - (K |u| + h(x))`; nonpositive when the growth bound holds.
pub fn growth_bound_excess(spec: &NonlinearitySpec, geometry: &Geometry, samples: usize, seed: u64) -> Result<f64> {
    let k = spec.growth_constant();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let u = random_point(&mut rng, spec.len());
        let x = geometry.grid_point(rng.gen_range(0..geometry.grid_len()));
        let f = spec.eval_point(&u, &x)?;
        let lhs = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        let norm_u = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        worst = worst.max(lhs - (k * norm_u + spec.envelope(&x)?));
    }
    Ok(worst)
}
