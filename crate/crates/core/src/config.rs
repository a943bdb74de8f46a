//! JSON run configuration.
//!
//! ```json
//! {
//!   "geometry": { "kind": "interval", "mode_cutoff": 64 },
//!   "system": {
//!     "plus_components": 1,
//!     "components": [
//!       { "regime": { "case": "III" },
//!         "kernel": { "physical": "cos(2*x)" },
//!         "nonlinearity": { "saturation": "tanh", "epsilon": 0.05,
//!                           "coupling": [0, 1], "forcing": "cos(2*x)" } },
//!       { "regime": { "case": "IV", "rate": 1 },
//!         "kernel": { "spectral": "exp(-n^2)" },
//!         "nonlinearity": { "forcing": "1" } }
//!     ]
//!   },
//!   "solver": { "tol": 1e-10, "max_iter": 500 }
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::parse_expr;
use crate::geometry::{Geometry, GeometryConfig};
use crate::kernel::{KernelDefinition, KernelSpec, RegimeCase, RegimeTag, TableEntry, DEFAULT_ADMISSIBILITY_TOLERANCE};
use crate::multiplier::ResonanceOptions;
use crate::nonlinearity::{ComponentNonlinearity, NonlinearitySpec, Saturation};
use crate::solver::{SolveOptions, SystemSpec, NONTRIVIALITY_THRESHOLD};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub system: SystemConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub certification: CertificationConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// `N_1`: components `1..=N_1` carry the plus sign.
    pub plus_components: usize,
    pub components: Vec<ComponentConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub regime: RegimeConfig,
    pub kernel: KernelConfig,
    #[serde(default)]
    pub nonlinearity: NonlinearityConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeConfig {
    pub case: RegimeCase,
    #[serde(default)]
    pub rate: f64,
    #[serde(default)]
    pub resonant_mode: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    /// `G(x)` in the physical variables `x`, `x1`, `x2`, `x3`.
    Physical(String),
    /// `G^(xi)` in the frequency variables (`n`, `p`, `p1`.., `r`).
    Spectral(String),
    /// `G^` on lattice modes; missing modes are zero.
    Table(Vec<TableEntry>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonlinearityConfig {
    pub saturation: Saturation,
    pub epsilon: f64,
    /// Defaults to zero coupling.
    pub coupling: Option<Vec<f64>>,
    pub forcing: String,
}

impl Default for NonlinearityConfig {
    fn default() -> Self {
        NonlinearityConfig {
            saturation: Saturation::Tanh,
            epsilon: 0.0,
            coupling: None,
            forcing: "0".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    Zero,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub init: InitMode,
    /// Amplitude of the random initial state.
    pub init_amplitude: f64,
    pub override_uncertified: bool,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let defaults = SolveOptions::default();
        SolverConfig {
            tol: defaults.tolerance,
            max_iter: defaults.max_iterations,
            init: InitMode::Zero,
            init_amplitude: 1.0,
            override_uncertified: false,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolveOptions {
        SolveOptions {
            tolerance: self.tol,
            max_iterations: self.max_iter,
            override_uncertified: self.override_uncertified,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertificationConfig {
    pub admissibility_tolerance: f64,
    pub resonance: ResonanceOptions,
    pub nontriviality_threshold: f64,
    pub lipschitz_samples: usize,
}

impl Default for CertificationConfig {
    fn default() -> Self {
        CertificationConfig {
            admissibility_tolerance: DEFAULT_ADMISSIBILITY_TOLERANCE,
            resonance: ResonanceOptions::default(),
            nontriviality_threshold: NONTRIVIALITY_THRESHOLD,
            lipschitz_samples: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub solution: String,
    pub spectrum: String,
    pub trace: String,
    pub report: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: None,
            solution: "solution.csv".into(),
            spectrum: "spectrum.csv".into(),
            trace: "trace.csv".into(),
            report: "report.json".into(),
        }
    }
}

fn context(what: String) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::Parse(p) => Error::Config(format!("{what}: syntax error: {p}")),
        Error::InvalidRegime(m) => Error::InvalidRegime(format!("{what}: {m}")),
        other => other,
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn build_geometry(&self) -> Result<Geometry> {
        Geometry::new(self.geometry.clone())
    }

    pub fn build_system_spec(&self) -> Result<SystemSpec> {
        let geometry = self.build_geometry()?;
        let kind = geometry.kind();
        let n = self.system.components.len();
        let mut kernels = Vec::with_capacity(n);
        let mut nonlinearity = Vec::with_capacity(n);
        for (k, c) in self.system.components.iter().enumerate() {
            let label = format!("component {}", k + 1);
            let regime = RegimeTag::new(kind, c.regime.case, c.regime.rate, c.regime.resonant_mode)
                .map_err(context(format!("{label} regime")))?;
            let definition = match &c.kernel {
                KernelConfig::Physical(src) => KernelDefinition::physical(src),
                KernelConfig::Spectral(src) => KernelDefinition::spectral(src, kind, geometry.transverse_dim()),
                KernelConfig::Table(entries) => Ok(KernelDefinition::SpectralTable(entries.clone())),
            }
            .map_err(context(format!("{label} kernel")))?;
            kernels.push(KernelSpec {
                component: k,
                definition,
                regime,
            });
            let nl = &c.nonlinearity;
            nonlinearity.push(ComponentNonlinearity {
                saturation: nl.saturation,
                epsilon: nl.epsilon,
                coupling: nl.coupling.clone().unwrap_or_else(|| vec![0.0; n]),
                forcing: parse_expr(&nl.forcing).map_err(context(format!("{label} forcing")))?,
            });
        }
        let spec = SystemSpec {
            geometry,
            n_plus: self.system.plus_components,
            kernels,
            nonlinearity: NonlinearitySpec::new(nonlinearity)?,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Resonance options, with blow-ups flagged rather than raised when
    /// `flag_blow_up` is set.
    pub fn resonance(&self, flag_blow_up: bool) -> ResonanceOptions {
        ResonanceOptions {
            allow_blow_up: self.certification.resonance.allow_blow_up || flag_blow_up,
            ..self.certification.resonance
        }
    }
}
