//! Certification reports.

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::Result;
use crate::geometry::GeometryConfig;
use crate::kernel::{AdmissibilityReport, KernelTransform};
use crate::multiplier::{ConstantKind, MultiplierReport};
use crate::nonlinearity::{lipschitz_certificate, LipschitzCertificate};
use crate::solver::{Nontriviality, Solution, System};
use crate::verify::residual;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub admissibility: f64,
    pub resonance_epsilon_scale: f64,
    pub radial_step: Option<f64>,
    pub nontriviality_threshold: f64,
    pub lipschitz_samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateSection {
    pub kind: ConstantKind,
    pub system_constant: f64,
    pub lipschitz: f64,
    pub prefactor: f64,
    pub q: f64,
    pub certified: bool,
    pub lipschitz_check: LipschitzCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub converged: bool,
    pub iterations: usize,
    pub tolerance: f64,
    pub final_increment: f64,
    pub max_ratio: Option<f64>,
    pub fixed_point_residual: f64,
    pub residual: f64,
    pub h2_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub tool: String,
    pub version: String,
    pub geometry: GeometryConfig,
    pub tolerances: Tolerances,
    pub admissibility: Vec<AdmissibilityReport>,
    pub multipliers: MultiplierReport,
    pub certificate: CertificateSection,
    pub nontriviality: Nontriviality,
    pub solution: Option<SolutionSummary>,
    /// All kernels admissible, every multiplier finite and `q < 1`.
    pub passed: bool,
}

impl CertReport {
    pub fn admissible(&self) -> bool {
        self.admissibility.iter().all(|a| a.passed) && self.multipliers.components.iter().all(|c| c.finite)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A certified (or rejected) system ready for solving.
#[derive(Debug)]
pub struct Certification {
    pub system: System,
    pub report: CertReport,
}

/// Admissibility, multipliers, contraction and nontriviality for a configuration.
pub fn certify(config: &RunConfig) -> Result<Certification> {
    let spec = config.build_system_spec()?;
    let cert = &config.certification;
    let admissibility = spec
        .kernels
        .iter()
        .map(|k| KernelTransform::new(k, &spec.geometry)?.admissibility(cert.admissibility_tolerance))
        .collect::<Result<Vec<_>>>()?;
    let admissible = admissibility.iter().all(|a| a.passed);
    let lipschitz_check = lipschitz_certificate(
        &spec.nonlinearity,
        &spec.geometry,
        cert.lipschitz_samples,
        config.solver.seed,
    )?;
    let system = System::with_options(spec, &config.resonance(!admissible))?;
    let contraction = system.certificate();
    let nontriviality = system.check_nontriviality_with(cert.nontriviality_threshold)?;
    let multipliers = system.multipliers().clone();
    let mut report = CertReport {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        geometry: config.geometry.clone(),
        tolerances: Tolerances {
            admissibility: cert.admissibility_tolerance,
            resonance_epsilon_scale: cert.resonance.epsilon_scale,
            radial_step: cert.resonance.radial_step,
            nontriviality_threshold: cert.nontriviality_threshold,
            lipschitz_samples: cert.lipschitz_samples,
            seed: config.solver.seed,
        },
        admissibility,
        multipliers,
        certificate: CertificateSection {
            kind: contraction.kind,
            system_constant: contraction.system_constant,
            lipschitz: contraction.lipschitz,
            prefactor: contraction.prefactor,
            q: contraction.q,
            certified: contraction.certified,
            lipschitz_check,
        },
        nontriviality,
        solution: None,
        passed: false,
    };
    report.passed = report.admissible() && report.certificate.certified && report.certificate.lipschitz_check.passed;
    Ok(Certification { system, report })
}

/// Summary of a finished solve.
pub fn summarize(system: &System, solution: &Solution, tolerance: f64) -> Result<SolutionSummary> {
    Ok(SolutionSummary {
        converged: solution.trace.increments.last().is_some_and(|&inc| inc <= tolerance),
        iterations: solution.trace.iterations(),
        tolerance,
        final_increment: solution.trace.increments.last().copied().unwrap_or(f64::NAN),
        max_ratio: solution.trace.max_ratio(),
        fixed_point_residual: solution.residual,
        residual: residual(system, &solution.state)?,
        h2_norm: system.geometry().h2_norm(&solution.state)?,
    })
}
