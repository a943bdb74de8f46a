//! Spectral fixed-point solver and certifier for nonlocal reaction-diffusion
//! systems driven by the square root of the negative Laplacian.

pub mod cli;
pub mod config;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod io;
pub mod kernel;
pub mod multiplier;
pub mod nonlinearity;
pub mod report;
pub mod solver;
pub mod verify;

pub use config::RunConfig;
pub use error::{Error, ParseError, Result};
pub use expr::{parse_expr, Expr};
pub use geometry::{build_geometry, Geometry, GeometryConfig, GeometryKind, GridField, SpectralField, StateVector};
pub use kernel::{
    check_admissibility, kernel_spectrum, AdmissibilityReport, KernelDefinition, KernelSpec, KernelTransform,
    RegimeCase, RegimeTag, Sign,
};
pub use multiplier::{multiplier_norms, ratio_on_lattice, resonance_ratio, MultiplierReport, ResonanceOptions};
pub use nonlinearity::{eval_nonlinearity, lipschitz_certificate, ComponentNonlinearity, NonlinearitySpec, Saturation};
pub use report::{certify, CertReport};
pub use solver::{
    ContractionCertificate, IterationTrace, Nontriviality, Solution, SolveOptions, System, SystemSpec, Verdict,
};
pub use verify::{brute_force_oracle, residual};
