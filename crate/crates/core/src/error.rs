use std::fmt;

use thiserror::Error;

/// Location-tagged syntax error from the expression parser.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the source text.
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at position {}", self.message, self.position)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("size mismatch: expected {expected} samples, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("field lattice does not match the geometry lattice")]
    LatticeMismatch,

    #[error("inverse transform left an imaginary residue of {max_imag:e} (conjugate symmetry broken)")]
    ImaginaryResidue { max_imag: f64 },

    #[error("syntax error: {0}")]
    Parse(#[from] ParseError),

    #[error("expression domain error: {0}")]
    Domain(String),

    #[error("kernel spectrum violates conjugate symmetry at lattice entry {index} (defect {defect:e})")]
    SymmetryViolation { index: usize, defect: f64 },

    #[error("periodic kernel or forcing mismatch between x1 = 0 and x1 = 2pi (defect {defect:e})")]
    Periodicity { defect: f64 },

    #[error("kernel transform exceeds its L1 bound: sup |G^| = {sup:e} > {bound:e}")]
    BoundViolation { sup: f64, bound: f64 },

    #[error("invalid regime: {0}")]
    InvalidRegime(String),

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("multiplier blow-up in component {component} at frequency {frequency:?}: kernel value {defect:e} on the resonant set")]
    BlowUp {
        component: usize,
        frequency: Vec<f64>,
        defect: f64,
    },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("contraction factor q = {q} is not below 1; refusing to iterate without override")]
    Uncertified { q: f64 },

    #[error("no convergence after {iterations} iterations (last increment {increment:e})")]
    MaxIterations { iterations: usize, increment: f64 },

    #[error("iteration diverged at step {iteration} (increment {increment:e})")]
    Divergence { iteration: usize, increment: f64 },

    #[error("dense oracle supports at most {max} modes, got {modes}")]
    OracleTooLarge { modes: usize, max: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
