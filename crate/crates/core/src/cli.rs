//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for configuration or parse errors, 2 when
//! admissibility, contraction or convergence fails.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;

use crate::config::{InitMode, RunConfig};
use crate::error::{Error, Result};
use crate::geometry::{Geometry, StateVector};
use crate::io::{read_grid_csv, read_spectral_csv, write_grid_csv, write_spectral_csv, write_trace_csv};
use crate::multiplier::MultiplierReport;
use crate::report::{certify, summarize};
use crate::solver::System;
use crate::verify::residual;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "nonlocal-fixpoint",
    version,
    about = "Certify and solve nonlocal reaction-diffusion systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check admissibility and contraction; print the certification report.
    Check(CommonArgs),
    /// Iterate to the fixed point and write solution, spectrum, trace and report.
    Solve(CommonArgs),
    /// Print the multiplier report.
    Norms(CommonArgs),
    /// Re-verify a stored solution (grid or spectral CSV).
    Residual {
        #[command(flatten)]
        common: CommonArgs,
        solution: PathBuf,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON run configuration.
    config: PathBuf,
    /// Stopping tolerance on the H^2 increment.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// Seed for random initial states and sampled checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Iterate even when the contraction factor is not below 1.
    #[arg(long = "override-uncertified")]
    override_uncertified: bool,
}

impl CommonArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut config = RunConfig::from_path(&self.config)?;
        if let Some(tol) = self.tol {
            if tol.is_nan() || tol <= 0.0 {
                return Err(Error::InvalidTolerance(tol));
            }
            config.solver.tol = tol;
        }
        if let Some(m) = self.max_iter {
            config.solver.max_iter = m;
        }
        if let Some(seed) = self.seed {
            config.solver.seed = seed;
        }
        if let Some(out) = &self.out {
            config.output.dir = Some(out.clone());
        }
        config.solver.override_uncertified |= self.override_uncertified;
        Ok(config)
    }
}

/// Exit code for an error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::BlowUp { .. }
        | Error::Uncertified { .. }
        | Error::Periodicity { .. }
        | Error::SymmetryViolation { .. }
        | Error::BoundViolation { .. }
        | Error::MaxIterations { .. }
        | Error::Divergence { .. } => EXIT_FAILED,
        _ => EXIT_CONFIG,
    }
}

/// Runs the command line with the process streams.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the command line writing reports to `out` and diagnostics to `err`.
pub fn run_cli_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_CONFIG;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = match &cli.command {
        Command::Check(args) => check(args, out),
        Command::Solve(args) => solve(args, out, err),
        Command::Norms(args) => norms(args, out),
        Command::Residual { common, solution } => verify_solution(common, solution, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn write_file(dir: &Path, name: &str, write: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path)?);
    write(&mut w)?;
    w.flush()?;
    Ok(path)
}

fn check(args: &CommonArgs, out: &mut dyn Write) -> Result<i32> {
    let config = args.load()?;
    let certification = certify(&config)?;
    let json = certification.report.to_json();
    writeln!(out, "{json}")?;
    if let Some(dir) = &config.output.dir {
        write_file(dir, &config.output.report, |w| Ok(writeln!(w, "{json}")?))?;
    }
    Ok(if certification.report.passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn initial_state(config: &RunConfig, system: &System) -> Result<Option<StateVector>> {
    match config.solver.init {
        InitMode::Zero => Ok(None),
        InitMode::Random => {
            let mut rng = StdRng::seed_from_u64(config.solver.seed);
            Ok(Some(system.random_state(&mut rng, config.solver.init_amplitude)?))
        }
    }
}

fn solve(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let config = args.load()?;
    let dir = config.output.dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut certification = certify(&config)?;
    let report = &mut certification.report;
    let runnable = report.admissible() && (report.certificate.certified || config.solver.override_uncertified);
    if !runnable {
        let json = report.to_json();
        writeln!(out, "{json}")?;
        write_file(&dir, &config.output.report, |w| Ok(writeln!(w, "{json}")?))?;
        if !report.admissible() {
            writeln!(err, "error: kernel admissibility failed; see the report")?;
        } else {
            writeln!(
                err,
                "error: contraction factor q = {} is not below 1; pass --override-uncertified to iterate anyway",
                report.certificate.q
            )?;
        }
        return Ok(EXIT_FAILED);
    }
    let system = &certification.system;
    let init = initial_state(&config, system)?;
    let options = config.solver.options();
    let solution = system.solve_fixed_point(init.as_ref(), &options)?;
    report.solution = Some(summarize(system, &solution, options.tolerance)?);
    let geometry = system.geometry();
    let grid = geometry.inverse_transform(&solution.state)?;
    write_file(&dir, &config.output.solution, |w| write_grid_csv(geometry, &grid, w))?;
    write_file(&dir, &config.output.spectrum, |w| {
        write_spectral_csv(geometry, &solution.state, w)
    })?;
    write_file(&dir, &config.output.trace, |w| write_trace_csv(&solution.trace, w))?;
    let json = report.to_json();
    write_file(&dir, &config.output.report, |w| Ok(writeln!(w, "{json}")?))?;
    writeln!(out, "{json}")?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct NormsOutput<'a> {
    multipliers: &'a MultiplierReport,
}

fn norms(args: &CommonArgs, out: &mut dyn Write) -> Result<i32> {
    let config = args.load()?;
    let spec = config.build_system_spec()?;
    let system = System::with_options(spec, &config.resonance(true))?;
    let report = system.multipliers();
    let json = serde_json::to_string_pretty(&NormsOutput { multipliers: report })?;
    writeln!(out, "{json}")?;
    if let Some(dir) = &config.output.dir {
        write_file(dir, "multipliers.json", |w| Ok(writeln!(w, "{json}")?))?;
    }
    Ok(if report.components.iter().all(|c| c.finite) {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

/// Loads a grid or spectral CSV, telling them apart by the header.
pub fn load_solution(geometry: &Geometry, path: &Path) -> Result<StateVector> {
    let mut text = String::new();
    BufReader::new(File::open(path)?).read_to_string(&mut text)?;
    if text.trim_start().starts_with("component") {
        read_spectral_csv(geometry, text.as_bytes())
    } else {
        geometry.forward_transform(&read_grid_csv(geometry, text.as_bytes())?)
    }
}

#[derive(Serialize)]
struct ResidualOutput {
    residual: f64,
    fixed_point_residual: f64,
    tolerance: f64,
    bound: f64,
    passed: bool,
}

fn verify_solution(args: &CommonArgs, path: &Path, out: &mut dyn Write) -> Result<i32> {
    let config = args.load()?;
    let spec = config.build_system_spec()?;
    let system = System::with_options(spec, &config.resonance(false))?;
    let state = load_solution(system.geometry(), path)?;
    if state.len() != system.components() {
        return Err(Error::SizeMismatch {
            expected: system.components(),
            found: state.len(),
        });
    }
    let tolerance = config.solver.tol;
    let value = residual(&system, &state)?;
    let output = ResidualOutput {
        residual: value,
        fixed_point_residual: system.fixed_point_residual(&state)?,
        tolerance,
        bound: 10.0 * tolerance,
        passed: value <= 10.0 * tolerance,
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&output)?)?;
    Ok(if output.passed { EXIT_OK } else { EXIT_FAILED })
}
