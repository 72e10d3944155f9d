//! Command-line front end for the `dkp-sphere` library.
//!
//! Results go to stdout (or `--output`) as CSV or JSON; a one-line JSON
//! manifest with the resolved configuration, wall time and outcome goes to
//! stderr so that result files stay byte-identical between runs.

pub mod commands;
pub mod config;
pub mod table;
pub mod verify;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use dkp_sphere::radial::RadialError;
use dkp_sphere::zsystem::ZError;

use config::{env_overrides, parse_tol_flag, resolve_tolerances, FileConfig, Format, Tolerances};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NONCONVERGED: i32 = 3;

/// Invalid input detected after argument parsing.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// A numerical procedure did not converge.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct NonConvergence(pub String);

#[derive(Debug, Parser, Serialize)]
#[command(name = "dkp-sphere", version, about = "Spin-1 particle in a magnetic field on the 3-sphere: checks and solvers")]
pub struct Cli {
    /// JSON file with format, output, jobs, seed and tolerance settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write results to a file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for parameter sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Tolerance override NAME=VALUE (repeatable).
    #[arg(long = "tol", global = true, value_parser = parse_tol_flag)]
    pub tol: Vec<(String, f64)>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Exact matrix identities of the cyclic representation.
    AlgebraCheck,
    /// Christoffel symbols, tetrad and field checks at random points.
    GeometryCheck(commands::GeometryArgs),
    /// Radial spectrum over a lattice of (m, B, n).
    Spectrum(commands::SpectrumArgs),
    /// Sampled radial bound state R(r).
    RadialEval(commands::RadialEvalArgs),
    /// Indicial cubic, Frobenius exponents and amplitude ratios.
    Indicial(commands::IndicialArgs),
    /// Lowest eigenvalues 2εM of the coupled z-system.
    Zsolve(commands::ZsolveArgs),
    /// Every check suite in one run.
    VerifyAll(commands::VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::AlgebraCheck => "algebra-check",
            Command::GeometryCheck(_) => "geometry-check",
            Command::Spectrum(_) => "spectrum",
            Command::RadialEval(_) => "radial-eval",
            Command::Indicial(_) => "indicial",
            Command::Zsolve(_) => "zsolve",
            Command::VerifyAll(_) => "verify-all",
        }
    }
}

/// Settings shared by all subcommands after merging file, env and flags.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub format: Format,
    pub output: Option<PathBuf>,
    pub jobs: usize,
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// Bounded pool for sweeps; results are always collected in input order.
    pub fn pool(&self) -> anyhow::Result<rayon::ThreadPool> {
        Ok(rayon::ThreadPoolBuilder::new().num_threads(self.jobs).build()?)
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get()).min(8)
}

/// What a subcommand produced.
pub struct Report {
    pub table: table::Table,
    pub checks_passed: usize,
    pub checks_total: usize,
    pub exit: i32,
}

impl Report {
    pub fn data(table: table::Table) -> Self {
        Self {
            table,
            checks_passed: 0,
            checks_total: 0,
            exit: EXIT_PASS,
        }
    }
}

fn resolve(cli: &Cli, env: BTreeMap<String, f64>) -> Result<RunConfig, UsageError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let tolerances = resolve_tolerances(&file, &env, &cli.tol)?;
    let jobs = cli.jobs.or(file.jobs).unwrap_or_else(default_jobs);
    if jobs == 0 {
        return Err(UsageError("--jobs must be at least 1".into()));
    }
    Ok(RunConfig {
        format: cli.format.or(file.format).unwrap_or_default(),
        output: cli.output.clone().or(file.output),
        jobs,
        seed: file.seed,
        tolerances,
    })
}

/// Maps an error to its exit code.
pub fn classify(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    if err.downcast_ref::<NonConvergence>().is_some() {
        return EXIT_NONCONVERGED;
    }
    if let Some(e) = err.downcast_ref::<ZError>() {
        return match e {
            ZError::ComplexEigenvalue { .. } | ZError::IterationLimit(_) | ZError::Linalg(_) => EXIT_NONCONVERGED,
            _ => EXIT_USAGE,
        };
    }
    if let Some(e) = err.downcast_ref::<RadialError>() {
        return match e {
            RadialError::Linalg(_) => EXIT_NONCONVERGED,
            _ => EXIT_USAGE,
        };
    }
    EXIT_USAGE
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> anyhow::Result<Report> {
    match cmd {
        Command::AlgebraCheck => commands::algebra_check(),
        Command::GeometryCheck(a) => commands::geometry_check(a, cfg),
        Command::Spectrum(a) => commands::spectrum(a, cfg),
        Command::RadialEval(a) => commands::radial_eval(a),
        Command::Indicial(a) => commands::indicial(a),
        Command::Zsolve(a) => commands::zsolve(a, cfg),
        Command::VerifyAll(a) => verify::verify_all(a, cfg),
    }
}

fn status_name(exit: i32) -> &'static str {
    match exit {
        EXIT_PASS => "pass",
        EXIT_FAIL => "fail",
        EXIT_NONCONVERGED => "nonconverged",
        _ => "usage_error",
    }
}

/// Runs the CLI with explicit arguments and environment, writing results to
/// `out` and diagnostics plus the manifest to `err`. Returns the exit code.
pub fn run_with<I, T>(args: I, env: Vec<(String, String)>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let start = Instant::now();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(err, "{}", e.render());
            if code != 0 {
                emit_manifest(err, json!(null), start, EXIT_USAGE, 0, 0);
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_PASS;
        }
    };
    let outcome = env_overrides(env)
        .and_then(|env| resolve(&cli, env))
        .map_err(anyhow::Error::from)
        .and_then(|cfg| {
            let report = dispatch(&cli.command, &cfg)?;
            Ok((cfg, report))
        });
    let echo = json!({ "cli": &cli });
    match outcome {
        Ok((cfg, report)) => {
            let written = report.table.render(cfg.format).and_then(|text| {
                match &cfg.output {
                    Some(path) => std::fs::write(path, text)?,
                    None => out.write_all(text.as_bytes())?,
                }
                Ok(())
            });
            let exit = match written {
                Ok(()) => report.exit,
                Err(e) => {
                    let _ = writeln!(err, "error: {e:#}");
                    EXIT_USAGE
                }
            };
            let echo = json!({ "cli": &cli, "resolved": &cfg });
            emit_manifest(err, echo, start, exit, report.checks_passed, report.checks_total);
            exit
        }
        Err(e) => {
            let code = classify(&e);
            let _ = writeln!(err, "error: {e:#}");
            emit_manifest(err, echo, start, code, 0, 0);
            code
        }
    }
}

fn emit_manifest(
    err: &mut dyn Write,
    config: serde_json::Value,
    start: Instant,
    exit: i32,
    passed: usize,
    total: usize,
) {
    let manifest = json!({
        "manifest": {
            "tool": "dkp-sphere",
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "wall_time_s": start.elapsed().as_secs_f64(),
            "status": status_name(exit),
            "exit_code": exit,
            "checks_passed": passed,
            "checks_total": total,
        }
    });
    let _ = writeln!(err, "{manifest}");
}
