//! Configuration-driven experiment runner.
//!
//! `kantorovich-lab <kind> --config <path> [--seed N] [--out DIR]` runs one
//! experiment and writes its report; `kantorovich-lab validate --config
//! <path>` only lists diagnostics. Exit codes: 0 success, 1 failed checks,
//! 2 configuration error, 3 input error.

pub mod config;
pub mod report;
pub mod runner;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

pub use config::{diagnose, Diagnostic, ExperimentConfig, Kind, Loaded};
pub use report::{write_report, ExperimentReport, Written};
pub use runner::{run, InputError, Outcome};

pub const THREADS_ENV: &str = "KANTOROVICH_LAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    ChecksFailed = 1,
    Config = 2,
    Input = 3,
}

#[derive(Debug, Parser)]
#[command(name = "kantorovich-lab", version, about = "Reproducible Kantorovich-topology experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// KR, K and K_{d,q} seminorms, optionally W_q against a second measure.
    Norms(RunArgs),
    /// τ_KR / τ_K convergence, barycenters, subsequences and absolute continuity.
    Convergence(RunArgs),
    /// Weak-neighbourhood witness in l¹ with unit barycenter norm.
    Counterexample(RunArgs),
    /// Block rescaling schedule and its certification.
    Schedule(RunArgs),
    /// Monte-Carlo checks for log-concave laws.
    Logconcave(RunArgs),
    /// Monte-Carlo checks for stable laws.
    Stable(RunArgs),
    /// List configuration diagnostics without running.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the configuration seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the configuration output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command {
    fn kind(&self) -> Option<(Kind, &RunArgs)> {
        Some(match self {
            Command::Norms(a) => (Kind::Norms, a),
            Command::Convergence(a) => (Kind::Convergence, a),
            Command::Counterexample(a) => (Kind::Counterexample, a),
            Command::Schedule(a) => (Kind::Schedule, a),
            Command::Logconcave(a) => (Kind::Logconcave, a),
            Command::Stable(a) => (Kind::Stable, a),
            Command::Validate { .. } => return None,
        })
    }
}

fn base_dir(config: &Path) -> PathBuf {
    config.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Diagnostics for a configuration file; empty when it is runnable.
pub fn validate(path: &Path) -> Result<Vec<Diagnostic>, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
    Ok(diagnose(&text, None, None, &base_dir(path)).err().unwrap_or_default())
}

/// Loads, runs and reports; the report is not written to disk.
pub fn run_config(kind: Kind, args: &RunArgs) -> Result<(Loaded, Outcome, ExperimentReport), (Exit, String)> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| (Exit::Input, format!("cannot read {}: {e}", args.config.display())))?;
    let loaded = diagnose(&text, Some(kind), args.seed, &base_dir(&args.config))
        .map_err(|diags| (Exit::Config, diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")))?;
    let start = Instant::now();
    let outcome = run(&loaded).map_err(|e| (Exit::Input, e.0))?;
    let report = ExperimentReport::new(kind, loaded.config.clone(), &outcome, start.elapsed().as_secs_f64());
    Ok((loaded, outcome, report))
}

/// Caps the global rayon pool from `KANTOROVICH_LAB_THREADS`.
pub fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("{THREADS_ENV} must be a positive integer (got {v:?})"))?;
    if n == 0 {
        return Err(format!("{THREADS_ENV} must be a positive integer (got 0)"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

/// Entry point shared by the binary and the tests.
pub fn main_with(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> Exit {
    if let Err(msg) = configure_threads() {
        let _ = writeln!(err, "error: {msg}");
        return Exit::Config;
    }
    let Some((kind, args)) = cli.command.kind() else {
        let Command::Validate { config } = &cli.command else { unreachable!() };
        return match validate(config) {
            Ok(diags) if diags.is_empty() => {
                let _ = writeln!(out, "ok: {}", config.display());
                Exit::Success
            }
            Ok(diags) => {
                for d in diags {
                    let _ = writeln!(out, "{d}");
                }
                Exit::Config
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                Exit::Input
            }
        };
    };
    let (loaded, outcome, report) = match run_config(kind, args) {
        Ok(r) => r,
        Err((code, msg)) => {
            let _ = writeln!(err, "{msg}");
            return code;
        }
    };
    let dir = match (&args.out, &loaded.config.output_dir) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) => loaded.base.join(d),
        (None, None) => PathBuf::from("reports"),
    };
    let written = match write_report(&dir, &report, &outcome) {
        Ok(w) => w,
        Err(e) => {
            let _ = writeln!(err, "cannot write report into {}: {e}", dir.display());
            return Exit::Input;
        }
    };
    for c in &report.checks {
        let tag = match (c.passed, c.expected_failure) {
            (true, _) => "PASS",
            (false, true) => "XFAIL",
            (false, false) => "FAIL",
        };
        let _ = writeln!(out, "{tag} {}", c.name);
    }
    let _ = writeln!(out, "report: {}", written.report.display());
    if report.passed {
        Exit::Success
    } else {
        Exit::ChecksFailed
    }
}
