//! `toral`: essential-radius bounds, spectra, Fredholm determinants and
//! norm-growth experiments for hyperbolic torus maps.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage or configuration error,
//! 3 resource limit.

mod commands;
mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::commands::Failure;
use crate::config::RunConfig;
use crate::run::{RunDir, RunKey};

const EXIT_CHECK: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "toral", version, about = "Transfer-operator experiments on the 2-torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML with [map], [params], [run]).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Parent directory for run directories.
    #[arg(long, global = true, default_value = "runs")]
    out: PathBuf,
    /// RNG seed; overrides `[run] seed`, default 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Hyperbolicity-exponent bounds on the essential spectral radius.
    Bounds,
    /// Galerkin spectrum and essential-radius check.
    Spectrum,
    /// Dynamical Fredholm determinant, its zeros and their match with eigenvalues.
    Determinant,
    /// Norm growth of iterated operators against the bounds.
    Lynorm,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bounds => "bounds",
            Command::Spectrum => "spectrum",
            Command::Determinant => "determinant",
            Command::Lynorm => "lynorm",
        }
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("toral: {msg}");
    ExitCode::from(code)
}

fn failure_code(f: &Failure) -> u8 {
    use toral_core::Error as E;
    match f {
        Failure::Io(_) => EXIT_RESOURCE,
        Failure::Core(E::BudgetExceeded { .. } | E::TooManyPeriodicPoints { .. } | E::Io(_)) => EXIT_RESOURCE,
        Failure::Core(E::InvalidParameter { .. } | E::Parse(_)) => EXIT_USAGE,
        Failure::Core(_) => EXIT_CHECK,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(path) = &cli.config else {
        return fail(EXIT_USAGE, "--config <path> is required");
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(EXIT_USAGE, format!("cannot read {}: {e}", path.display())),
    };
    let cfg = match RunConfig::parse(&text) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_USAGE, format!("{}: {e}", path.display())),
    };

    let budget = cfg.run.budget;
    let mut sizes = vec![("n", cfg.run.n)];
    if matches!(cli.command, Command::Spectrum) {
        sizes.push(("refine", cfg.refine()));
    }
    for (name, n) in sizes {
        if n > budget {
            return fail(EXIT_RESOURCE, format!("[run] {name} = {n} exceeds the memory budget {budget}"));
        }
    }

    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t as usize).build_global() {
            return fail(EXIT_USAGE, e);
        }
    }

    let seed = cli.seed.or(cfg.run.seed).unwrap_or(0);
    let key = RunKey {
        command: cli.command.name(),
        seed,
        config: &cfg,
    };
    let mut dir = match RunDir::create(&cli.out, &key, cli.threads.map(|t| t as usize)) {
        Ok(d) => d,
        Err(e) => return fail(EXIT_RESOURCE, format!("cannot create run directory: {e}")),
    };
    let result = match cli.command {
        Command::Bounds => commands::bounds(&cfg, &mut dir),
        Command::Spectrum => commands::spectrum_cmd(&cfg, &mut dir),
        Command::Determinant => commands::determinant(&cfg, &mut dir),
        Command::Lynorm => commands::lynorm(&cfg, &mut dir, seed),
    };
    match result {
        Ok(outcome) => {
            let path = match dir.finish("complete", outcome.verdict) {
                Ok(p) => p,
                Err(e) => return fail(EXIT_RESOURCE, format!("cannot write manifest: {e}")),
            };
            let word = if outcome.pass { "PASS" } else { "FAIL" };
            println!("{word} {} {}: {}", cli.command.name(), path.display(), outcome.summary);
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK)
            }
        }
        Err(f) => {
            let code = failure_code(&f);
            let _ = dir.finish("failed", json!({ "pass": false, "error": f.to_string() }));
            fail(code, f)
        }
    }
}
