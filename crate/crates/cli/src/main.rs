//! `riskdual`: config-driven evaluations, envelope tables, polarity round
//! trips, continuity checks, localization probes, and the acceptance suite,
//! all emitting deterministic reports.
//!
//! Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 an input
//! or config problem.  Wall time goes to stderr so report bytes depend only
//! on config and inputs.

// `!(x > 0.0)` is used on purpose: unlike `x <= 0.0` it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{OutputFormat, RunConfig};
use report::Report;
use riskdual::{Error, Result};

#[derive(Parser)]
#[command(
    name = "riskdual",
    version,
    about = "Scenario-set and penalty dual representations on sampled metric spaces"
)]
struct Cli {
    /// JSON run configuration; paths inside resolve against its directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Also write the report to this file (same bytes as stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the config tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Override both horizons (M_max and N_max).
    #[arg(long, global = true)]
    horizon: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Evaluate u(f) with its minimizing measure and acceptance decision.
    Eval,
    /// Lower/upper Lipschitz envelopes and their gap table.
    Envelope,
    /// Polar vertices, bipolar round trip, conjugate penalties.
    Duality,
    /// Monotone continuity of u along a decreasing sequence.
    Fatou,
    /// Bump-family support localization table.
    Probe,
    /// All nine acceptance criteria.
    Suite,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Envelope => "envelope",
            Command::Duality => "duality",
            Command::Fatou => "fatou",
            Command::Probe => "probe",
            Command::Suite => "suite",
        }
    }
}

fn run(cli: &Cli) -> Result<(Report, OutputFormat, Option<PathBuf>)> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = cli.tol {
        cfg.tol = tol;
    }
    if let Some(h) = cli.horizon {
        cfg.m_max = h;
        cfg.n_max = h;
    }
    cfg.validate()?;

    let name = cli.command.name();
    if let Some(echo) = &cfg.command {
        if echo != name {
            return Err(Error::param(
                "command",
                format!("config names '{echo}' but '{name}' was invoked"),
            ));
        }
    }

    let report = match cli.command {
        Command::Eval => commands::cmd_eval(&cfg)?,
        Command::Envelope => commands::cmd_envelope(&cfg)?,
        Command::Duality => commands::cmd_duality(&cfg)?,
        Command::Fatou => commands::cmd_fatou(&cfg)?,
        Command::Probe => commands::cmd_probe(&cfg)?,
        Command::Suite => commands::cmd_suite(&cfg)?,
    };
    let format = cli
        .format
        .or(cfg.format)
        .unwrap_or(OutputFormat::Json);
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(|o| cfg.path(o)));
    Ok((report, format, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = std::time::Instant::now();
    match run(&cli) {
        Ok((report, format, out)) => {
            let text = report.render(format);
            print!("{text}");
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            eprintln!("wall time: {} ms", started.elapsed().as_millis());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
