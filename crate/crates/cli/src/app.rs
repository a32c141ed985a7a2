//! Argument parsing and dispatch; `execute` returns the process exit code.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qsteer_core::SweepOptions;
use serde::Serialize;

use crate::commands::{self, ReportSummary};
use crate::config::{self, Overrides, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "qsteer",
    version,
    about = "Open-loop quantum steering: simulations, robustness sweeps and closed-form comparisons"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// CSV output path (overrides `output` in the config).
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Worker threads for sweeps; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Override the number of integration steps.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Override the grid with the symmetric interval [-x, x].
    #[arg(long, value_name = "X")]
    pub smax: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate the nominal parameters and print a JSON summary.
    Simulate(Common),
    /// Sweep the parameter box, write the error map CSV and print the robustness report.
    Sweep(Common),
    /// Compare numeric and closed-form error probabilities.
    Compare(Common),
    /// Allen-Eberly horizon guaranteeing P_err <= epsilon.
    Teps(TepsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct TepsArgs {
    /// Read defaults for the values below from a config.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta0: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    config::parse(&text, overrides)
}

fn load_common(c: &Common) -> Result<RunConfig, CliError> {
    load(&c.config, &Overrides { steps: c.steps, s_max: c.smax, output: c.output.clone() })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("summaries serialize")
}

fn write_output(path: &Option<PathBuf>, contents: &str) -> Result<(), CliError> {
    if let Some(p) = path {
        fs::write(p, contents).map_err(|source| CliError::Io { path: p.clone(), source })?;
    }
    Ok(())
}

fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let io = |e: std::io::Error| CliError::Io { path: PathBuf::from("<stdout>"), source: e };
    match &cli.command {
        Command::Simulate(c) => {
            let cfg = load_common(c)?;
            let summary = commands::simulate(&cfg)?;
            writeln!(out, "{}", to_json(&summary)).map_err(io)?;
            Ok(0)
        }
        Command::Sweep(c) => {
            let cfg = load_common(c)?;
            let outcome = commands::sweep_cmd(&cfg, SweepOptions { threads: c.threads })?;
            write_output(&cfg.output, &outcome.csv)?;
            writeln!(out, "{}", to_json(&ReportSummary::new(&cfg.strategy, &outcome.report))).map_err(io)?;
            for f in outcome.map.failures() {
                writeln!(err, "cell {} at theta = {:?} failed: {}", f.index, f.theta, f.message).map_err(io)?;
            }
            if !outcome.report.is_robust {
                writeln!(
                    err,
                    "not robust: P_max = {} at theta = {:?} exceeds epsilon = {}",
                    outcome.report.worst_perr, outcome.report.worst_theta, outcome.report.epsilon
                )
                .map_err(io)?;
            }
            Ok(outcome.exit_code())
        }
        Command::Compare(c) => {
            let cfg = load_common(c)?;
            let outcome = commands::compare(&cfg, SweepOptions { threads: c.threads })?;
            write_output(&cfg.output, &outcome.csv)?;
            writeln!(out, "{}", to_json(&outcome.summary)).map_err(io)?;
            Ok(0)
        }
        Command::Teps(a) => {
            let cfg = match &a.config {
                Some(p) => Some(load(p, &Overrides::default())?),
                None => None,
            };
            let pick = |flag: Option<f64>, from_cfg: Option<f64>, name: &str| {
                flag.or(from_cfg).ok_or_else(|| CliError::Config {
                    path: name.to_string(),
                    message: format!("give --{name} or a config that sets it"),
                })
            };
            let epsilon = pick(a.epsilon, cfg.as_ref().and_then(|c| c.epsilon), "epsilon")?;
            let delta0 = pick(a.delta0, cfg.as_ref().map(|c| c.strategy.delta0()), "delta0")?;
            let omega0 = pick(a.omega0, cfg.as_ref().map(|c| c.strategy.omega0()), "omega0")?;
            let t = commands::teps(epsilon, delta0, omega0)?;
            writeln!(out, "{t:.16e}").map_err(io)?;
            Ok(0)
        }
    }
}

/// Runs `cli`, printing results to `out` and diagnostics to `err`.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match run(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
