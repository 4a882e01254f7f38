//! `theorist`: evolve, inspect, and run law-discovery experiments on
//! state/value time series.
//!
//! Exit codes: 0 success/PASS, 1 usage, 2 I/O or validation failure,
//! 3 preset threshold FAIL.

mod commands;
mod config;
mod presets;
mod svg;

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use commands::GenomeKind;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or arguments (exit 1).
    Usage(String),
    /// I/O or validation failure (exit 2).
    Data(anyhow::Error),
    /// Preset thresholds missed (exit 3); diagnostics already printed.
    Fail,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Fail => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "theorist",
    version,
    about = "Evolve symbolic value models and gate-matrix decision models from time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate experiment data.
    Datagen {
        #[command(subcommand)]
        generator: DatagenCmd,
    },
    /// Evolve one genome against a series CSV.
    Evolve {
        #[command(subcommand)]
        genome: EvolveCmd,
    },
    /// Run a bundled experiment preset end to end (newton | cat).
    Run {
        /// Preset name: newton or cat.
        preset: String,
        /// Seed or inclusive seed range, e.g. `7` or `1..10`.
        #[arg(long, default_value = "1..10")]
        seed: String,
        /// Output directory (default: runs/<preset>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forecast future steps from a saved theory bundle.
    Predict {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Forecast CSV path (prints to stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruction report (CSV + SVG) for a saved theory bundle.
    Report {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum DatagenCmd {
    /// Uniformly accelerated trajectory: x(t) = v t + a t^2 / 2.
    Puck {
        #[arg(long)]
        v: f64,
        #[arg(long)]
        a: f64,
        /// Number of positions (t = 0..steps-1); at least 2.
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fair digital-coin walk: +1 or -1 per step.
    Coin {
        /// Number of coin flips; at least 1.
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum EvolveCmd {
    /// Evolve a symbolic value tree (requires terminal bindings in --config).
    Xft {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evolve a gate-matrix decision tree.
    Qdt {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_seed_range(text: &str) -> Result<RangeInclusive<u64>, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "bad --seed value {text:?}: expected `<n>` or `<a>..<b>`"
        ))
    };
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        Ok(a..=b)
    } else {
        let s: u64 = text.trim().parse().map_err(|_| bad())?;
        Ok(s..=s)
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Datagen { generator } => match generator {
            DatagenCmd::Puck { v, a, steps, out } => commands::cmd_datagen_puck(v, a, steps, &out),
            DatagenCmd::Coin { steps, seed, out } => commands::cmd_datagen_coin(steps, seed, &out),
        },
        Command::Evolve { genome } => match genome {
            EvolveCmd::Xft {
                data,
                config,
                seed,
                out,
            } => commands::cmd_evolve(GenomeKind::ValueTree, &data, config.as_ref(), seed, &out),
            EvolveCmd::Qdt {
                data,
                config,
                seed,
                out,
            } => commands::cmd_evolve(GenomeKind::DecisionTree, &data, config.as_ref(), seed, &out),
        },
        Command::Run { preset, seed, out } => {
            let seeds = parse_seed_range(&seed)?;
            let out = out.unwrap_or_else(|| PathBuf::from("runs").join(&preset));
            presets::run_preset(&preset, seeds, &out)
        }
        Command::Predict {
            theory,
            data,
            horizon,
            seed,
            out,
        } => commands::cmd_predict(&theory, &data, horizon, seed, out.as_ref()),
        Command::Report { theory, data, out } => commands::cmd_report(&theory, &data, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprintln!("usage error: {msg}"),
                CliError::Data(err) => eprintln!("error: {err:#}"),
                CliError::Fail => eprintln!("preset thresholds not met"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
