use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use demc_harness::commands::{self, Case};
use demc_harness::{Algorithm, ExperimentConfig, Result};

/// Differential-evolution and adaptive Metropolis experiments.
#[derive(Debug, Parser)]
#[command(name = "demc", version)]
struct Cli {
    /// TOML experiment config; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; overrides `master_seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Config override, e.g. `--set mvn.rho=0.9`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Demc,
    Amc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CaseArg {
    Table1,
    Table2,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the Lotka-Volterra observations.
    Simulate,
    /// Run the configured sampler and write chain files.
    Sample {
        #[arg(long, value_enum)]
        algorithm: Option<AlgorithmArg>,
    },
    /// Compute r-hat, ESS and summaries for chain files.
    Diagnose {
        /// Timing file written by `sample`.
        #[arg(long)]
        timing: Option<PathBuf>,
        #[arg(long, value_enum)]
        algorithm: Option<AlgorithmArg>,
        #[arg(required = true)]
        chains: Vec<PathBuf>,
    },
    /// Write plot-ready tables for chain files.
    Plotdata {
        #[arg(required = true)]
        chains: Vec<PathBuf>,
    },
    /// Run a full case study with both samplers.
    Reproduce {
        #[arg(value_enum)]
        case: CaseArg,
    },
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let mut overrides = Vec::new();
    if let Some(seed) = cli.seed {
        overrides.push(format!("master_seed={seed}"));
    }
    let algorithm = match &cli.command {
        Command::Sample { algorithm } | Command::Diagnose { algorithm, .. } => *algorithm,
        _ => None,
    };
    if let Some(a) = algorithm {
        let a = match a {
            AlgorithmArg::Demc => Algorithm::Demc,
            AlgorithmArg::Amc => Algorithm::Amc,
        };
        overrides.push(format!("algorithm=\"{a}\""));
    }
    overrides.extend(cli.overrides.iter().cloned());
    let cfg = ExperimentConfig::load(cli.config.as_deref(), &overrides)?;
    let out = cli.out.as_path();
    match &cli.command {
        Command::Simulate => commands::simulate(&cfg, out),
        Command::Sample { .. } => commands::sample(&cfg, out),
        Command::Diagnose { timing, chains, .. } => {
            commands::diagnose(&cfg, chains, timing.as_deref(), out)
        }
        Command::Plotdata { chains } => commands::plotdata(&cfg, chains, out),
        Command::Reproduce { case } => {
            let case = match case {
                CaseArg::Table1 => Case::Table1,
                CaseArg::Table2 => Case::Table2,
            };
            commands::reproduce(&cfg, case, out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
