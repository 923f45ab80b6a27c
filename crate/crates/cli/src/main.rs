use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dunkl_cli::{emit_basis, run_experiment, run_verify, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "dunkl", version, about = "Dunkl harmonic-analysis workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity suites and report the worst residual of each.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated suite names; defaults to the config list, or all.
        #[arg(long)]
        suite: Option<String>,
        /// Where to write the JSON summary (stdout when absent).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Scan the blow-up ratio over the epsilon grid for each r.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dump the phi/H coefficient table as CSV.
    Basis {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        max_degree: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Verify { config, suite, summary } => {
            let cfg = RunConfig::load(&config)?;
            let report = run_verify(&cfg, suite.as_deref())?;
            print!("{}", report.table());
            let json = serde_json::to_string_pretty(&report).map_err(dunkl_core::Error::from)? + "\n";
            match summary {
                Some(path) => std::fs::write(&path, json).map_err(|source| CliError::Io { path, source })?,
                None => print!("{json}"),
            }
            Ok(report.passed)
        }
        Command::Experiment { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let report = run_experiment(&cfg, &out)?;
            print!("{}", report.table());
            Ok(report.complete())
        }
        Command::Basis { config, max_degree, out } => {
            let cfg = RunConfig::load(&config)?;
            let count = emit_basis(&cfg, max_degree, &out)?;
            println!("wrote {count} basis elements to {}", out.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
