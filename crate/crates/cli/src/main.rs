//! `robdcor` command-line interface.

mod args;
mod commands;

use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use robdcor::parallel::{resolve_workers, with_workers};
use robdcor::Error;

use args::{Cli, Command};

/// Exit status for a bad invocation.
const EXIT_USAGE: u8 = 2;
/// Exit status for unreadable or malformed input.
const EXIT_DATA: u8 = 3;
/// Exit status for a numerical failure.
const EXIT_NUMERIC: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Lib(e) if e.is_data_error() => EXIT_DATA,
            CliError::Lib(
                Error::InvalidParameter(_) | Error::Unsupported(_) | Error::MomentCondition(_),
            ) => EXIT_USAGE,
            CliError::Lib(_) => EXIT_NUMERIC,
        }
    }
}

fn clock_seed() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let seed = cli.seed.unwrap_or_else(clock_seed);
    if let Command::Experiment(a) = &cli.command {
        let seed = commands::experiment(a, cli.seed)?;
        eprintln!("seed: {seed}");
        return Ok(());
    }
    eprintln!("seed: {seed}");
    match &cli.command {
        Command::Test(a) => commands::test(a, seed),
        Command::Scan(a) => commands::scan_cmd(a, seed),
        Command::Ifcurve(a) => commands::ifcurve(a, seed),
        Command::Sccurve(a) => commands::sccurve(a),
        Command::Breakdown(a) => commands::breakdown(a, seed),
        Command::Experiment(_) => unreachable!("handled above"),
        Command::Factors(a) => commands::factors(a, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = resolve_workers(cli.threads);
    match with_workers(workers, || run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
