//! `pdc` command-line tool.

mod args;
mod commands;
mod error;
mod manifest;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};

fn init_threads(threads: Option<usize>) -> CliResult<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    init_threads(cli.threads)?;
    match &cli.command {
        Command::Fit(a) => commands::fit::run(a, cli.threads),
        Command::Predict(a) => commands::predict::run(a, cli.threads),
        Command::Evaluate(a) => commands::evaluate::run(a, cli.threads),
        Command::Anchors(a) => commands::anchors::run(a, cli.threads),
        Command::Benchmark(a) => commands::benchmark::run(a, cli.threads),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class().as_str());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
