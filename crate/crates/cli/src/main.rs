mod args;
mod commands;
mod error;
mod instance;
mod run;

use args::{Cli, Command};
use clap::Parser;
use std::process::ExitCode;

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var("SECTORWALK_THREADS") {
        let threads: usize = value
            .parse()
            .map_err(|_| error::CliError::usage(format!("SECTORWALK_THREADS must be a positive integer, got {value:?}")))?;
        rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global()?;
    }
    Ok(())
}

pub fn dispatch(cli: Cli, argv: Vec<String>) -> anyhow::Result<()> {
    match cli.command {
        Command::Sample(a) => commands::sample(a, argv),
        Command::Count(a) => commands::count(a, argv),
        Command::Diagnose(a) => commands::diagnose(a, argv),
        Command::Generate(a) => commands::generate(a, argv),
        Command::Replay(a) => commands::replay(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let result = configure_threads().and_then(|_| dispatch(cli, argv));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(error::exit_code(&err))
        }
    }
}
