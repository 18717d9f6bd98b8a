mod args;
mod commands;
mod config;
mod error;
mod inputs;
mod leaderboard;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use config::RunConfig;
use error::{CliError, Result};

fn run(cli: Cli) -> Result<()> {
    let (shared, command) = match cli.command {
        Command::Convert(a) => return commands::convert(&a),
        Command::Features(s) => (s, commands::features as fn(&RunConfig) -> Result<()>),
        Command::Rank(s) => (s, commands::rank as _),
        Command::Train(s) => (s, commands::train as _),
        Command::Evaluate(s) => (s, commands::evaluate as _),
        Command::Report(s) => (s, commands::report as _),
    };
    let cfg = RunConfig::resolve(shared)?;
    match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?
            .install(|| command(&cfg)),
        None => command(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("{e}");
            e.exit_code()
        }
        Err(_) => CliError::Internal("unexpected panic".into()).exit_code(),
    }
}
