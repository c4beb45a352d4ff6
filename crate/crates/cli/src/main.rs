// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod exit;
mod output;

use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};

use args::{Cli, Command};
use exit::{CliError, CliResult};

/// Caps rayon's global pool; 0 or unset leaves the default.
fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("SPD_AUGMENT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("SPD_AUGMENT_THREADS must be a nonnegative integer, got `{raw}`")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::usage(e.to_string()))?;
    }
    Ok(())
}

fn parse() -> CliResult<Cli> {
    let root = Cli::command();
    let argv = config::merge_config(std::env::args_os().collect(), &root)?;
    let matches = root.try_get_matches_from(argv).unwrap_or_else(|e| e.exit());
    Cli::from_arg_matches(&matches).map_err(|e| CliError::usage(e.to_string()))
}

fn run() -> CliResult<()> {
    let cli = parse()?;
    configure_threads()?;
    match &cli.command {
        Command::Gen(a) => commands::gen::run(a),
        Command::Mix(a) => commands::mix::run(a),
        Command::Diagnose(a) => commands::diagnose::run(a),
        Command::Regress(a) => commands::regress::run(a),
        Command::Probe(a) => commands::probe::run(a),
        Command::Bench(a) => commands::bench::run(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
