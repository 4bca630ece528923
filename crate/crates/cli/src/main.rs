//! `kgrowth` command-line interface.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use output::{CliError, Ctx};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.global.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let mut ctx = Ctx::new(&cli.global);
    let result = match &cli.command {
        Command::Fit(a) => commands::series::fit(&mut ctx, a),
        Command::Forecast(a) => commands::series::forecast(&mut ctx, a),
        Command::Segment(a) => commands::series::segment(&mut ctx, a),
        Command::Metrics(a) => commands::graph::metrics(&mut ctx, a),
        Command::Ba(a) => commands::graph::ba(&mut ctx, a),
        Command::Distfit(a) => commands::graph::distfit(&mut ctx, a),
        Command::Disrupt(a) => commands::citation::disrupt(&mut ctx, a),
        Command::Intersect(a) => commands::citation::intersect(&mut ctx, a),
        Command::Taxonomy(a) => commands::taxonomy::taxonomy(&mut ctx, a),
    }
    .and_then(|()| ctx.finish());

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
