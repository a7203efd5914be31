mod commands;
mod config;
mod output;
mod selfcheck;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use config::Cli;

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("GAPFREDHOLM_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("GAPFREDHOLM_THREADS must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("configuration error: {msg}");
        return ExitCode::from(2);
    }
    match commands::run(&cli.command, &cli.global) {
        Ok(outcome) => {
            if let Err(e) = outcome.table.write(cli.global.format, cli.global.out.as_deref()) {
                eprintln!("output error: {e}");
                return ExitCode::from(3);
            }
            if outcome.failures > 0 {
                eprintln!("{} check(s) failed", outcome.failures);
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{e}");
            if e.exit_code() == 2 {
                eprintln!("{}", Cli::command().render_usage());
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
