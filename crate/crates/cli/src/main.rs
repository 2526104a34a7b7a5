use std::process::ExitCode;

use clap::Parser;
use pointer_sieve_cli::cli::Cli;
use pointer_sieve_cli::error::CliError;

const THREADS_VAR: &str = "POINTER_SIEVE_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| CliError::input(format!("{THREADS_VAR} must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::input(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let result = configure_threads().and_then(|()| pointer_sieve_cli::execute(&cli, &argv));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pointer-sieve: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
