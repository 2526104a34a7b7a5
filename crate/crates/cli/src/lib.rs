//! Command-line front end for `pointer_sieve`: model files and presets,
//! CSV/JSON emission, and run manifests.

pub mod cli;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod model;
pub mod output;

use std::path::Path;

use clap::Parser;
use serde_json::{json, Value};

use crate::cli::{Cli, Command};
use crate::commands::Outcome;
use crate::error::{CliError, CliResult};
use crate::manifest::{replayable_argv, sidecar_path, RunManifest};
use crate::output::emit;

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Validate(_) => "validate",
        Command::Decompose(_) => "decompose",
        Command::Coeffs(_) => "coeffs",
        Command::Minimize(_) => "minimize",
        Command::Evolve(_) => "evolve",
        Command::Spin1(_) => "spin1",
        Command::Sweep(_) => "sweep",
        Command::Scatter(_) => "scatter",
        Command::Qbm(_) => "qbm",
        Command::Replay(_) => "replay",
    }
}

fn dispatch(cmd: &Command) -> CliResult<Outcome> {
    match cmd {
        Command::Validate(a) => commands::validate(a),
        Command::Decompose(a) => commands::decompose(a),
        Command::Coeffs(a) => commands::coeffs(a),
        Command::Minimize(a) => commands::minimize_cmd(a),
        Command::Evolve(a) => commands::evolve(a),
        Command::Spin1(a) => commands::spin1(a.gamma_over_d),
        Command::Sweep(a) => Ok(Outcome {
            report: commands::run_sweep(a.points)?,
            input_hash: None,
            seed: None,
            resolved: Value::Null,
        }),
        Command::Scatter(a) => commands::scatter(a),
        Command::Qbm(a) => commands::qbm(a),
        Command::Replay(_) => Err(CliError::input("replay manifests cannot replay themselves")),
    }
}

/// Runs a parsed command line; `argv` excludes the program name.
pub fn execute(cli: &Cli, argv: &[String]) -> CliResult<()> {
    if let Command::Replay(r) = &cli.command {
        let recorded = RunManifest::read(&r.manifest_file)?;
        let mut args = vec!["pointer-sieve".to_string()];
        args.extend(recorded.argv.iter().cloned());
        let inner = Cli::try_parse_from(&args)
            .map_err(|e| CliError::input(format!("{}: recorded arguments no longer parse: {e}", r.manifest_file.display())))?;
        if matches!(inner.command, Command::Replay(_)) {
            return Err(CliError::input("manifest records a replay"));
        }
        let outcome = dispatch(&inner.command)?;
        if outcome.input_hash != recorded.input_hash {
            return Err(CliError::input(format!(
                "input changed since the manifest was written ({:?} vs {:?})",
                outcome.input_hash, recorded.input_hash
            )));
        }
        let format = cli.format.or(inner.format);
        return finish(&inner.command, &recorded.argv, outcome, format, cli.out.as_deref(), cli.manifest.as_deref());
    }
    let outcome = dispatch(&cli.command)?;
    finish(&cli.command, &replayable_argv(argv), outcome, cli.format, cli.out.as_deref(), cli.manifest.as_deref())
}

fn finish(
    cmd: &Command,
    argv: &[String],
    outcome: Outcome,
    format: Option<output::Format>,
    out: Option<&Path>,
    manifest_path: Option<&Path>,
) -> CliResult<()> {
    let bytes = outcome.report.render(format)?;
    let format_used = format.unwrap_or(outcome.report.default_format);
    let manifest = RunManifest {
        command: command_name(cmd).into(),
        config: json!({
            "arguments": cmd,
            "format": format_used,
            "resolved": outcome.resolved,
        }),
        argv: argv.to_vec(),
        input_hash: outcome.input_hash,
        seed: outcome.seed,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        timestamp_utc: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    emit(&bytes, out)?;
    let target = manifest_path.map(Path::to_path_buf).or_else(|| out.map(sidecar_path));
    match target {
        Some(path) => std::fs::write(&path, manifest.to_json())
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?,
        None => eprint!("{}", manifest.to_json()),
    }
    Ok(())
}
