use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "pointer-sieve", version, about = "Approximate pointer states by the predictability sieve")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format (CSV for tables, JSON for structured results by default).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of stdout; the manifest goes next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Explicit manifest path (default: `<out>.manifest.json`, or stderr).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Algebra checks: residuals, Killing form, normalization.
    Validate(ModelArgs),
    /// Canonical rotation-block decomposition of the free evolution.
    Decompose(ModelArgs),
    /// Per-block bath coefficients.
    Coeffs(EvalArgs),
    /// Multi-start sieve over the pure-state sphere.
    Minimize(MinimizeArgs),
    /// Integrate the constant-coefficient master equation.
    Evolve(EvolveArgs),
    /// Analytic spin-1 minimizer.
    Spin1(Spin1Args),
    /// Spin-1 minimum over a grid of damping ratios.
    Sweep(SweepArgs),
    /// Functional values at Haar-random pure states.
    Scatter(ScatterArgs),
    /// Oscillator-group family comparison.
    Qbm(QbmArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Model file, or a preset: `spin:<j>`, `qbm`.
    #[arg(long)]
    pub model: String,
    /// Level splitting for presets.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Fock truncation for the `qbm` preset.
    #[arg(long, default_value_t = pointer_sieve::qbm::DEFAULT_TRUNCATION)]
    pub n_trunc: usize,
    /// Accept a degenerate or indefinite Killing form.
    #[arg(long)]
    pub assume_orthogonal_adjoint: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeArg {
    Full,
    HighT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionArg {
    Rescaled,
    AsPrinted,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Bath as a JSON file or inline JSON object.
    #[arg(long)]
    pub bath: Option<String>,
    /// Inverse temperature override (`inf` for zero temperature).
    #[arg(long)]
    pub beta: Option<String>,
    /// Direct `γ/D` with `D = 1` on every block; overrides any bath.
    #[arg(long)]
    pub gamma_over_d: Option<f64>,
    #[arg(long, value_enum, default_value_t = RegimeArg::Full)]
    pub regime: RegimeArg,
    #[arg(long, value_enum, default_value_t = ConventionArg::Rescaled)]
    pub convention: ConventionArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MinimizeArgs {
    #[command(flatten)]
    pub eval: EvalArgs,
    #[arg(long, default_value_t = 64)]
    pub starts: usize,
    #[arg(long, default_value_t = 5000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_grad: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub eval: EvalArgs,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// `random`, `basis:<k>`, `coherent:<theta>,<phi>` (spin presets),
    /// `glauber:<re>,<im>` (qbm), or `sieve`.
    #[arg(long, default_value = "random")]
    pub state: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub record_every: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub step_tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Spin1Args {
    #[arg(long)]
    pub gamma_over_d: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScatterArgs {
    #[command(flatten)]
    pub eval: EvalArgs,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QbmArgs {
    #[arg(long, default_value_t = pointer_sieve::qbm::DEFAULT_TRUNCATION)]
    pub n_trunc: usize,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Diffusion constant `D` of the `(q, p)` block.
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReplayArgs {
    pub manifest_file: PathBuf,
}
