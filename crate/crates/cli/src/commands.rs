use nalgebra::DMatrix;
use pointer_sieve::adjoint::{build_ad_matrix, DecompositionWarning};
use pointer_sieve::algebra::killing_form;
use pointer_sieve::bath::ZeroMode;
use pointer_sieve::dynamics::{density_matrix, integrate, IntegratorConfig, MasterOperator};
use pointer_sieve::functional::{EntropyOptions, GammaTermConvention, Regime};
use pointer_sieve::linalg::CVec;
use pointer_sieve::optimizer::{haar_random_state, haar_scatter, minimize, OptimizerConfig};
use pointer_sieve::qbm::{coherent_state as glauber_state, family_table, oscillator_model};
use pointer_sieve::scalar::cplx;
use pointer_sieve::spin::{coherent_minimum, coherent_state, spin1_observables, spin1_solve, spin1_sweep, SpinModel};
use pointer_sieve::state::PureState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cli::{ConventionArg, EvalArgs, EvolveArgs, MinimizeArgs, ModelArgs, QbmArgs, RegimeArg, ScatterArgs};
use crate::error::{CliError, CliResult};
use crate::model::{load_model, parse_bath_flag, BetaSpec, CoefficientSource, LoadedModel, Pipeline, Source};
use crate::output::{json_float, Cell, Format, Report, Table};

/// A command's report plus what the manifest needs to know.
pub struct Outcome {
    pub report: Report,
    pub input_hash: Option<String>,
    pub seed: Option<u64>,
    /// Defaults filled in by the command itself (coefficient source, ...).
    pub resolved: Value,
}

fn matrix_json(m: &DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json_float(m[(i, j)])).collect()))
            .collect(),
    )
}

fn amplitudes_json(v: &CVec<f64>) -> Value {
    Value::Array(v.iter().map(|z| json!([json_float(z.re), json_float(z.im)])).collect())
}

fn load(args: &ModelArgs) -> CliResult<LoadedModel> {
    load_model(&args.model, args.omega, args.n_trunc, args.assume_orthogonal_adjoint)
}

pub fn pipeline(args: &EvalArgs) -> CliResult<Pipeline> {
    let loaded = load(&args.model)?;
    let bath = args.bath.as_deref().map(parse_bath_flag).transpose()?;
    let beta = args.beta.as_deref().map(BetaSpec::parse).transpose()?;
    let source = CoefficientSource::resolve(&loaded, bath, beta, args.gamma_over_d)?;
    let options = EntropyOptions {
        convention: match args.convention {
            ConventionArg::Rescaled => GammaTermConvention::Rescaled,
            ConventionArg::AsPrinted => GammaTermConvention::AsPrinted,
        },
        regime: match args.regime {
            RegimeArg::Full => Regime::Full,
            RegimeArg::HighT => Regime::HighTemperature,
        },
    };
    Pipeline::new(loaded, source, options)
}

fn resolved_source(p: &Pipeline) -> Value {
    json!({ "coefficients": p.source, "units": p.source.units(), "model_source": p.loaded.source })
}

pub fn validate(args: &ModelArgs) -> CliResult<Outcome> {
    let loaded = load(args)?;
    let report = loaded.model.validation_report();
    let kf = killing_form(loaded.model.structure_constants());
    let json = json!({
        "dim_algebra": loaded.model.dim_algebra(),
        "dim_rep": loaded.model.dim_rep(),
        "h0_scale": json_float(loaded.model.h0_scale()),
        "residuals": {
            "hermiticity": json_float(report.hermiticity),
            "commutation": json_float(report.commutation),
            "jacobi": json_float(report.jacobi),
        },
        "killing_form": {
            "matrix": matrix_json(&kf.matrix),
            "signature": {
                "positive": kf.signature.positive,
                "negative": kf.signature.negative,
                "zero": kf.signature.zero,
            },
        },
        "normalization": {
            "killing_sign": loaded.scale.killing_sign,
            "uniform_scale": loaded.scale.uniform_scale.map(json_float),
            "h0_rescale": json_float(loaded.scale.h0_rescale),
            "asserted_orthogonal": loaded.scale.asserted_orthogonal,
            "transform": matrix_json(&loaded.scale.transform),
        },
    });
    Ok(Outcome {
        report: Report::structured(json),
        input_hash: Some(loaded.input_hash.clone()),
        seed: None,
        resolved: json!({ "model_source": loaded.source }),
    })
}

pub fn decompose(args: &ModelArgs) -> CliResult<Outcome> {
    let loaded = load(args)?;
    let dec = loaded.decomposition()?;
    let n = loaded.model.dim_algebra();
    let f = build_ad_matrix(&loaded.model, n - 1)?;
    let worst = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0]
        .iter()
        .map(|&t| dec.reconstruction_error(&f, t))
        .fold(0.0f64, f64::max);
    let physical = dec.physical_frequencies(loaded.model.h0_scale());
    let blocks: Vec<Value> = dec
        .blocks()
        .iter()
        .zip(&physical)
        .map(|(b, w)| {
            json!({
                "rows": [b.rows.0, b.rows.1],
                "frequency": json_float(b.frequency),
                "physical_frequency": json_float(*w),
                "orientation": b.orientation,
            })
        })
        .collect();
    let warnings: Vec<Value> = dec
        .warnings()
        .iter()
        .map(|w| match w {
            DecompositionWarning::DegenerateFrequencies { blocks, frequency } => {
                json!({ "degenerate_frequencies": { "blocks": blocks, "frequency": json_float(*frequency) } })
            }
        })
        .collect();
    let json = json!({
        "o": matrix_json(dec.o()),
        "determinant": json_float(dec.o().determinant()),
        "blocks": blocks,
        "trivial": dec.trivial(),
        "h0_scale": json_float(loaded.model.h0_scale()),
        "max_reconstruction_error": json_float(worst),
        "warnings": warnings,
    });
    Ok(Outcome {
        report: Report::structured(json),
        input_hash: Some(loaded.input_hash.clone()),
        seed: None,
        resolved: json!({ "model_source": loaded.source }),
    })
}

pub fn coeffs(args: &EvalArgs) -> CliResult<Outcome> {
    let p = pipeline(args)?;
    let physical = p.decomposition.physical_frequencies(p.loaded.model.h0_scale());
    let mut table = Table::new(&["block", "frequency", "physical_frequency", "d", "gamma", "f", "omega_shift_sq"]);
    let opt = |x: Option<f64>| x.map(Cell::Num).unwrap_or_else(|| Cell::from("none"));
    for (k, ((b, c), w)) in p
        .decomposition
        .blocks()
        .iter()
        .zip(&p.coefficients.blocks)
        .zip(&physical)
        .enumerate()
    {
        table.push(vec![
            k.into(),
            b.frequency.into(),
            (*w).into(),
            c.d.into(),
            c.gamma.into(),
            opt(c.f),
            opt(c.omega_shift_sq),
        ]);
    }
    let d_zero = match p.coefficients.d_zero {
        ZeroMode::Finite(x) => json_float(x),
        ZeroMode::Divergent => Value::from("divergent"),
    };
    let zero = json!({
        "d_zero": d_zero,
        "zero_shift_sq": p.coefficients.zero_shift_sq.map(json_float),
    });
    let mut report = Report::tabular(table, Some(("zero_mode", zero)));
    report.default_format = Format::Csv;
    Ok(Outcome {
        resolved: resolved_source(&p),
        report,
        input_hash: Some(p.loaded.input_hash.clone()),
        seed: None,
    })
}

pub fn optimizer_config(args: &MinimizeArgs) -> OptimizerConfig {
    OptimizerConfig {
        starts: args.starts,
        max_iter: args.max_iter,
        tol_grad: args.tol_grad,
        seed: args.seed,
    }
}

/// Sieve result as JSON `{best_value, best_state, histogram, ...}`.
pub fn run_minimize(p: &Pipeline, config: OptimizerConfig) -> CliResult<Report> {
    let dim = p.loaded.model.dim_rep();
    let res = minimize(p.entropy.functional(), dim, config)?;
    Ok(Report::structured(json!({
        "best_value": json_float(res.best_value),
        "units": p.source.units(),
        "best_state": amplitudes_json(res.best_state.amplitudes()),
        "histogram": res.value_histogram.iter().map(|v| json_float(*v)).collect::<Vec<_>>(),
        "starts": res.starts,
        "converged_runs": res.converged_runs,
    })))
}

pub fn minimize_cmd(args: &MinimizeArgs) -> CliResult<Outcome> {
    let p = pipeline(&args.eval)?;
    let report = run_minimize(&p, optimizer_config(args))?;
    Ok(Outcome {
        report,
        input_hash: Some(p.loaded.input_hash.clone()),
        seed: Some(args.seed),
        resolved: resolved_source(&p),
    })
}

fn parse_pair(text: &str, what: &str) -> CliResult<(f64, f64)> {
    let mut it = text.split(',').map(|s| s.trim().parse::<f64>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(CliError::input(format!("--state {what}: expected two numbers, got {text:?}"))),
    }
}

fn initial_state(p: &Pipeline, spec: &str, seed: u64) -> CliResult<PureState<f64>> {
    let dim = p.loaded.model.dim_rep();
    if spec == "random" {
        return Ok(haar_random_state(dim, &mut ChaCha8Rng::seed_from_u64(seed)));
    }
    if spec == "sieve" {
        let res = minimize(
            p.entropy.functional(),
            dim,
            OptimizerConfig {
                seed,
                ..Default::default()
            },
        )?;
        return Ok(res.best_state);
    }
    if let Some(k) = spec.strip_prefix("basis:") {
        let k: usize = k
            .parse()
            .map_err(|_| CliError::input(format!("--state: bad basis index in {spec:?}")))?;
        if k >= dim {
            return Err(CliError::input(format!("--state: basis index {k} outside 0..{dim}")));
        }
        return Ok(PureState::basis(dim, k));
    }
    if let Some(rest) = spec.strip_prefix("coherent:") {
        let Source::Spin { j, omega } = p.loaded.source else {
            return Err(CliError::input("--state coherent: needs a spin preset"));
        };
        let (theta, phi) = parse_pair(rest, "coherent")?;
        let spin = SpinModel::new(pointer_sieve::spin::Spin::new(j)?, omega)?;
        return Ok(coherent_state(&spin, theta, phi));
    }
    if let Some(rest) = spec.strip_prefix("glauber:") {
        if !matches!(p.loaded.source, Source::Qbm { .. }) {
            return Err(CliError::input("--state glauber: needs the qbm preset"));
        }
        let (re, im) = parse_pair(rest, "glauber")?;
        return Ok(glauber_state(dim, cplx(re, im))?);
    }
    Err(CliError::input(format!("--state: unknown initial state {spec:?}")))
}

pub fn evolve(args: &EvolveArgs) -> CliResult<Outcome> {
    let p = pipeline(&args.eval)?;
    if !(args.t_end >= 0.0) || !(args.dt > 0.0) {
        return Err(CliError::input("--t-end must be nonnegative and --dt positive"));
    }
    let op = MasterOperator::new(&p.loaded.model, &p.decomposition, &p.coefficients)?;
    let psi = initial_state(&p, &args.state, args.seed)?;
    let cfg = IntegratorConfig {
        step_tol: args.step_tol,
        record_every: args.record_every.max(1),
    };
    let traj = integrate(&op, &density_matrix(&psi), args.t_end, args.dt, cfg)?;
    let flag_tol = 1e-12;
    let mut table = Table::new(&["t", "linear_entropy", "min_eigenvalue", "negative"]);
    for ((t, s), e) in traj.times.iter().zip(&traj.entropies).zip(&traj.min_eigenvalues) {
        table.push(vec![(*t).into(), (*s).into(), (*e).into(), usize::from(*e < -flag_tol).into()]);
    }
    let summary = json!({
        "positivity_violated": traj.positivity_violated(flag_tol),
        "max_trace_drift": json_float(traj.max_trace_drift()),
        "max_hermiticity_defect": json_float(traj.max_hermiticity_defect()),
        "initial_state": amplitudes_json(psi.amplitudes()),
    });
    Ok(Outcome {
        report: Report::tabular(table, Some(("summary", summary))),
        input_hash: Some(p.loaded.input_hash.clone()),
        seed: Some(args.seed),
        resolved: resolved_source(&p),
    })
}

pub fn spin1(gamma_over_d: f64) -> CliResult<Outcome> {
    let sol = spin1_solve(gamma_over_d)?;
    let obs = spin1_observables(&sol.state)?;
    let json = json!({
        "gamma_over_d": json_float(sol.gamma_over_d),
        "mu0": json_float(sol.mu0),
        "r": json_float(sol.r),
        "q_sq": json_float(sol.q_sq),
        "k": json_float(sol.k),
        "min_value": json_float(sol.min_value),
        "state": amplitudes_json(sol.state.amplitudes()),
        "observables": {
            "jz_mean": json_float(obs.jz_mean),
            "var_jx": json_float(obs.var_jx),
            "var_jy": json_float(obs.var_jy),
        },
    });
    Ok(Outcome {
        report: Report::structured(json),
        input_hash: None,
        seed: None,
        resolved: Value::Null,
    })
}

/// Rows `{gamma_over_d, mu0, r, min_value, amplitudes}` on an even grid.
pub fn run_sweep(points: usize) -> CliResult<Report> {
    let rows = spin1_sweep::<f64>(points)?;
    let mut table = Table::new(&[
        "gamma_over_d", "mu0", "r", "min_value", "re_p1", "im_p1", "re_0", "im_0", "re_m1", "im_m1",
    ]);
    for s in rows {
        let a = s.state.amplitudes();
        table.push(vec![
            s.gamma_over_d.into(),
            s.mu0.into(),
            s.r.into(),
            s.min_value.into(),
            a[0].re.into(),
            a[0].im.into(),
            a[1].re.into(),
            a[1].im.into(),
            a[2].re.into(),
            a[2].im.into(),
        ]);
    }
    Ok(Report::tabular(table, None))
}

/// Values at `n_samples` seeded Haar states plus summary rows: the empirical
/// minimum and, for spin presets under a `γ/D` source, the coherent and (spin
/// 1) pointer reference lines.
pub fn run_scatter(p: &Pipeline, n_samples: usize, seed: u64) -> CliResult<Report> {
    let dim = p.loaded.model.dim_rep();
    let values = haar_scatter(p.entropy.functional(), dim, n_samples, seed);
    let mut table = Table::new(&["sample_id", "value"]);
    for (k, v) in values.iter().enumerate() {
        table.push(vec![k.into(), (*v).into()]);
    }
    let mut summary = serde_json::Map::new();
    let mut extra_rows: Vec<Vec<Cell>> = Vec::new();
    if !values.is_empty() {
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        summary.insert("empirical_min".into(), json_float(min));
        extra_rows.push(vec!["empirical_min".into(), min.into()]);
        if let (Some(spin), CoefficientSource::Ratio { gamma_over_d, .. }) = (p.loaded.spin(), &p.source) {
            let x = if p.options.regime == Regime::HighTemperature { 0.0 } else { *gamma_over_d };
            let coherent = coherent_minimum(spin.j(), x).value;
            summary.insert("reference_coherent".into(), json_float(coherent));
            extra_rows.push(vec!["reference_coherent".into(), coherent.into()]);
            if spin.twice_j() == 2 {
                let pointer = spin1_solve(x)?.min_value;
                summary.insert("reference_pointer".into(), json_float(pointer));
                extra_rows.push(vec!["reference_pointer".into(), pointer.into()]);
            }
        }
    }
    let mut json_out = serde_json::Map::new();
    json_out.insert("rows".into(), table.to_json());
    json_out.insert("summary".into(), Value::Object(summary));
    json_out.insert("units".into(), Value::from(p.source.units()));
    let mut csv_table = table;
    csv_table.rows.extend(extra_rows);
    Ok(Report {
        json: Value::Object(json_out),
        table: Some(csv_table),
        default_format: Format::Csv,
    })
}

pub fn scatter(args: &ScatterArgs) -> CliResult<Outcome> {
    let p = pipeline(&args.eval)?;
    let report = run_scatter(&p, args.samples, args.seed)?;
    Ok(Outcome {
        report,
        input_hash: Some(p.loaded.input_hash.clone()),
        seed: Some(args.seed),
        resolved: resolved_source(&p),
    })
}

pub fn qbm(args: &QbmArgs) -> CliResult<Outcome> {
    let osc = oscillator_model(args.omega, args.n_trunc)?;
    let rows = family_table(&osc, args.d)?;
    let mut table = Table::new(&["state", "value", "ratio_to_vacuum", "expected_ratio"]);
    for r in rows {
        table.push(vec![r.label.into(), r.value.into(), r.ratio.into(), r.expected_ratio.into()]);
    }
    let trunc = json!({
        "leading_residual": json_float(osc.truncation_report().leading_residual),
        "edge_residual": json_float(osc.truncation_report().edge_residual),
    });
    Ok(Outcome {
        report: Report::tabular(table, Some(("truncation", trunc))),
        input_hash: None,
        seed: None,
        resolved: Value::Null,
    })
}
