//! Model-file parsing, presets, and the coefficient source.

use std::path::Path;

use nalgebra::DVector;
use pointer_sieve::adjoint::{build_ad_matrix, canonical_decomposition, AdjointDecomposition};
use pointer_sieve::algebra::{move_h0_last, normalize_basis, CommutatorCheck, LieModel, ScaleReport, StructureConstants};
use pointer_sieve::bath::{Bath, BathCoefficients, BathKind, Beta, Cutoff, SpectralDensity};
use pointer_sieve::functional::{EntropyModel, EntropyOptions};
use pointer_sieve::linalg::CMat;
use pointer_sieve::qbm::oscillator_model;
use pointer_sieve::scalar::cplx;
use pointer_sieve::spin::{Spin, SpinModel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// On-disk model description. Matrices are row-major, entries `[re, im]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub dim_algebra: usize,
    pub dim_rep: usize,
    pub generators: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default)]
    pub structure_constants: Option<Vec<Vec<Vec<f64>>>>,
    pub coupling: Vec<f64>,
    pub h0_index: usize,
    #[serde(default)]
    pub h0_scale: Option<f64>,
    #[serde(default)]
    pub assume_orthogonal_adjoint: bool,
    /// Check commutators only on the leading `k x k` block.
    #[serde(default)]
    pub leading_subspace: Option<usize>,
    #[serde(default)]
    pub bath: Option<BathSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSpec {
    pub family: String,
    pub s: f64,
    pub lambda: f64,
    #[serde(default)]
    pub cutoff: Option<CutoffSpec>,
    pub beta: BetaSpec,
    pub kind: KindSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum CutoffSpec {
    Exp { omega_c: f64 },
    Hard { omega_c: f64 },
    None,
}

/// A number, or `"inf"` for zero temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaSpec {
    Value(f64),
    Marker(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindSpec {
    Oscillator,
    Spin,
}

impl BetaSpec {
    pub fn parse(text: &str) -> CliResult<Self> {
        match text.trim() {
            "inf" | "infinity" => Ok(BetaSpec::Marker("inf".into())),
            t => t
                .parse::<f64>()
                .map(BetaSpec::Value)
                .map_err(|_| CliError::input(format!("--beta: expected a number or \"inf\", got {t:?}"))),
        }
    }

    fn resolve(&self) -> CliResult<Beta<f64>> {
        match self {
            BetaSpec::Value(b) => Ok(Beta::Finite(*b)),
            BetaSpec::Marker(m) if m == "inf" || m == "infinity" => Ok(Beta::Infinite),
            BetaSpec::Marker(m) => Err(CliError::input(format!("bath.beta: expected a number or \"inf\", got {m:?}"))),
        }
    }
}

impl BathSpec {
    pub fn build(&self) -> CliResult<Bath<f64>> {
        if self.family != "power" {
            return Err(CliError::input(format!(
                "bath.family: only \"power\" is supported, got {:?}",
                self.family
            )));
        }
        let cutoff = match self.cutoff.unwrap_or(CutoffSpec::None) {
            CutoffSpec::Exp { omega_c } => Cutoff::Exponential(omega_c),
            CutoffSpec::Hard { omega_c } => Cutoff::Hard(omega_c),
            CutoffSpec::None => Cutoff::None,
        };
        let kind = match self.kind {
            KindSpec::Oscillator => BathKind::Oscillator,
            KindSpec::Spin => BathKind::Spin,
        };
        Ok(Bath::new(
            SpectralDensity::power_law(self.s, self.lambda, cutoff)?,
            self.beta.resolve()?,
            kind,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    File { path: String },
    Spin { j: f64, omega: f64 },
    Qbm { omega: f64, n_trunc: usize },
}

/// A validated, normalized model with `H0` in the last slot.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub source: Source,
    pub model: LieModel<f64>,
    pub scale: ScaleReport<f64>,
    pub bath: Option<BathSpec>,
    /// `sha256:<hex>` of the model file bytes, or of the preset string.
    pub input_hash: String,
}

impl LoadedModel {
    pub fn spin(&self) -> Option<Spin> {
        match self.source {
            Source::Spin { j, .. } => Spin::new(j).ok(),
            _ => None,
        }
    }

    pub fn decomposition(&self) -> CliResult<AdjointDecomposition<f64>> {
        let n = self.model.dim_algebra();
        Ok(canonical_decomposition(&build_ad_matrix(&self.model, n - 1)?)?)
    }
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

pub fn load_model(spec: &str, omega: f64, n_trunc: usize, assume_orthogonal: bool) -> CliResult<LoadedModel> {
    if let Some(j) = spec.strip_prefix("spin:") {
        let j: f64 = j
            .parse()
            .map_err(|_| CliError::input(format!("--model: bad spin preset {spec:?}")))?;
        let spin = SpinModel::new(Spin::new(j)?, omega)?;
        let model = spin.preset_model()?;
        let (model, scale) = normalize_basis(&model, assume_orthogonal)?;
        return Ok(LoadedModel {
            source: Source::Spin { j, omega },
            model,
            scale,
            bath: None,
            input_hash: hash_bytes(format!("spin:{j};omega={omega}").as_bytes()),
        });
    }
    if spec == "qbm" {
        let osc = oscillator_model(omega, n_trunc)?;
        let (model, scale) = normalize_basis(osc.model(), true)?;
        return Ok(LoadedModel {
            source: Source::Qbm { omega, n_trunc },
            model,
            scale,
            bath: None,
            input_hash: hash_bytes(format!("qbm;omega={omega};n_trunc={n_trunc}").as_bytes()),
        });
    }
    let path = Path::new(spec);
    let bytes = std::fs::read(path).map_err(|e| CliError::input(format!("{spec}: {e}")))?;
    let file: ModelFile = serde_json::from_slice(&bytes).map_err(|e| CliError::input(format!("{spec}: {e}")))?;
    let (model, scale) = build_file_model(&file, assume_orthogonal)?;
    Ok(LoadedModel {
        source: Source::File { path: spec.to_string() },
        model,
        scale,
        bath: file.bath.clone(),
        input_hash: hash_bytes(&bytes),
    })
}

fn build_file_model(file: &ModelFile, assume_orthogonal: bool) -> CliResult<(LieModel<f64>, ScaleReport<f64>)> {
    let n = file.dim_algebra;
    let d = file.dim_rep;
    if n == 0 || d == 0 {
        return Err(CliError::input("dim_algebra and dim_rep must be positive"));
    }
    if file.generators.len() != n {
        return Err(CliError::input(format!(
            "generators: expected {n} matrices (dim_algebra), got {}",
            file.generators.len()
        )));
    }
    let mut generators = Vec::with_capacity(n);
    for (k, m) in file.generators.iter().enumerate() {
        if m.len() != d || m.iter().any(|row| row.len() != d) {
            return Err(CliError::input(format!("generators[{k}]: expected a {d}x{d} matrix")));
        }
        generators.push(CMat::from_fn(d, d, |i, j| cplx(m[i][j][0], m[i][j][1])));
    }
    if file.coupling.len() != n {
        return Err(CliError::input(format!(
            "coupling: expected {n} entries, got {}",
            file.coupling.len()
        )));
    }
    if file.h0_index >= n {
        return Err(CliError::input(format!("h0_index: {} out of range 0..{n}", file.h0_index)));
    }
    let mut structure = match &file.structure_constants {
        Some(f) => Some(
            StructureConstants::from_nested(f)
                .map_err(|e| CliError::input(format!("structure_constants: {e}")))?,
        ),
        None => None,
    };
    let mut coupling = file.coupling.clone();
    move_h0_last(&mut generators, &mut coupling, structure.as_mut(), file.h0_index);
    let coupling = DVector::from_vec(coupling);
    let check = match file.leading_subspace {
        Some(k) if k == 0 || k > d => {
            return Err(CliError::input(format!("leading_subspace: {k} out of range 1..={d}")));
        }
        Some(k) => CommutatorCheck::LeadingSubspace(k),
        None => CommutatorCheck::Full,
    };
    let model = match structure {
        Some(f) => LieModel::with_structure_constants(generators, f, coupling, check)?,
        None if file.leading_subspace.is_some() => {
            return Err(CliError::input(
                "leading_subspace requires explicit structure_constants",
            ));
        }
        None => LieModel::from_generators(generators, coupling)?,
    };
    let model = model.with_h0_scale(file.h0_scale.unwrap_or(1.0));
    Ok(normalize_basis(&model, assume_orthogonal || file.assume_orthogonal_adjoint)?)
}

/// Where the per-block coefficients come from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientSource {
    /// `D = 1` on every block, `γω/D = gamma_over_d`.
    Ratio { gamma_over_d: f64, default_for_preset: bool },
    Bath { bath: BathSpec },
}

impl CoefficientSource {
    pub fn resolve(
        loaded: &LoadedModel,
        bath_flag: Option<BathSpec>,
        beta: Option<BetaSpec>,
        gamma_over_d: Option<f64>,
    ) -> CliResult<Self> {
        if let Some(x) = gamma_over_d {
            if !(0.0..=1.0).contains(&x) {
                return Err(CliError::input(format!("--gamma-over-d: {x} outside [0, 1]")));
            }
            return Ok(CoefficientSource::Ratio {
                gamma_over_d: x,
                default_for_preset: false,
            });
        }
        match bath_flag.or_else(|| loaded.bath.clone()) {
            Some(mut bath) => {
                if let Some(b) = beta {
                    bath.beta = b;
                }
                Ok(CoefficientSource::Bath { bath })
            }
            None if !matches!(loaded.source, Source::File { .. }) => {
                if beta.is_some() {
                    return Err(CliError::input("--beta needs a bath (--bath or a model-file bath block)"));
                }
                Ok(CoefficientSource::Ratio {
                    gamma_over_d: 0.0,
                    default_for_preset: true,
                })
            }
            None => Err(CliError::input(
                "no bath: pass --bath, add a bath block to the model file, or use --gamma-over-d",
            )),
        }
    }

    /// `"s_bar/2D"` when `D = 1` on every block, else `"s_bar/2"`.
    pub fn units(&self) -> &'static str {
        match self {
            CoefficientSource::Ratio { .. } => "s_bar/2D",
            CoefficientSource::Bath { .. } => "s_bar/2",
        }
    }

    pub fn coefficients(&self, frequencies: &[f64]) -> CliResult<BathCoefficients<f64>> {
        Ok(match self {
            CoefficientSource::Ratio { gamma_over_d, .. } => {
                BathCoefficients::from_ratio(frequencies, 1.0, *gamma_over_d)
            }
            CoefficientSource::Bath { bath } => BathCoefficients::from_bath(&bath.build()?, frequencies),
        })
    }
}

/// Loads `--bath` as a path, or as inline JSON when it starts with `{`.
pub fn parse_bath_flag(text: &str) -> CliResult<BathSpec> {
    let body = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        std::fs::read_to_string(text).map_err(|e| CliError::input(format!("--bath {text}: {e}")))?
    };
    serde_json::from_str(&body).map_err(|e| CliError::input(format!("--bath: {e}")))
}

/// Everything the evaluation commands share.
pub struct Pipeline {
    pub loaded: LoadedModel,
    pub decomposition: AdjointDecomposition<f64>,
    pub source: CoefficientSource,
    pub coefficients: BathCoefficients<f64>,
    pub entropy: EntropyModel<f64>,
    pub options: EntropyOptions,
}

impl Pipeline {
    pub fn new(loaded: LoadedModel, source: CoefficientSource, options: EntropyOptions) -> CliResult<Self> {
        let decomposition = loaded.decomposition()?;
        let coefficients = source.coefficients(&decomposition.physical_frequencies(loaded.model.h0_scale()))?;
        let entropy = EntropyModel::new(&loaded.model, &decomposition, &coefficients, options)?;
        Ok(Self {
            loaded,
            decomposition,
            source,
            coefficients,
            entropy,
            options,
        })
    }
}
