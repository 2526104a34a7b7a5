//! Time-averaged linear-entropy production of a pure initial state.
//!
//! Every reported value is `s̄/2`. The quadratic part averages the diffusion
//! term over the free rotation; the linear part contracts the damping matrix
//! with the structure constants and keeps only the directions fixed by the
//! rotation.

use nalgebra::{DMatrix, DVector};

use crate::adjoint::AdjointDecomposition;
use crate::algebra::LieModel;
use crate::bath::BathCoefficients;
use crate::error::{Error, Result};
use crate::linalg::{combine, CMat, CVec};
use crate::scalar::{lit, Real};
use crate::state::PureState;

/// Coefficient of the damping term along `X_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaTermConvention {
    /// Exact average with `H₀ = h0_scale·X_N`: damping block entries
    /// `γ(ω_α) ω_α` at the physical frequency `ω_α = h0_scale·Ω_α`.
    #[default]
    Rescaled,
    /// `Σ_α ‖ã_α‖² Ω_α² γ_α` with the algebra frequency `Ω_α`, as in the
    /// general closed form. Equal to `Rescaled` when `h0_scale = 1`.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Regime {
    #[default]
    Full,
    /// Damping and frequency-shift terms dropped (`γ/D → 0`).
    HighTemperature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EntropyOptions {
    pub convention: GammaTermConvention,
    pub regime: Regime,
}

/// `Σ_k w_k Var(A_k) + Σ_m c_m ⟨B_m⟩ + constant`, the shape every
/// averaged entropy takes. `w_k ≥ 0`, operators Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFunctional<T: Real> {
    pub variances: Vec<(T, CMat<T>)>,
    pub linear: Vec<(T, CMat<T>)>,
}

impl<T: Real> QuadraticFunctional<T> {
    pub fn dim(&self) -> usize {
        self.variances
            .first()
            .or(self.linear.first())
            .map_or(0, |(_, m)| m.nrows())
    }

    pub fn evaluate_amplitudes(&self, psi: &CVec<T>) -> T {
        let mut total = T::zero();
        for (w, a) in &self.variances {
            let v = a * psi;
            let mean = psi.dotc(&v).re;
            total += *w * (v.norm_squared() - mean * mean);
        }
        for (c, b) in &self.linear {
            total += *c * psi.dotc(&(b * psi)).re;
        }
        total
    }

    pub fn evaluate(&self, state: &PureState<T>) -> T {
        self.evaluate_amplitudes(state.amplitudes())
    }

    /// Euclidean gradient on `C^d ≅ R^{2d}`:
    /// `2[Σ w (A² − 2⟨A⟩A) + Σ c B] ψ` (unit-norm `ψ` assumed).
    pub fn euclidean_gradient(&self, psi: &CVec<T>) -> CVec<T> {
        let two: T = lit(2.0);
        let mut g = CVec::<T>::zeros(psi.len());
        for (w, a) in &self.variances {
            let v = a * psi;
            let mean = psi.dotc(&v).re;
            let av = a * &v;
            g += (av - v * C_from(two * mean)) * C_from(*w);
        }
        for (c, b) in &self.linear {
            g += (b * psi) * C_from(*c);
        }
        g * C_from(two)
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            variances: vec![(T::zero(), CMat::<T>::zeros(dim, dim))],
            linear: Vec::new(),
        }
    }
}

#[allow(non_snake_case)]
fn C_from<T: Real>(x: T) -> crate::scalar::C<T> {
    crate::scalar::creal(x)
}

/// `C_mn = ⟨{X_m, X_n}⟩ − 2⟨X_m⟩⟨X_n⟩`.
pub fn covariance<T: Real>(state: &PureState<T>, generators: &[CMat<T>]) -> DMatrix<T> {
    let psi = state.amplitudes();
    let vs: Vec<CVec<T>> = generators.iter().map(|x| x * psi).collect();
    let means: Vec<T> = vs.iter().map(|v| psi.dotc(v).re).collect();
    let n = generators.len();
    let two: T = lit(2.0);
    DMatrix::from_fn(n, n, |m, k| {
        if m <= k {
            two * (vs[m].dotc(&vs[k]).re - means[m] * means[k])
        } else {
            two * (vs[k].dotc(&vs[m]).re - means[k] * means[m])
        }
    })
}

/// `Σ_j Var(X_j)`, the dispersion coherent states minimize.
pub fn invariant_dispersion<T: Real>(state: &PureState<T>, generators: &[CMat<T>]) -> T {
    generators.iter().fold(T::zero(), |acc, x| acc + state.variance(x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockTerm<T: Real> {
    pub block: usize,
    /// `‖ã_α‖²`
    pub weight: T,
    pub d: T,
    /// `ΔX̃²_{α0} + ΔX̃²_{α1}`
    pub variance_sum: T,
    pub linear_term: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroModeTerms<T: Real> {
    /// `2 D₀ Var(Σ_t ã_t X̃_t)` over the fixed directions `t`.
    pub diffusion: T,
    /// Damping contributions through the fixed directions' own entries
    /// (`−Ω̃²(0)`), keyed by the fixed direction whose mean they multiply.
    pub linear: Vec<(usize, T)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport<T: Real> {
    /// `s̄/2`
    pub total: T,
    pub per_block: Vec<BlockTerm<T>>,
    pub zero_mode: ZeroModeTerms<T>,
}

impl<T: Real> EntropyReport<T> {
    pub fn parts_sum(&self) -> T {
        let mut s = self.zero_mode.diffusion;
        for b in &self.per_block {
            s += b.weight * b.d * b.variance_sum + b.linear_term;
        }
        for (_, v) in &self.zero_mode.linear {
            s += *v;
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
struct BlockPlan<T: Real> {
    rows: (usize, usize),
    weight: T,
    d: T,
    /// coefficient of `⟨X̃_t⟩` for each fixed direction `t`
    linear: Vec<T>,
}

/// Precomputed averaged functional for one model, bath and decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyModel<T: Real> {
    rotated: Vec<CMat<T>>,
    a_rot: DVector<T>,
    blocks: Vec<BlockPlan<T>>,
    trivial: Vec<usize>,
    zero_diffusion: T,
    zero_operator: CMat<T>,
    zero_linear: Vec<T>,
    functional: QuadraticFunctional<T>,
}

fn negligible<T: Real>(x: T, scale: T) -> bool {
    x.abs() <= lit::<T>(1e-12) * scale.max(T::default_epsilon())
}

impl<T: Real> EntropyModel<T> {
    pub fn new(
        model: &LieModel<T>,
        decomposition: &AdjointDecomposition<T>,
        coefficients: &BathCoefficients<T>,
        options: EntropyOptions,
    ) -> Result<Self> {
        let n = model.dim_algebra();
        if decomposition.dim() != n {
            return Err(Error::Shape(format!(
                "decomposition has dimension {}, algebra {}",
                decomposition.dim(),
                n
            )));
        }
        if coefficients.blocks.len() != decomposition.blocks().len() {
            return Err(Error::Shape(format!(
                "{} block coefficients for {} rotation blocks",
                coefficients.blocks.len(),
                decomposition.blocks().len()
            )));
        }
        let o = decomposition.o();
        let a = model.coupling();
        let a_rot = o * a;
        let a_norm = a.norm();
        let rotated = decomposition.rotate_generators(model.generators());
        let trivial = decomposition.trivial().to_vec();
        let f = model.structure_constants();
        let full = options.regime == Regime::Full;

        // u^{(t)} = O g^{(t)},  g^{(t)}_k = Σ_l a_l Σ_m f_lkm O_tm
        let us: Vec<DVector<T>> = trivial
            .iter()
            .map(|&t| {
                let g = DVector::from_fn(n, |k, _| {
                    let mut s = T::zero();
                    for l in 0..n {
                        if a[l] == T::zero() {
                            continue;
                        }
                        for m in 0..n {
                            s += a[l] * f.get(l, k, m) * o[(t, m)];
                        }
                    }
                    s
                });
                o * g
            })
            .collect();

        let mut blocks = Vec::new();
        for (blk, coef) in decomposition.blocks().iter().zip(&coefficients.blocks) {
            let (i, j) = blk.rows;
            let (a0, a1) = (a_rot[i], a_rot[j]);
            let weight = a0 * a0 + a1 * a1;
            let sigma: T = if blk.orientation < 0 { -T::one() } else { T::one() };
            let mut linear = vec![T::zero(); trivial.len()];
            if full {
                for (ti, u) in us.iter().enumerate() {
                    let is_h0 = trivial[ti] == n - 1;
                    if is_h0 && options.convention == GammaTermConvention::AsPrinted {
                        linear[ti] = weight * blk.frequency * blk.frequency * coef.gamma;
                        continue;
                    }
                    let (u0, u1) = (u[i], u[j]);
                    let diag = a0 * u0 + a1 * u1;
                    let skew = a1 * u0 - a0 * u1;
                    let mut c = sigma * coef.gamma * coef.frequency * skew;
                    if !negligible(diag, a_norm * u.norm()) {
                        let shift = coef
                            .omega_shift_sq
                            .ok_or(Error::NoCutoff("frequency shift of a rotation block"))?;
                        c -= shift * diag;
                    }
                    linear[ti] = c;
                }
            }
            blocks.push(BlockPlan {
                rows: (i, j),
                weight,
                d: coef.d,
                linear,
            });
        }

        let a_t: Vec<T> = trivial.iter().map(|&t| a_rot[t]).collect();
        let has_zero_coupling = a_t.iter().any(|&x| !negligible(x, a_norm));
        let zero_diffusion = if has_zero_coupling {
            coefficients.d_zero.value()?
        } else {
            T::zero()
        };
        let zero_operator = {
            let ops: Vec<CMat<T>> = trivial.iter().map(|&t| rotated[t].clone()).collect();
            let d = model.dim_rep();
            if ops.is_empty() {
                CMat::<T>::zeros(d, d)
            } else {
                combine(&a_t, &ops)
            }
        };
        let mut zero_linear = vec![T::zero(); trivial.len()];
        if full {
            for (ti, u) in us.iter().enumerate() {
                if trivial[ti] == n - 1 && options.convention == GammaTermConvention::AsPrinted {
                    continue;
                }
                let diag = trivial
                    .iter()
                    .zip(&a_t)
                    .fold(T::zero(), |s, (&t, &at)| s + at * u[t]);
                if !negligible(diag, a_norm * u.norm()) {
                    let shift0 = coefficients
                        .zero_shift_sq
                        .ok_or(Error::NoCutoff("zero-frequency shift"))?;
                    zero_linear[ti] = -shift0 * diag;
                }
            }
        }

        let mut variances = Vec::new();
        for b in &blocks {
            let w = b.weight * b.d;
            if w != T::zero() {
                variances.push((w, rotated[b.rows.0].clone()));
                variances.push((w, rotated[b.rows.1].clone()));
            }
        }
        if zero_diffusion != T::zero() {
            variances.push((zero_diffusion * lit(2.0), zero_operator.clone()));
        }
        let mut coeff_t = vec![T::zero(); trivial.len()];
        for b in &blocks {
            for (ti, c) in b.linear.iter().enumerate() {
                coeff_t[ti] += *c;
            }
        }
        for (ti, c) in zero_linear.iter().enumerate() {
            coeff_t[ti] += *c;
        }
        let mut linear = Vec::new();
        if coeff_t.iter().any(|c| *c != T::zero()) {
            let ops: Vec<CMat<T>> = trivial.iter().map(|&t| rotated[t].clone()).collect();
            linear.push((T::one(), combine(&coeff_t, &ops)));
        }
        let functional = if variances.is_empty() && linear.is_empty() {
            QuadraticFunctional::zero(model.dim_rep())
        } else {
            QuadraticFunctional { variances, linear }
        };

        Ok(Self {
            rotated,
            a_rot,
            blocks,
            trivial,
            zero_diffusion,
            zero_operator,
            zero_linear,
            functional,
        })
    }

    pub fn functional(&self) -> &QuadraticFunctional<T> {
        &self.functional
    }

    pub fn rotated_generators(&self) -> &[CMat<T>] {
        &self.rotated
    }

    pub fn rotated_coupling(&self) -> &DVector<T> {
        &self.a_rot
    }

    /// `s̄/2` for the state.
    pub fn value(&self, state: &PureState<T>) -> T {
        self.functional.evaluate(state)
    }

    pub fn report(&self, state: &PureState<T>) -> EntropyReport<T> {
        let means: Vec<T> = self.trivial.iter().map(|&t| state.expect(&self.rotated[t])).collect();
        let per_block: Vec<BlockTerm<T>> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(k, b)| BlockTerm {
                block: k,
                weight: b.weight,
                d: b.d,
                variance_sum: state.variance(&self.rotated[b.rows.0]) + state.variance(&self.rotated[b.rows.1]),
                linear_term: b.linear.iter().zip(&means).fold(T::zero(), |s, (c, m)| s + *c * *m),
            })
            .collect();
        let diffusion = if self.zero_diffusion == T::zero() {
            T::zero()
        } else {
            self.zero_diffusion * lit(2.0) * state.variance(&self.zero_operator)
        };
        let linear = self
            .trivial
            .iter()
            .zip(&self.zero_linear)
            .zip(&means)
            .map(|((&t, c), m)| (t, *c * *m))
            .collect();
        let mut report = EntropyReport {
            total: T::zero(),
            per_block,
            zero_mode: ZeroModeTerms { diffusion, linear },
        };
        report.total = report.parts_sum();
        report
    }

    /// High-temperature metric in the rotated basis: `‖ã_α‖² D_α I₂` per
    /// block and `2 D₀ ã_T ã_Tᵀ` on the fixed directions.
    pub fn high_t_metric(&self) -> DMatrix<T> {
        let n = self.rotated.len();
        let mut g = DMatrix::<T>::zeros(n, n);
        for b in &self.blocks {
            let w = b.weight * b.d;
            g[(b.rows.0, b.rows.0)] = w;
            g[(b.rows.1, b.rows.1)] = w;
        }
        let two: T = lit(2.0);
        for &s in &self.trivial {
            for &t in &self.trivial {
                g[(s, t)] = two * self.zero_diffusion * self.a_rot[s] * self.a_rot[t];
            }
        }
        g
    }
}

/// One-shot evaluation; see [`EntropyModel`].
pub fn entropy_production<T: Real>(
    state: &PureState<T>,
    model: &LieModel<T>,
    decomposition: &AdjointDecomposition<T>,
    coefficients: &BathCoefficients<T>,
    options: EntropyOptions,
) -> Result<EntropyReport<T>> {
    Ok(EntropyModel::new(model, decomposition, coefficients, options)?.report(state))
}

/// See [`EntropyModel::high_t_metric`].
pub fn high_t_metric<T: Real>(
    model: &LieModel<T>,
    decomposition: &AdjointDecomposition<T>,
    coefficients: &BathCoefficients<T>,
) -> Result<DMatrix<T>> {
    let options = EntropyOptions {
        regime: Regime::HighTemperature,
        ..Default::default()
    };
    Ok(EntropyModel::new(model, decomposition, coefficients, options)?.high_t_metric())
}
