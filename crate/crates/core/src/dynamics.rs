//! Cross-checks on the averaged functional: direct time averaging of the
//! instantaneous rate, and a constant-coefficient master-equation integrator.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::adjoint::AdjointDecomposition;
use crate::algebra::LieModel;
use crate::bath::{BathCoefficients, Moments};
use crate::error::{Error, Result};
use crate::functional::covariance;
use crate::linalg::{anticommutator, combine, commutator, hermitian_defect, CMat};
use crate::scalar::{cplx, creal, lit, to_f64, Real, C};
use crate::state::PureState;

/// `D_jk = ∫ν R_jk(−τ)` and `γ_jk = ∫η R_jk(−τ)` from the spectrum of
/// `i·s·F` (`R(−τ) = exp(τ s F)`), without the block decomposition.
pub fn dissipation_matrices<T: Real>(
    model: &LieModel<T>,
    moments: &dyn Fn(T) -> Result<Moments<T>>,
) -> Result<(DMatrix<T>, DMatrix<T>)> {
    let n = model.dim_algebra();
    let f = model.structure_constants().ad_real(n - 1) * model.h0_scale();
    let herm: CMat<T> = f.map(|x| cplx(T::zero(), x));
    let eig = SymmetricEigen::new(herm);
    let mut dn = Vec::with_capacity(n);
    let mut gn = Vec::with_capacity(n);
    for &lam in eig.eigenvalues.iter() {
        // exp(τ s F) = V e^{-iλτ} V†
        let m = moments(lam.abs())?;
        dn.push(cplx(m.d, lam * m.f));
        gn.push(cplx(-m.omega_shift_sq, -lam * m.gamma));
    }
    let v = &eig.eigenvectors;
    let d = v * CMat::from_diagonal(&DVector::from_vec(dn)) * v.adjoint();
    let g = v * CMat::from_diagonal(&DVector::from_vec(gn)) * v.adjoint();
    Ok((d.map(|z| z.re), g.map(|z| z.re)))
}

/// Moments lookup backed by per-block coefficients.
pub fn coefficient_moments<T: Real>(coefficients: &BathCoefficients<T>) -> impl Fn(T) -> Result<Moments<T>> + '_ {
    move |w| coefficients.moments_at(w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragingConfig {
    /// Window length in periods of the slowest nonzero frequency.
    pub periods: f64,
    /// Samples per period of the fastest harmonic `2 ω_max`.
    pub samples_per_period: usize,
}

impl Default for AveragingConfig {
    fn default() -> Self {
        Self {
            periods: 1000.0,
            samples_per_period: 16,
        }
    }
}

/// Trapezoid average over `[0, T_avg]` of
/// `ṡ/2 = aᵀ(R C Rᵀ)(Dᵀa) + (γᵀa)ᵀ G (R⟨X⟩)`, `G_km = Σ_l a_l f_lkm`,
/// with `C` and `⟨X⟩` frozen at the initial state and `R(t) = exp(−t s F)`.
/// The window is stretched to a whole number of common periods when the
/// frequencies are commensurate within `1e-6`.
pub fn averaged_rate_oracle<T: Real>(
    state: &PureState<T>,
    model: &LieModel<T>,
    coefficients: &BathCoefficients<T>,
    config: AveragingConfig,
) -> Result<T> {
    let n = model.dim_algebra();
    let a = model.coupling();
    if a.iter().all(|x| *x == T::zero()) {
        return Ok(T::zero());
    }
    let lookup = coefficient_moments(coefficients);
    let (d, g) = dissipation_matrices(model, &lookup)?;
    let f = model.structure_constants();
    let sf = f.ad_real(n - 1) * model.h0_scale();
    let c = covariance(state, model.generators());
    let means = DVector::from_iterator(n, model.generators().iter().map(|x| state.expect(x)));
    let dta = d.transpose() * a;
    let gta = g.transpose() * a;
    let big_g = DMatrix::from_fn(n, n, |k, m| (0..n).fold(T::zero(), |s, l| s + a[l] * f.get(l, k, m)));

    let freqs: Vec<f64> = SymmetricEigen::new(sf.map(|x| cplx(T::zero(), x)))
        .eigenvalues
        .iter()
        .map(|l| to_f64(l.abs()))
        .filter(|w| *w > 1e-12)
        .collect();
    let (t_avg, dt) = if freqs.is_empty() {
        (1.0, 1.0)
    } else {
        let w_min = freqs.iter().cloned().fold(f64::INFINITY, f64::min);
        let w_max = freqs.iter().cloned().fold(0.0, f64::max);
        let mut t_avg = config.periods * 2.0 * PI / w_min;
        if let Some(common) = common_period(&freqs) {
            t_avg = (t_avg / common).ceil() * common;
        }
        let dt_target = 2.0 * PI / (2.0 * w_max) / config.samples_per_period.max(3) as f64;
        let steps = (t_avg / dt_target).ceil();
        (t_avg, t_avg / steps)
    };
    let steps = (t_avg / dt).round() as usize;
    let step = (-sf * lit::<T>(dt)).exp();
    let mut r = DMatrix::<T>::identity(n, n);
    let mut total = T::zero();
    for k in 0..=steps {
        let term1 = a.dot(&((&r * &c * r.transpose()) * &dta));
        let term2 = gta.dot(&(&big_g * (&r * &means)));
        let w = if k == 0 || k == steps { lit::<T>(0.5) } else { T::one() };
        total += (term1 + term2) * w;
        r = &step * r;
    }
    Ok(total / lit(steps.max(1) as f64))
}

/// Smallest `T` with every `ω_i T / 2π` integral (within `1e-6`), if any
/// exists with modest denominators.
fn common_period(freqs: &[f64]) -> Option<f64> {
    let base = freqs.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut denom = 1u64;
    for &w in freqs {
        let ratio = w / base;
        let q = (1..=64u64).find(|&q| {
            let p = (ratio * q as f64).round();
            (ratio * q as f64 - p).abs() <= 1e-6 * q as f64
        })?;
        denom = lcm(denom, q);
    }
    Some(2.0 * PI / base * denom as f64)
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// `ρ̇ = −i[H, ρ] − [A, [B, ρ]] + i[A, {Γ, ρ}]` with `H = s X_N`,
/// `B = Σ_k (Dᵀa)_k X_k`, `Γ = Σ_k (γᵀa)_k X_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterOperator<T: Real> {
    hamiltonian: CMat<T>,
    a: CMat<T>,
    b: CMat<T>,
    c: CMat<T>,
    d_matrix: DMatrix<T>,
    gamma_matrix: DMatrix<T>,
}

impl<T: Real> MasterOperator<T> {
    /// Coefficient matrices assembled block by block:
    /// `D^{(α)} = [[D, σωf], [−σωf, D]]`, `γ^{(α)} = [[−Ω̃², −σγω], [σγω, −Ω̃²]]`,
    /// and `D₀`, `−Ω̃²(0)` on the fixed directions.
    pub fn new(model: &LieModel<T>, decomposition: &AdjointDecomposition<T>, coefficients: &BathCoefficients<T>) -> Result<Self> {
        let n = model.dim_algebra();
        if decomposition.dim() != n || coefficients.blocks.len() != decomposition.blocks().len() {
            return Err(Error::Shape("decomposition and coefficients do not match the model".into()));
        }
        let mut d = DMatrix::<T>::zeros(n, n);
        let mut g = DMatrix::<T>::zeros(n, n);
        for (blk, coef) in decomposition.blocks().iter().zip(&coefficients.blocks) {
            let (i, j) = blk.rows;
            let sigma: T = if blk.orientation < 0 { -T::one() } else { T::one() };
            let w = coef.frequency;
            let fa = coef.f.ok_or(Error::NoCutoff("anomalous diffusion f_alpha"))?;
            let shift = coef.omega_shift_sq.ok_or(Error::NoCutoff("frequency shift"))?;
            d[(i, i)] = coef.d;
            d[(j, j)] = coef.d;
            d[(i, j)] = sigma * w * fa;
            d[(j, i)] = -sigma * w * fa;
            g[(i, i)] = -shift;
            g[(j, j)] = -shift;
            g[(i, j)] = -sigma * coef.gamma * w;
            g[(j, i)] = sigma * coef.gamma * w;
        }
        let a = model.coupling();
        let o = decomposition.o();
        let a_rot = o * a;
        let coupled_fixed = decomposition.trivial().iter().any(|&t| a_rot[t] != T::zero());
        if coupled_fixed {
            let d0 = coefficients.d_zero.value()?;
            let s0 = coefficients.zero_shift_sq.ok_or(Error::NoCutoff("zero-frequency shift"))?;
            for &t in decomposition.trivial() {
                d[(t, t)] = d0;
                g[(t, t)] = -s0;
            }
        }
        let d = o.transpose() * d * o;
        let g = o.transpose() * g * o;
        Ok(Self::from_matrices(model, d, g))
    }

    pub fn from_matrices(model: &LieModel<T>, d: DMatrix<T>, gamma: DMatrix<T>) -> Self {
        let a = model.coupling();
        let gens = model.generators();
        let dta: Vec<T> = (d.transpose() * a).iter().cloned().collect();
        let gta: Vec<T> = (gamma.transpose() * a).iter().cloned().collect();
        Self {
            hamiltonian: model.hamiltonian(),
            a: model.coupling_operator(),
            b: combine(&dta, gens),
            c: combine(&gta, gens),
            d_matrix: d,
            gamma_matrix: gamma,
        }
    }

    pub fn d_matrix(&self) -> &DMatrix<T> {
        &self.d_matrix
    }

    pub fn gamma_matrix(&self) -> &DMatrix<T> {
        &self.gamma_matrix
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    /// Dissipative part only.
    pub fn dissipator(&self, rho: &CMat<T>) -> CMat<T> {
        let i = cplx(T::zero(), T::one());
        -commutator(&self.a, &commutator(&self.b, rho)) + commutator(&self.a, &anticommutator(&self.c, rho)) * i
    }

    /// Full generator.
    pub fn apply(&self, rho: &CMat<T>) -> CMat<T> {
        let mi = cplx(T::zero(), -T::one());
        commutator(&self.hamiltonian, rho) * mi + self.dissipator(rho)
    }
}

pub fn linear_entropy<T: Real>(rho: &CMat<T>) -> T {
    T::one() - (rho * rho).trace().re
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<CMat<T>>,
    pub entropies: Vec<T>,
    /// Smallest eigenvalue of `ρ(t)`; negative values flag loss of positivity.
    pub min_eigenvalues: Vec<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn positivity_violated(&self, tol: T) -> bool {
        self.min_eigenvalues.iter().any(|&e| e < -tol)
    }

    pub fn max_trace_drift(&self) -> T {
        self.states
            .iter()
            .fold(T::zero(), |m, r| m.max((r.trace() - creal(T::one())).norm_sqr().sqrt()))
    }

    pub fn max_hermiticity_defect(&self) -> T {
        self.states.iter().fold(T::zero(), |m, r| m.max(hermitian_defect(r)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Step-doubling error estimate allowed per step.
    pub step_tol: f64,
    /// Record every `record_every`-th step (the final step is always kept).
    pub record_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step_tol: 1e-8,
            record_every: 1,
        }
    }
}

struct FreeEvolution<T: Real> {
    vectors: CMat<T>,
    energies: Vec<T>,
}

impl<T: Real> FreeEvolution<T> {
    fn new(h: &CMat<T>) -> Self {
        let eig = SymmetricEigen::new(h.clone());
        Self {
            vectors: eig.eigenvectors,
            energies: eig.eigenvalues.iter().cloned().collect(),
        }
    }

    /// `e^{−iHt}`
    fn unitary(&self, t: T) -> CMat<T> {
        let phases = DVector::from_iterator(
            self.energies.len(),
            self.energies.iter().map(|e| {
                let (s, c) = (*e * t).sin_cos();
                cplx(c, -s)
            }),
        );
        &self.vectors * CMat::from_diagonal(&phases) * self.vectors.adjoint()
    }
}

/// Interaction-picture RK4 with the free part exact; each step is checked
/// against two half steps.
pub fn integrate<T: Real>(
    op: &MasterOperator<T>,
    rho0: &CMat<T>,
    t_end: T,
    dt: T,
    config: IntegratorConfig,
) -> Result<Trajectory<T>> {
    if !(dt > T::zero()) || !(t_end >= T::zero()) {
        return Err(Error::Shape("time step and horizon must be positive".into()));
    }
    let free = FreeEvolution::new(&op.hamiltonian);
    let rhs = |t: T, rho_i: &CMat<T>| -> CMat<T> {
        let u = free.unitary(t);
        let rho = &u * rho_i * u.adjoint();
        u.adjoint() * op.dissipator(&rho) * u
    };
    let rk4 = |t: T, y: &CMat<T>, h: T| -> CMat<T> {
        let half = h * lit(0.5);
        let k1 = rhs(t, y);
        let k2 = rhs(t + half, &(y + &k1 * creal(half)));
        let k3 = rhs(t + half, &(y + &k2 * creal(half)));
        let k4 = rhs(t + h, &(y + &k3 * creal(h)));
        y + (k1 + (k2 + k3) * creal(lit(2.0)) + k4) * creal(h / lit(6.0))
    };
    let steps = (to_f64(t_end / dt)).ceil().max(0.0) as usize;
    let h = if steps == 0 { T::zero() } else { t_end / lit(steps as f64) };
    let tol: T = lit(config.step_tol);
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        entropies: Vec::new(),
        min_eigenvalues: Vec::new(),
    };
    let record = |t: T, rho_i: &CMat<T>, traj: &mut Trajectory<T>| {
        let u = free.unitary(t);
        let rho = &u * rho_i * u.adjoint();
        traj.entropies.push(linear_entropy(&rho));
        let herm = crate::linalg::hermitize(&rho);
        let min_ev = SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .cloned()
            .fold(T::one() / T::zero(), |m, e| m.min(e));
        traj.min_eigenvalues.push(min_ev);
        traj.times.push(t);
        traj.states.push(rho);
    };
    let mut y = rho0.clone();
    record(T::zero(), &y, &mut traj);
    let mut failures = 0;
    for k in 0..steps {
        let t = h * lit(k as f64);
        let big = rk4(t, &y, h);
        let half = h * lit(0.5);
        let mid = rk4(t, &y, half);
        let small = rk4(t + half, &mid, half);
        let err = max_abs(&(&big - &small)) / lit(15.0);
        if err > tol {
            failures += 1;
            if failures >= 3 {
                return Err(Error::StepTooLarge {
                    error: to_f64(err),
                    time: to_f64(t),
                });
            }
        } else {
            failures = 0;
        }
        y = small;
        if (k + 1) % config.record_every.max(1) == 0 || k + 1 == steps {
            record(t + h, &y, &mut traj);
        }
    }
    Ok(traj)
}

fn max_abs<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z: &C<T>| acc.max(z.norm_sqr().sqrt()))
}

pub fn density_matrix<T: Real>(state: &PureState<T>) -> CMat<T> {
    let v = state.amplitudes();
    v * v.adjoint()
}
