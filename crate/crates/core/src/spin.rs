//! Spin-j systems coupled through `J_x` with free Hamiltonian `Ω J_z`.

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::adjoint::{build_ad_matrix, canonical_decomposition, AdjointDecomposition};
use crate::algebra::{CommutatorCheck, LieModel, StructureConstants};
use crate::bath::BathCoefficients;
use crate::error::{Error, Result};
use crate::functional::{EntropyModel, EntropyOptions, Regime};
use crate::linalg::{CMat, CVec};
use crate::scalar::{cplx, creal, lit, to_f64, Real};
use crate::state::PureState;

/// Spin quantum number stored as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Spin(u32);

impl Spin {
    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !(twice >= 0.0) || (twice - twice.round()).abs() > 1e-12 || twice > 1e6 {
            return Err(Error::BadSpin(j));
        }
        Ok(Self(twice.round() as u32))
    }

    pub fn from_twice(twice_j: u32) -> Self {
        Self(twice_j)
    }

    pub fn j(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn twice_j(self) -> u32 {
        self.0
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }
}

/// `J_x, J_y, J_z` in the `J_z` eigenbasis ordered `m = j, j-1, …, -j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinModel<T: Real> {
    spin: Spin,
    generators: [CMat<T>; 3],
    omega: T,
}

pub fn spin_generators<T: Real>(j: f64) -> Result<SpinModel<T>> {
    SpinModel::new(Spin::new(j)?, T::one())
}

impl<T: Real> SpinModel<T> {
    pub fn new(spin: Spin, omega: T) -> Result<Self> {
        let d = spin.dim();
        let j: T = lit(spin.j());
        let mut jp = CMat::<T>::zeros(d, d);
        let mut jz = CMat::<T>::zeros(d, d);
        for k in 0..d {
            let m = j - lit(k as f64);
            jz[(k, k)] = creal(m);
            if k > 0 {
                // J+ |j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>
                jp[(k - 1, k)] = creal((j * (j + T::one()) - m * (m + T::one())).sqrt());
            }
        }
        let jm = jp.adjoint();
        let half = creal(lit::<T>(0.5));
        let jx = (&jp + &jm) * half;
        let jy = (&jp - &jm) * cplx(T::zero(), -lit::<T>(0.5));
        Ok(Self {
            spin,
            generators: [jx, jy, jz],
            omega,
        })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn jx(&self) -> &CMat<T> {
        &self.generators[0]
    }

    pub fn jy(&self) -> &CMat<T> {
        &self.generators[1]
    }

    pub fn jz(&self) -> &CMat<T> {
        &self.generators[2]
    }

    pub fn generators(&self) -> &[CMat<T>] {
        &self.generators
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn casimir(&self) -> CMat<T> {
        self.generators.iter().fold(CMat::<T>::zeros(self.dim(), self.dim()), |acc, g| acc + g * g)
    }

    /// Algebra model with `H₀ = Ω J_z` and coupling `A = a·J`.
    pub fn lie_model(&self, coupling: [T; 3]) -> Result<LieModel<T>> {
        Ok(LieModel::with_structure_constants(
            self.generators.to_vec(),
            StructureConstants::levi_civita(),
            DVector::from_column_slice(&coupling),
            CommutatorCheck::Full,
        )?
        .with_h0_scale(self.omega))
    }

    /// The spin-boson coupling `A = -J_x`.
    pub fn preset_model(&self) -> Result<LieModel<T>> {
        self.lie_model([-T::one(), T::zero(), T::zero()])
    }
}

/// `e^{iθ(sinφ J_x − cosφ J_y)} |j,−j⟩`.
pub fn coherent_state<T: Real>(spin: &SpinModel<T>, theta: T, phi: T) -> PureState<T> {
    let (s, c) = phi.sin_cos();
    let generator = (spin.jx() * creal(s) - spin.jy() * creal(c)) * cplx(T::zero(), theta);
    let u = generator.exp();
    let d = spin.dim();
    let lowest: CVec<T> = u.column(d - 1).into_owned();
    PureState::normalized(lowest).expect("unitary column is normalized")
}

/// `s̄/2D = j(1 − ½ sin²θ − (γ/D) cosθ)` for a coherent state.
pub fn coherent_entropy<T: Real>(j: T, theta: T, gamma_over_d: T) -> T {
    let s = theta.sin();
    j * (T::one() - lit::<T>(0.5) * s * s - gamma_over_d * theta.cos())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentMinimum<T: Real> {
    pub theta: T,
    pub value: T,
}

/// Minimizes [`coherent_entropy`] over `θ ∈ [0, π]` by bracketing on a grid
/// and bisecting the derivative `j sinθ (γ/D − cosθ)`.
pub fn coherent_minimum<T: Real>(j: T, gamma_over_d: T) -> CoherentMinimum<T> {
    let n = 2000;
    let pi: T = lit(PI);
    let at = |k: usize| pi * lit(k as f64 / n as f64);
    let mut best = 0;
    for k in 1..=n {
        if coherent_entropy(j, at(k), gamma_over_d) < coherent_entropy(j, at(best), gamma_over_d) {
            best = k;
        }
    }
    let slope = |t: T| j * t.sin() * (gamma_over_d - t.cos());
    let lo = at(best.saturating_sub(1));
    let hi = at((best + 1).min(n));
    let theta = if slope(lo) < T::zero() && slope(hi) > T::zero() {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = (a + b) * lit(0.5);
            if m <= a || m >= b {
                break;
            }
            if slope(m) < T::zero() {
                a = m;
            } else {
                b = m;
            }
        }
        (a + b) * lit(0.5)
    } else {
        at(best)
    };
    CoherentMinimum {
        theta,
        value: coherent_entropy(j, theta, gamma_over_d),
    }
}

/// The spin functional `s̄/2D = ΔJ_x² + ΔJ_y² + (γ/D)⟨J_z⟩` for coupling `−J_x`.
pub fn spin_entropy_model<T: Real>(spin: &SpinModel<T>, gamma_over_d: T, regime: Regime) -> Result<EntropyModel<T>> {
    let model = spin.preset_model()?;
    let dec = spin_decomposition(&model)?;
    let coeffs = BathCoefficients::from_ratio(&dec.physical_frequencies(model.h0_scale()), T::one(), gamma_over_d);
    EntropyModel::new(
        &model,
        &dec,
        &coeffs,
        EntropyOptions {
            regime,
            ..Default::default()
        },
    )
}

pub fn spin_decomposition<T: Real>(model: &LieModel<T>) -> Result<AdjointDecomposition<T>> {
    canonical_decomposition(&build_ad_matrix(model, model.dim_algebra() - 1)?)
}

/// Closed-form minimizer for spin 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Spin1Solution<T: Real> {
    pub gamma_over_d: T,
    pub mu0: T,
    pub r: T,
    /// `|q|²`, weight on `|1,1⟩`.
    pub q_sq: T,
    /// Ratio of the `|1,−1⟩` and `|1,1⟩` amplitudes (infinite at `μ₀ = γ/D`).
    pub k: T,
    /// Canonical member (real amplitudes, phase ψ = 0) of the U(1) family.
    pub state: PureState<T>,
    pub min_value: T,
}

/// Real roots of `2μ³ − 3μ² + x² = 0` for `x ∈ [0, 1]`, Newton-polished.
pub fn spin1_cubic_roots<T: Real>(x: T) -> [T; 3] {
    let half: T = lit(0.5);
    let third: T = lit(1.0 / 3.0);
    let arg = (T::one() - lit::<T>(2.0) * x * x).max(-T::one()).min(T::one());
    let base = arg.acos() * third;
    let two_pi_3: T = lit(2.0 * PI / 3.0);
    let mut roots = [0, 1, 2].map(|k| half + (base - two_pi_3 * lit(k as f64)).cos());
    for mu in roots.iter_mut() {
        for _ in 0..3 {
            let p = lit::<T>(2.0) * *mu * *mu * *mu - lit::<T>(3.0) * *mu * *mu + x * x;
            let dp = lit::<T>(6.0) * *mu * *mu - lit::<T>(6.0) * *mu;
            if dp.abs() > lit(1e-6) {
                let step = p / dp;
                *mu -= step;
            }
        }
    }
    roots
}

/// `(1/4μ)[μ³ − 3μ² + (4 − x²)μ − x²]`.
pub fn spin1_value<T: Real>(x: T, mu: T) -> T {
    (mu * mu * mu - lit::<T>(3.0) * mu * mu + (lit::<T>(4.0) - x * x) * mu - x * x) / (lit::<T>(4.0) * mu)
}

pub fn spin1_solve<T: Real>(gamma_over_d: T) -> Result<Spin1Solution<T>> {
    let x = gamma_over_d;
    if !(x >= T::zero() && x <= T::one()) {
        return Err(Error::OutOfRange(to_f64(x)));
    }
    let slack: T = lit(1e-12);
    let mut best: Option<(T, T, T)> = None;
    for mu in spin1_cubic_roots(x) {
        if mu <= slack || mu < x - slack {
            continue;
        }
        let r_sq = ((mu * mu - x * x) / (lit::<T>(4.0) * mu)).max(T::zero());
        if r_sq > T::one() + slack {
            continue;
        }
        let v = spin1_value(x, mu);
        if best.map_or(true, |(_, _, b)| v < b) {
            best = Some((mu, r_sq, v));
        }
    }
    let (mu0, r_sq, min_value) = best.ok_or(Error::OutOfRange(to_f64(x)))?;
    let r = r_sq.sqrt();
    let (q, s, k) = if (x - mu0).abs() < lit(1e-9) {
        (T::zero(), (T::one() - r_sq).max(T::zero()).sqrt(), T::infinity())
    } else {
        let k = (x + mu0) / (x - mu0);
        let diff = x - mu0;
        let u = (lit::<T>(0.5) * diff * diff / (x * x + mu0 * mu0) * (T::one() - r_sq)).sqrt();
        (u, -k * u, k)
    };
    let amps = DVector::from_vec(vec![creal(q), creal(r), creal(s)]);
    Ok(Spin1Solution {
        gamma_over_d: x,
        mu0,
        r,
        q_sq: q * q,
        k,
        state: PureState::normalized(amps)?,
        min_value,
    })
}

trait Infinity {
    fn infinity() -> Self;
}

impl<T: Real> Infinity for T {
    fn infinity() -> Self {
        T::one() / T::zero()
    }
}

/// [`spin1_solve`] on `points` equally spaced values of `γ/D` in `[0, 1]`.
pub fn spin1_sweep<T: Real>(points: usize) -> Result<Vec<Spin1Solution<T>>> {
    if points < 2 {
        return Err(Error::Shape(format!("sweep needs at least 2 points, got {points}")));
    }
    (0..points)
        .map(|k| {
            let x = if k + 1 == points {
                T::one()
            } else {
                lit::<T>(k as f64) / lit((points - 1) as f64)
            };
            spin1_solve(x)
        })
        .collect()
}

/// `max_φ |⟨reference| e^{iφJ_z} |state⟩|²`, the fidelity modulo the U(1)
/// symmetry of the spin functional. Returns the fidelity and the angle.
pub fn u1_aligned_fidelity<T: Real>(spin: &SpinModel<T>, reference: &PureState<T>, state: &PureState<T>) -> (T, T) {
    let m: Vec<T> = (0..spin.dim()).map(|k| spin.jz()[(k, k)].re).collect();
    let z: Vec<crate::scalar::C<T>> = reference
        .amplitudes()
        .iter()
        .zip(state.amplitudes().iter())
        .map(|(r, s)| r.conj() * s)
        .collect();
    let fid = |phi: T| {
        z.iter()
            .zip(&m)
            .fold(creal(T::zero()), |acc, (zk, mk)| {
                let (s, c) = (phi * *mk).sin_cos();
                acc + *zk * cplx(c, s)
            })
            .norm_sqr()
    };
    // m takes half-integer values, so the period is 4π
    let period: T = lit(4.0 * PI);
    let n = 720;
    let step = period / lit(n as f64);
    let mut best = 0;
    let mut best_val = fid(T::zero());
    for k in 1..n {
        let v = fid(step * lit(k as f64));
        if v > best_val {
            best = k;
            best_val = v;
        }
    }
    let (mut a, mut b) = (step * lit(best as f64 - 1.0), step * lit(best as f64 + 1.0));
    let g: T = lit((5f64.sqrt() - 1.0) / 2.0);
    for _ in 0..200 {
        let c = b - (b - a) * g;
        let d = a + (b - a) * g;
        if fid(c) > fid(d) {
            b = d;
        } else {
            a = c;
        }
        if (b - a).abs() <= T::default_epsilon() * lit(16.0) {
            break;
        }
    }
    let phi = (a + b) * lit(0.5);
    let v = fid(phi);
    if v >= best_val {
        (v, phi)
    } else {
        (best_val, step * lit(best as f64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spin1Observables<T: Real> {
    pub jz_mean: T,
    pub var_jx: T,
    pub var_jy: T,
}

/// Moments from the amplitudes `(q, c, s)` on `(|1,1⟩, |1,0⟩, |1,−1⟩)`
/// without forming the generator matrices.
pub fn spin1_observables<T: Real>(state: &PureState<T>) -> Result<Spin1Observables<T>> {
    if state.dim() != 3 {
        return Err(Error::Shape(format!("spin-1 state needs 3 amplitudes, got {}", state.dim())));
    }
    let a = state.amplitudes();
    let (q, c, s) = (a[0], a[1], a[2]);
    let (nq, nc, ns) = (q.norm_sqr(), c.norm_sqr(), s.norm_sqr());
    let sqrt2: T = lit(std::f64::consts::SQRT_2);
    let cross = q.conj() * c + c.conj() * s;
    let jx = sqrt2 * cross.re;
    let jy = sqrt2 * cross.im;
    let qs = (q.conj() * s).re;
    let half: T = lit(0.5);
    let two: T = lit(2.0);
    let jx2 = half * (nq + two * nc + ns + two * qs);
    let jy2 = half * (nq + two * nc + ns - two * qs);
    Ok(Spin1Observables {
        jz_mean: nq - ns,
        var_jx: jx2 - jx * jx,
        var_jy: jy2 - jy * jy,
    })
}

/// `e^{iφ J_z} ψ`, the U(1) action leaving the spin functional invariant.
pub fn rotate_about_z<T: Real>(spin: &SpinModel<T>, state: &PureState<T>, phi: T) -> PureState<T> {
    let d = spin.dim();
    let mut amps = state.amplitudes().clone();
    for k in 0..d {
        let m = spin.jz()[(k, k)].re;
        let (s, c) = (phi * m).sin_cos();
        amps[k] *= cplx(c, s);
    }
    PureState::normalized(amps).expect("phase rotation keeps the norm")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentOverlap<T: Real> {
    pub max_overlap: T,
    pub theta: T,
    pub phi: T,
    /// Coefficients on `|θ,φ⟩` and the antipodal `|π−θ, φ+π⟩`.
    pub coefficients: [crate::scalar::C<T>; 2],
    /// `‖ψ − Σ c_i |n_i⟩‖`.
    pub residual: T,
}

/// Best coherent-state overlap by grid search and pattern refinement, plus
/// the projection onto the best direction and its antipode.
pub fn coherent_overlap_analysis<T: Real>(spin: &SpinModel<T>, state: &PureState<T>) -> CoherentOverlap<T> {
    let overlap = |t: T, p: T| state.fidelity(&coherent_state(spin, t, p));
    let nt = 90;
    let np = 180;
    let pi: T = lit(PI);
    let (mut bt, mut bp, mut bv) = (T::zero(), T::zero(), overlap(T::zero(), T::zero()));

    for it in 0..=nt {
        for ip in 0..np {
            let t = pi * lit(it as f64 / nt as f64);
            let p = pi * lit(2.0 * ip as f64 / np as f64);
            let v = overlap(t, p);
            if v > bv {
                (bt, bp, bv) = (t, p, v);
            }
        }
    }
    let mut step = pi / lit(nt as f64);
    while step > lit(1e-12) {
        let mut moved = false;
        for (dt, dp) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let t = (bt + step * lit(dt)).max(T::zero()).min(pi);
            let p = bp + step * lit(dp);
            let v = overlap(t, p);
            if v > bv {
                (bt, bp, bv) = (t, p, v);
                moved = true;
            }
        }
        if !moved {
            step *= lit(0.5);
        }
    }
    // Newton polish: the fidelity is flat at its maximum, so the pattern
    // search alone pins the direction only to about sqrt(eps)
    let h: T = lit(1e-5);
    for _ in 0..20 {
        let (_, gt, gp) = overlap_gradient(spin, state, bt, bp);
        if (gt * gt + gp * gp).sqrt() < lit(1e-15) {
            break;
        }
        let (_, gtt_p, gpt_p) = overlap_gradient(spin, state, bt + h, bp);
        let (_, gtt_m, gpt_m) = overlap_gradient(spin, state, bt - h, bp);
        let (_, gtp_p, gpp_p) = overlap_gradient(spin, state, bt, bp + h);
        let (_, gtp_m, gpp_m) = overlap_gradient(spin, state, bt, bp - h);
        let two_h = h * lit(2.0);
        let htt = (gtt_p - gtt_m) / two_h;
        let hpp = (gpp_p - gpp_m) / two_h;
        let htp = ((gpt_p - gpt_m) + (gtp_p - gtp_m)) / (two_h * lit(2.0));
        let det = htt * hpp - htp * htp;
        if !(det > lit(1e-10)) || htt >= T::zero() {
            break;
        }
        let dt = (hpp * gt - htp * gp) / det;
        let dp = (htt * gp - htp * gt) / det;
        let (nt, np) = (bt - dt, bp - dp);
        if nt < T::zero() || nt > pi {
            break;
        }
        (bt, bp) = (nt, np);
    }
    let bv = overlap(bt, bp);
    let (coefficients, residual) = two_coherent_decomposition(spin, state, (bt, bp), (pi - bt, bp + pi));
    CoherentOverlap {
        max_overlap: bv,
        theta: bt,
        phi: bp,
        coefficients,
        residual,
    }
}

/// `|⟨θ,φ|ψ⟩|²` and its partial derivatives, using
/// `⟨θ,φ|ψ⟩ ∝ ⟨j,−j| e^{iθJ_y} e^{iφJ_z} |ψ⟩`.
fn overlap_gradient<T: Real>(spin: &SpinModel<T>, state: &PureState<T>, theta: T, phi: T) -> (T, T, T) {
    let d = spin.dim();
    let u: CVec<T> = (spin.jy() * cplx(T::zero(), -theta)).exp().column(d - 1).into_owned();
    let mut v = state.amplitudes().clone();
    for k in 0..d {
        let (s, c) = (phi * spin.jz()[(k, k)].re).sin_cos();
        v[k] *= cplx(c, s);
    }
    let a = u.dotc(&v);
    let i = cplx(T::zero(), T::one());
    let da_t = u.dotc(&(spin.jy() * &v)) * i;
    let da_p = u.dotc(&(spin.jz() * &v)) * i;
    let two: T = lit(2.0);
    (
        a.norm_sqr(),
        two * (a.conj() * da_t).re,
        two * (a.conj() * da_p).re,
    )
}

/// Least-squares coefficients of `ψ` on two coherent states.
pub fn two_coherent_decomposition<T: Real>(
    spin: &SpinModel<T>,
    state: &PureState<T>,
    first: (T, T),
    second: (T, T),
) -> ([crate::scalar::C<T>; 2], T) {
    let n1 = coherent_state(spin, first.0, first.1).into_amplitudes();
    let n2 = coherent_state(spin, second.0, second.1).into_amplitudes();
    let psi = state.amplitudes();
    let g12 = n1.dotc(&n2);
    let b1 = n1.dotc(psi);
    let b2 = n2.dotc(psi);
    let one = creal(T::one());
    let det = one - g12 * g12.conj();
    let c1 = (b1 - g12 * b2) / det;
    let c2 = (b2 - g12.conj() * b1) / det;
    let resid = psi - &n1 * c1 - &n2 * c2;
    ([c1, c2], resid.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::linalg::commutator;
    use crate::scalar::imag_unit;

    #[test]
    fn sweep_endpoints() {
        let rows = spin1_sweep::<f64>(2).unwrap();
        assert_eq!(rows.len(), 2);
        assert!((rows[0].min_value - 0.4375).abs() < 1e-12);
        assert!(rows[1].min_value.abs() < 1e-12);
        assert!(spin1_sweep::<f64>(1).is_err());
    }

    #[test]
    fn aligned_fidelity_undoes_rotation() {
        let spin = spin_generators::<f64>(1.0).unwrap();
        let st = spin1_solve::<f64>(0.3).unwrap().state;
        let rotated = rotate_about_z(&spin, &st, 2.1);
        assert!(st.fidelity(&rotated) < 0.99);
        let (f, _) = u1_aligned_fidelity(&spin, &st, &rotated);
        assert!((f - 1.0).abs() < 1e-13);
    }

    fn max_abs(m: &CMat<f64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn spin1_matrices() {
        let s = spin_generators::<f64>(1.0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.jx()[(0, 1)].re - h).abs() < 1e-15 && (s.jx()[(1, 2)].re - h).abs() < 1e-15);
        assert!((s.jy()[(0, 1)] - cplx(0.0, -h)).norm() < 1e-15);
        assert!((s.jy()[(1, 0)] - cplx(0.0, h)).norm() < 1e-15);
        assert_eq!(s.jz()[(0, 0)].re, 1.0);
        assert_eq!(s.jz()[(2, 2)].re, -1.0);
    }

    #[test]
    fn spin_half_is_pauli_over_two() {
        let s = spin_generators::<f64>(0.5).unwrap();
        assert!((s.jx()[(0, 1)].re - 0.5).abs() < 1e-15);
        assert!((s.jy()[(0, 1)] - cplx(0.0, -0.5)).norm() < 1e-15);
        assert_eq!(s.jz()[(0, 0)].re, 0.5);
    }

    #[test]
    fn algebra_and_casimir() {
        for j in [0.5, 1.0, 1.5, 2.0, 3.5] {
            let s = spin_generators::<f64>(j).unwrap();
            let lhs = commutator(s.jx(), s.jy());
            assert!(max_abs(&(lhs - s.jz() * imag_unit::<f64>())) < 1e-12);
            let cas = s.casimir() - CMat::<f64>::identity(s.dim(), s.dim()) * creal(j * (j + 1.0));
            assert!(max_abs(&cas) < 1e-12);
        }
    }

    #[test]
    fn bad_spin() {
        assert!(matches!(Spin::new(0.3), Err(Error::BadSpin(_))));
        assert!(Spin::new(-1.0).is_err());
    }

    #[test]
    fn coherent_state_examples() {
        let s = spin_generators::<f64>(1.0).unwrap();
        let c0 = coherent_state(&s, 0.0, 1.2);
        assert!((c0.fidelity(&PureState::basis(3, 2)) - 1.0).abs() < 1e-14);
        let psi: f64 = 0.37;
        let c = coherent_state(&s, PI / 2.0, PI - psi);
        let e = |k: f64| cplx((k * psi).cos(), (k * psi).sin());
        let expected = PureState::from_slice(&[e(2.0) * 0.5, e(1.0) * std::f64::consts::FRAC_1_SQRT_2, creal(0.5)]).unwrap();
        assert!((c.amplitudes() - expected.amplitudes()).norm() < 1e-13);
        for j in [0.5, 1.0, 1.5, 2.0] {
            let s = spin_generators::<f64>(j).unwrap();
            for (t, p) in [(0.3f64, 0.1), (1.2, 2.0), (2.9, 5.5)] {
                let c = coherent_state(&s, t, p);
                assert_relative_eq!(c.expect(s.jz()), -j * f64::cos(t), epsilon = 1e-12);
                let disp = crate::functional::invariant_dispersion(&c, s.generators());
                assert_relative_eq!(disp, j, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn coherent_entropy_matches_functional() {
        for j in [0.5, 1.0, 2.0] {
            let s = spin_generators::<f64>(j).unwrap();
            for x in [0.0, 0.4, 1.0] {
                let em = spin_entropy_model(&s, x, Regime::Full).unwrap();
                for (t, p) in [(0.2, 0.0), (1.1, 3.0), (2.5, 1.0)] {
                    let c = coherent_state(&s, t, p);
                    assert_relative_eq!(em.value(&c), coherent_entropy(j, t, x), epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn coherent_minimum_law() {
        for j in [0.5f64, 1.0, 1.5] {
            for x in [0.0f64, 0.3, 1.0] {
                let m = coherent_minimum(j, x);
                assert_relative_eq!(m.value, j / 2.0 * (1.0 - x * x), epsilon = 1e-12);
                assert_relative_eq!(m.theta.cos(), x, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn cubic_roots_and_solution() {
        for k in 0..=100 {
            let x = k as f64 / 100.0;
            for mu in spin1_cubic_roots(x) {
                assert!((2.0 * mu.powi(3) - 3.0 * mu * mu + x * x).abs() < 1e-12);
            }
            let sol = spin1_solve(x).unwrap();
            let em = spin_entropy_model(&spin_generators::<f64>(1.0).unwrap(), x, Regime::Full).unwrap();
            assert_relative_eq!(em.value(&sol.state), sol.min_value, epsilon = 1e-10);
        }
    }

    #[test]
    fn high_temperature_solution() {
        let sol = spin1_solve(0.0f64).unwrap();
        assert_relative_eq!(sol.mu0, 1.5, epsilon = 1e-14);
        assert_relative_eq!(sol.min_value, 7.0 / 16.0, epsilon = 1e-14);
        let a = sol.state.amplitudes();
        assert_relative_eq!(a[0].re, (5.0f64 / 16.0).sqrt(), epsilon = 1e-14);
        assert_relative_eq!(a[1].re, (3.0f64 / 8.0).sqrt(), epsilon = 1e-14);
        assert_relative_eq!(a[2].re, (5.0f64 / 16.0).sqrt(), epsilon = 1e-14);
        let obs = spin1_observables(&sol.state).unwrap();
        assert!(obs.jz_mean.abs() < 1e-14);
        assert_relative_eq!(obs.var_jx, 3.0 / 8.0 - 5.0 / 16.0, epsilon = 1e-14);
        assert_relative_eq!(obs.var_jy, 3.0 / 8.0, epsilon = 1e-14);
    }

    #[test]
    fn intermediate_solution() {
        let x = std::f64::consts::FRAC_1_SQRT_2;
        let sol = spin1_solve(x).unwrap();
        let s3 = 3f64.sqrt();
        let s2 = 2f64.sqrt();
        assert_relative_eq!(sol.mu0, (1.0 + s3) / 2.0, epsilon = 1e-14);
        assert_relative_eq!(sol.r, 0.5, epsilon = 1e-14);
        assert_relative_eq!(sol.k, -(1.0 + s3 + s2) / (1.0 + s3 - s2), epsilon = 1e-12);
        assert_relative_eq!(sol.q_sq * (1.0 + sol.k * sol.k), 0.75, epsilon = 1e-13);
        assert_relative_eq!(sol.min_value, (7.0 - 3.0 * s3) / 8.0, epsilon = 1e-14);
        let obs = spin1_observables(&sol.state).unwrap();
        assert_relative_eq!(obs.jz_mean, -(3.0f64 / 8.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn low_temperature_solution() {
        let sol = spin1_solve(1.0f64).unwrap();
        assert_relative_eq!(sol.mu0, 1.0, epsilon = 1e-14);
        assert!(sol.min_value.abs() < 1e-14);
        assert!((sol.state.fidelity(&PureState::basis(3, 2)) - 1.0).abs() < 1e-14);
        let obs = spin1_observables(&sol.state).unwrap();
        assert_relative_eq!(obs.jz_mean, -1.0, epsilon = 1e-14);
        assert_relative_eq!(obs.var_jx, 0.5, epsilon = 1e-14);
        assert_relative_eq!(obs.var_jy, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(spin1_solve(1.5f64), Err(Error::OutOfRange(_))));
        assert!(spin1_solve(-0.1f64).is_err());
    }

    #[test]
    fn observables_match_covariance() {
        let s = spin_generators::<f64>(1.0).unwrap();
        for x in [0.0, 0.3, 0.8] {
            let sol = spin1_solve(x).unwrap();
            let st = rotate_about_z(&s, &sol.state, 0.7);
            let obs = spin1_observables(&st).unwrap();
            let c = crate::functional::covariance(&st, s.generators());
            assert_relative_eq!(obs.var_jx, c[(0, 0)] / 2.0, epsilon = 1e-12);
            assert_relative_eq!(obs.var_jy, c[(1, 1)] / 2.0, epsilon = 1e-12);
            assert_relative_eq!(obs.jz_mean, st.expect(s.jz()), epsilon = 1e-12);
        }
    }

    #[test]
    fn u1_family_degenerate() {
        let s = spin_generators::<f64>(1.0).unwrap();
        for x in [0.0, 0.5, std::f64::consts::FRAC_1_SQRT_2] {
            let sol = spin1_solve(x).unwrap();
            let em = spin_entropy_model(&s, x, Regime::Full).unwrap();
            for phi in [0.3, 1.7, 4.0] {
                let st = rotate_about_z(&s, &sol.state, phi);
                assert_relative_eq!(em.value(&st), sol.min_value, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn overlap_of_coherent_state_is_one() {
        let s = spin_generators::<f64>(1.0).unwrap();
        let c = coherent_state(&s, 1.0, 2.0);
        let a = coherent_overlap_analysis(&s, &c);
        assert_relative_eq!(a.max_overlap, 1.0, epsilon = 1e-12);
        assert!(a.residual < 1e-10);
    }

    #[test]
    fn overlap_gradient_matches_differences() {
        let s = spin_generators::<f64>(1.0).unwrap();
        let st = spin1_solve(0.3).unwrap().state;
        let (f, gt, gp) = overlap_gradient(&s, &st, 1.1, 0.4);
        let h = 1e-6;
        let fid = |t: f64, p: f64| st.fidelity(&coherent_state(&s, t, p));
        assert_relative_eq!(f, fid(1.1, 0.4), epsilon = 1e-14);
        assert_relative_eq!(gt, (fid(1.1 + h, 0.4) - fid(1.1 - h, 0.4)) / (2.0 * h), epsilon = 1e-8);
        assert_relative_eq!(gp, (fid(1.1, 0.4 + h) - fid(1.1, 0.4 - h)) / (2.0 * h), epsilon = 1e-8);
    }
}
