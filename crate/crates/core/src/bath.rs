//! Thermal environments: spectral densities, the noise and dissipation
//! kernels, and the rate coefficients seen by each rotation block.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_breaks, Estimate, Tolerance};
use crate::scalar::{lit, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff<T: Real> {
    /// `exp(-ω/ω_c)`
    Exponential(T),
    /// Step at `ω_c`.
    Hard(T),
    None,
}

/// `J(ω) = λ ω^s · cutoff(ω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDensity<T: Real> {
    s: T,
    lambda: T,
    cutoff: Cutoff<T>,
}

/// Limit of `J(ω)/ω` at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroMode<T: Real> {
    Finite(T),
    Divergent,
}

impl<T: Real> ZeroMode<T> {
    pub fn value(self) -> Result<T> {
        match self {
            ZeroMode::Finite(v) => Ok(v),
            ZeroMode::Divergent => Err(Error::DivergentD0),
        }
    }
}

impl<T: Real> SpectralDensity<T> {
    pub fn power_law(s: T, lambda: T, cutoff: Cutoff<T>) -> Result<Self> {
        if !(s > T::zero()) {
            return Err(Error::InvalidBath(format!("exponent s must be positive, got {}", to_f64(s))));
        }
        if !(lambda >= T::zero()) {
            return Err(Error::InvalidBath(format!("amplitude must be nonnegative, got {}", to_f64(lambda))));
        }
        match cutoff {
            Cutoff::Exponential(w) | Cutoff::Hard(w) if !(w > T::zero()) => {
                return Err(Error::InvalidBath(format!("cutoff frequency must be positive, got {}", to_f64(w))))
            }
            _ => {}
        }
        Ok(Self { s, lambda, cutoff })
    }

    pub fn ohmic(lambda: T, cutoff: Cutoff<T>) -> Result<Self> {
        Self::power_law(T::one(), lambda, cutoff)
    }

    pub fn exponent(&self) -> T {
        self.s
    }

    pub fn amplitude(&self) -> T {
        self.lambda
    }

    pub fn cutoff(&self) -> Cutoff<T> {
        self.cutoff
    }

    pub fn eval(&self, omega: T) -> T {
        if omega <= T::zero() || self.lambda == T::zero() {
            return T::zero();
        }
        let base = self.lambda * omega.powf(self.s);
        match self.cutoff {
            Cutoff::Exponential(wc) => base * (-omega / wc).exp(),
            Cutoff::Hard(wc) => {
                if omega <= wc {
                    base
                } else {
                    T::zero()
                }
            }
            Cutoff::None => base,
        }
    }

    pub fn slope_at_zero(&self) -> ZeroMode<T> {
        if self.lambda == T::zero() || self.s > T::one() {
            ZeroMode::Finite(T::zero())
        } else if self.s == T::one() {
            ZeroMode::Finite(self.lambda)
        } else {
            ZeroMode::Divergent
        }
    }

    /// Frequency above which `J` is negligible (`None` without a cutoff).
    fn support_end(&self) -> Option<T> {
        match self.cutoff {
            Cutoff::Exponential(wc) => Some(wc * lit(60.0)),
            Cutoff::Hard(wc) => Some(wc),
            Cutoff::None => None,
        }
    }

    fn scale(&self) -> Option<T> {
        match self.cutoff {
            Cutoff::Exponential(wc) | Cutoff::Hard(wc) => Some(wc),
            Cutoff::None => None,
        }
    }
}

/// Inverse temperature; `Infinite` is the zero-temperature limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta<T: Real> {
    Finite(T),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BathKind {
    Oscillator,
    /// `J → J tanh(βω/2)`.
    Spin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bath<T: Real> {
    spectral: SpectralDensity<T>,
    beta: Beta<T>,
    kind: BathKind,
}

fn coth<T: Real>(x: T) -> T {
    T::one() / x.tanh()
}

impl<T: Real> Bath<T> {
    pub fn new(spectral: SpectralDensity<T>, beta: Beta<T>, kind: BathKind) -> Result<Self> {
        if let Beta::Finite(b) = beta {
            if !(b > T::zero()) || !b.is_finite() {
                return Err(Error::InvalidBath(format!(
                    "beta must be positive and finite (use Beta::Infinite), got {}",
                    to_f64(b)
                )));
            }
        }
        Ok(Self { spectral, beta, kind })
    }

    pub fn spectral(&self) -> &SpectralDensity<T> {
        &self.spectral
    }

    pub fn beta(&self) -> Beta<T> {
        self.beta
    }

    pub fn kind(&self) -> BathKind {
        self.kind
    }

    fn tanh_half(&self, omega: T) -> T {
        match self.beta {
            Beta::Finite(b) => (b * omega * lit(0.5)).tanh(),
            Beta::Infinite => T::one(),
        }
    }

    fn coth_half(&self, omega: T) -> T {
        match self.beta {
            Beta::Finite(b) => coth(b * omega * lit(0.5)),
            Beta::Infinite => T::one(),
        }
    }

    pub fn effective_j(&self, omega: T) -> T {
        let j = self.spectral.eval(omega);
        match self.kind {
            BathKind::Oscillator => j,
            BathKind::Spin => j * self.tanh_half(omega),
        }
    }

    /// Integrand of the noise kernel, `J_eff(ω) coth(βω/2)`.
    pub fn noise_density(&self, omega: T) -> T {
        match self.kind {
            BathKind::Spin => self.spectral.eval(omega),
            BathKind::Oscillator => {
                if omega > T::zero() {
                    return self.spectral.eval(omega) * self.coth_half(omega);
                }
                match (self.beta, self.spectral.slope_at_zero()) {
                    (Beta::Infinite, _) => T::zero(),
                    (Beta::Finite(b), ZeroMode::Finite(k)) => k * lit(2.0) / b,
                    (Beta::Finite(_), ZeroMode::Divergent) => T::max_value().unwrap_or(T::one() / T::zero()),
                }
            }
        }
    }

    /// Normal diffusion `(π/2) J_eff(Ω) coth(βΩ/2)`.
    pub fn d_alpha(&self, omega: T) -> T {
        debug_assert!(omega > T::zero());
        lit::<T>(FRAC_PI_2) * self.noise_density(omega)
    }

    /// Damping `(π/2) J_eff(Ω)/Ω`.
    pub fn gamma_alpha(&self, omega: T) -> T {
        debug_assert!(omega > T::zero());
        lit::<T>(FRAC_PI_2) * self.effective_j(omega) / omega
    }

    /// `∫_0^∞ ν(τ) dτ`.
    pub fn d_zero(&self) -> ZeroMode<T> {
        match (self.kind, self.beta) {
            (BathKind::Spin, _) | (_, Beta::Infinite) => ZeroMode::Finite(T::zero()),
            (BathKind::Oscillator, Beta::Finite(b)) => match self.spectral.slope_at_zero() {
                ZeroMode::Finite(k) => ZeroMode::Finite(lit::<T>(PI) * k / b),
                ZeroMode::Divergent => ZeroMode::Divergent,
            },
        }
    }

    fn require_cutoff(&self, what: &'static str) -> Result<T> {
        if self.spectral.lambda == T::zero() {
            return Ok(T::zero());
        }
        self.spectral.support_end().ok_or(Error::NoCutoff(what))
    }

    fn tail_breaks(&self, from: T) -> Vec<T> {
        let mut points = vec![from];
        if let Some(wc) = self.spectral.scale() {
            for m in [1.0, 10.0] {
                let p = wc * lit(m);
                if p > from {
                    points.push(p);
                }
            }
        }
        points
    }

    /// `P∫_0^∞ h(ω) / (ω² − Ω²) dω` with the pole removed by subtraction on
    /// a window symmetric about `Ω`.
    fn principal_value<F: Fn(T) -> T>(&self, h: F, omega: T, tol: Tolerance) -> Estimate<T> {
        let end = self.spectral.support_end();
        let hard = matches!(self.spectral.cutoff, Cutoff::Hard(_));
        let upper = if hard { end } else { None };
        let direct = |w: T| h(w) / (w * w - omega * omega);
        if let Some(u) = upper {
            if u <= omega {
                return integrate(direct, T::zero(), u, tol);
            }
        }
        let half = match upper {
            Some(u) => omega.min(u - omega),
            None => omega,
        };
        let phi = |w: T| h(w) / (w + omega);
        let phi0 = phi(omega);
        let smooth = |w: T| (phi(w) - phi0) / (w - omega);
        let mut out = integrate_breaks(&smooth, &[omega - half, omega, omega + half], false, tol);
        let mut add = |e: Estimate<T>| {
            out.value += e.value;
            out.error += e.error;
            out.converged &= e.converged;
        };
        if omega - half > T::zero() {
            add(integrate(&direct, T::zero(), omega - half, tol));
        }
        match upper {
            Some(u) => add(integrate(&direct, omega + half, u, tol)),
            None => add(integrate_breaks(&direct, &self.tail_breaks(omega + half), true, tol)),
        }
        out
    }

    /// Anomalous diffusion `-(1/Ω)∫_0^∞ ν(τ) sin(Ωτ) dτ`
    /// `= P∫ J_eff coth(βω/2) / (ω² − Ω²) dω`.
    pub fn f_alpha(&self, omega: T) -> Result<T> {
        if self.require_cutoff("anomalous diffusion f_alpha")? == T::zero() {
            return Ok(T::zero());
        }
        Ok(self
            .principal_value(|w| self.noise_density(w), omega, Tolerance::default())
            .value)
    }

    /// Frequency shift `-∫_0^∞ η(τ) cos(Ωτ) dτ = -P∫ J_eff ω / (ω² − Ω²) dω`.
    /// At `Ω = 0` this is `-∫ J_eff/ω`.
    pub fn omega_shift_sq(&self, omega: T) -> Result<T> {
        if self.require_cutoff("frequency shift")? == T::zero() {
            return Ok(T::zero());
        }
        let tol = Tolerance::default();
        if omega == T::zero() {
            let e = integrate_breaks(|w: T| self.effective_j(w) / w, &self.integration_points(), self.has_tail(), tol);
            return Ok(-e.value);
        }
        Ok(-self.principal_value(|w| self.effective_j(w) * w, omega, tol).value)
    }

    fn has_tail(&self) -> bool {
        matches!(self.spectral.cutoff, Cutoff::Exponential(_))
    }

    fn integration_points(&self) -> Vec<T> {
        let mut pts = vec![T::zero()];
        if let Some(wc) = self.spectral.scale() {
            pts.push(wc);
            if self.has_tail() {
                pts.push(wc * lit(10.0));
            }
        }
        if let Beta::Finite(b) = self.beta {
            let t = T::one() / b;
            if pts.iter().all(|&p| (p - t).abs() > T::default_epsilon()) && t < *pts.last().unwrap() {
                pts.push(t);
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts
    }

    fn oscillatory_points(&self, tau: T, end: T) -> Vec<T> {
        let cycles = to_f64(end * tau.abs()) / (2.0 * PI);
        let n = (cycles.ceil() as usize).clamp(1, 4000);
        let mut pts: Vec<T> = (0..=n).map(|k| end * lit::<T>(k as f64 / n as f64)).collect();
        if let Beta::Finite(b) = self.beta {
            let t = T::one() / b;
            if t < end {
                pts.push(t);
                pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            }
        }
        pts
    }

    /// `ν(τ) = ∫_0^∞ J_eff(ω) coth(βω/2) cos(ωτ) dω`.
    pub fn nu_kernel(&self, tau: T) -> Result<T> {
        let end = self.require_cutoff("noise kernel")?;
        if end == T::zero() {
            return Ok(T::zero());
        }
        let pts = self.oscillatory_points(tau, end);
        Ok(integrate_breaks(|w: T| self.noise_density(w) * (w * tau).cos(), &pts, false, Tolerance::default()).value)
    }

    /// `η(τ) = ∫_0^∞ J_eff(ω) sin(ωτ) dω`.
    pub fn eta_kernel(&self, tau: T) -> Result<T> {
        let end = self.require_cutoff("dissipation kernel")?;
        if end == T::zero() {
            return Ok(T::zero());
        }
        let pts = self.oscillatory_points(tau, end);
        Ok(integrate_breaks(|w: T| self.effective_j(w) * (w * tau).sin(), &pts, false, Tolerance::default()).value)
    }
}

/// Block coefficients `(D, f, γ, Ω̃²)` at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<T: Real> {
    pub d: T,
    pub f: T,
    pub gamma: T,
    pub omega_shift_sq: T,
}

/// Abel-regulated moments `∫_0^∞ e^{-ετ} {ν,η}(τ) {cos,sin}(Ωτ) dτ` with the
/// τ integral done in closed form, extrapolated to `ε → 0` from
/// `ε ∈ {1e-2, 1e-3, 1e-4}·Ω`. Independent of the principal-value route.
pub fn regulated_moments<T: Real>(bath: &Bath<T>, omega: T) -> Result<Moments<T>> {
    let end = bath.require_cutoff("regulated moments")?;
    if end == T::zero() {
        return Ok(Moments {
            d: T::zero(),
            f: T::zero(),
            gamma: T::zero(),
            omega_shift_sq: T::zero(),
        });
    }
    let tol = Tolerance {
        rel: 1e-11,
        abs: 1e-14,
        max_intervals: 20000,
    };
    let hard = matches!(bath.spectral.cutoff, Cutoff::Hard(_));
    let eps_list = [1e-2, 1e-3, 1e-4];
    let mut samples = Vec::new();
    for &e in &eps_list {
        let eps = omega * lit(e);
        let e2 = eps * eps;
        let lor = |x: T| eps / (e2 + x * x);
        let dis = |x: T| x / (e2 + x * x);
        let half: T = lit(0.5);
        let mut pts = vec![T::zero()];
        for k in [-100.0, -10.0, -1.0, 0.0, 1.0, 10.0, 100.0] {
            let p = omega + eps * lit(k);
            if p > T::zero() && (!hard || p < end) {
                pts.push(p);
            }
        }
        if hard {
            pts.push(end);
        } else {
            for p in bath.tail_breaks(omega * lit(2.0)) {
                pts.push(p);
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        let tail = !hard;
        let run = |g: &dyn Fn(T) -> T| integrate_breaks(g, &pts, tail, tol).value;
        let d = run(&|w: T| bath.noise_density(w) * half * (lor(w + omega) + lor(w - omega)));
        let cs = run(&|w: T| bath.noise_density(w) * half * (dis(omega + w) + dis(omega - w)));
        let ss = run(&|w: T| bath.effective_j(w) * half * (lor(w - omega) - lor(w + omega)));
        let sc = run(&|w: T| bath.effective_j(w) * half * (dis(w + omega) + dis(w - omega)));
        samples.push([d, -cs / omega, ss / omega, -sc]);
    }
    let nodes: Vec<f64> = eps_list.to_vec();
    let extrapolate = |k: usize| {
        let mut v = T::zero();
        for i in 0..3 {
            let mut w = 1.0;
            for j in 0..3 {
                if i != j {
                    w *= nodes[j] / (nodes[j] - nodes[i]);
                }
            }
            v += samples[i][k] * lit(w);
        }
        v
    };
    Ok(Moments {
        d: extrapolate(0),
        f: extrapolate(1),
        gamma: extrapolate(2),
        omega_shift_sq: extrapolate(3),
    })
}

/// Coefficients of one rotation block at physical frequency `frequency`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockCoefficients<T: Real> {
    pub frequency: T,
    pub d: T,
    pub gamma: T,
    /// `None` when the bath has no cutoff.
    pub f: Option<T>,
    pub omega_shift_sq: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathCoefficients<T: Real> {
    pub blocks: Vec<BlockCoefficients<T>>,
    pub d_zero: ZeroMode<T>,
    /// `Ω̃²(0) = -∫ J_eff/ω`, the dissipation moment of fixed directions.
    pub zero_shift_sq: Option<T>,
}

impl<T: Real> BathCoefficients<T> {
    pub fn from_bath(bath: &Bath<T>, frequencies: &[T]) -> Self {
        let blocks = frequencies
            .iter()
            .map(|&w| BlockCoefficients {
                frequency: w,
                d: bath.d_alpha(w),
                gamma: bath.gamma_alpha(w),
                f: bath.f_alpha(w).ok(),
                omega_shift_sq: bath.omega_shift_sq(w).ok(),
            })
            .collect();
        Self {
            blocks,
            d_zero: bath.d_zero(),
            zero_shift_sq: bath.omega_shift_sq(T::zero()).ok(),
        }
    }

    /// Moments at `|ω|` looked up among the blocks (relative match `1e-6`);
    /// `ω = 0` maps to `D₀` and `Ω̃²(0)`.
    pub fn moments_at(&self, omega: T) -> Result<Moments<T>> {
        let w = omega.abs();
        let scale = self
            .blocks
            .iter()
            .fold(T::one(), |m, b| m.max(b.frequency.abs()));
        if w <= lit::<T>(1e-9) * scale {
            return Ok(Moments {
                d: self.d_zero.value()?,
                f: T::zero(),
                gamma: T::zero(),
                omega_shift_sq: self.zero_shift_sq.ok_or(Error::NoCutoff("zero-frequency shift"))?,
            });
        }
        let b = self
            .blocks
            .iter()
            .find(|b| (b.frequency - w).abs() <= lit::<T>(1e-6) * w)
            .ok_or_else(|| Error::Shape(format!("no block coefficients at frequency {}", to_f64(w))))?;
        Ok(Moments {
            d: b.d,
            f: b.f.ok_or(Error::NoCutoff("anomalous diffusion f_alpha"))?,
            gamma: b.gamma,
            omega_shift_sq: b.omega_shift_sq.ok_or(Error::NoCutoff("frequency shift"))?,
        })
    }

    /// `D = 1`, `γ = 0` on every block, no zero-frequency diffusion.
    pub fn unit(frequencies: &[T]) -> Self {
        Self::from_ratio(frequencies, T::one(), T::zero())
    }

    /// Uniform `D` on every block with `γ_α ω_α / D = damping_ratio`, the
    /// dimensionless ratio written `γ/D` for spin environments. Shifts and
    /// `D₀` vanish.
    pub fn from_ratio(frequencies: &[T], d: T, damping_ratio: T) -> Self {
        Self {
            blocks: frequencies
                .iter()
                .map(|&w| BlockCoefficients {
                    frequency: w,
                    d,
                    gamma: damping_ratio * d / w,
                    f: Some(T::zero()),
                    omega_shift_sq: Some(T::zero()),
                })
                .collect(),
            d_zero: ZeroMode::Finite(T::zero()),
            zero_shift_sq: Some(T::zero()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ohmic_exp(wc: f64, beta: Beta<f64>, kind: BathKind) -> Bath<f64> {
        Bath::new(SpectralDensity::ohmic(1.0, Cutoff::Exponential(wc)).unwrap(), beta, kind).unwrap()
    }

    fn no_cutoff(s: f64, lambda: f64, beta: f64) -> Bath<f64> {
        Bath::new(
            SpectralDensity::power_law(s, lambda, Cutoff::None).unwrap(),
            Beta::Finite(beta),
            BathKind::Oscillator,
        )
        .unwrap()
    }

    #[test]
    fn effective_j_examples() {
        let b = ohmic_exp(10.0, Beta::Finite(1.0), BathKind::Oscillator);
        assert_eq!(b.effective_j(0.0), 0.0);
        let tiny = ohmic_exp(10.0, Beta::Finite(1e-12), BathKind::Spin);
        assert!(tiny.effective_j(1.0) < 1e-11);
        let b2 = Bath::new(
            SpectralDensity::ohmic(2.0, Cutoff::None).unwrap(),
            Beta::Finite(1.0),
            BathKind::Oscillator,
        )
        .unwrap();
        assert_eq!(b2.effective_j(1.0), 2.0);
    }

    #[test]
    fn d_alpha_examples() {
        let hot = no_cutoff(1.0, 1.0, 1e-6);
        assert_relative_eq!(hot.d_alpha(1.0), PI * 1e6, max_relative = 1e-10);
        let b = no_cutoff(1.0, 1.0, 2.0);
        assert_relative_eq!(b.d_alpha(1.0), FRAC_PI_2 / 1f64.tanh(), epsilon = 1e-14);
        assert_relative_eq!(b.d_alpha(1.0), 2.062_511_003_414_438, epsilon = 1e-12);
        let spin = ohmic_exp(3.0, Beta::Finite(0.7), BathKind::Spin);
        for w in [0.1, 1.0, 4.0] {
            assert_eq!(spin.d_alpha(w), FRAC_PI_2 * spin.spectral().eval(w));
        }
    }

    #[test]
    fn gamma_examples() {
        let b = no_cutoff(1.0, 1.0, 2.0);
        assert_relative_eq!(b.gamma_alpha(3.0), FRAC_PI_2, epsilon = 1e-15);
        for (beta, w) in [(0.3, 0.5), (2.0, 1.0), (5.0, 3.0)] {
            let b = ohmic_exp(4.0, Beta::Finite(beta), BathKind::Oscillator);
            let ratio = b.gamma_alpha(w) / b.d_alpha(w);
            assert_relative_eq!(ratio, (beta * w / 2.0).tanh() / w, max_relative = 1e-12);
        }
        let hot = ohmic_exp(4.0, Beta::Finite(1e-9), BathKind::Oscillator);
        assert!(hot.gamma_alpha(1.0) / hot.d_alpha(1.0) < 1e-9);
    }

    #[test]
    fn ratio_monotone_in_beta() {
        let mut last = -1.0;
        for k in 0..40 {
            let beta = 0.01 * 1.3f64.powi(k);
            let b = ohmic_exp(4.0, Beta::Finite(beta), BathKind::Oscillator);
            let r = b.gamma_alpha(2.0) / b.d_alpha(2.0);
            assert!(r >= last && r <= 0.5 + 1e-15);
            last = r;
        }
        let cold = ohmic_exp(4.0, Beta::Infinite, BathKind::Oscillator);
        assert_relative_eq!(cold.gamma_alpha(2.0) / cold.d_alpha(2.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn d_zero_examples() {
        assert_eq!(no_cutoff(1.0, 1.0, 2.0).d_zero(), ZeroMode::Finite(FRAC_PI_2));
        assert_eq!(no_cutoff(3.0, 1.0, 2.0).d_zero(), ZeroMode::Finite(0.0));
        assert_eq!(no_cutoff(0.5, 1.0, 2.0).d_zero(), ZeroMode::Divergent);
        assert!(no_cutoff(0.5, 1.0, 2.0).d_zero().value().is_err());
        let spin = ohmic_exp(3.0, Beta::Finite(0.7), BathKind::Spin);
        assert_eq!(spin.d_zero(), ZeroMode::Finite(0.0));
    }

    #[test]
    fn zero_density_has_zero_shifts() {
        let b = Bath::new(
            SpectralDensity::ohmic(0.0, Cutoff::None).unwrap(),
            Beta::Finite(1.0),
            BathKind::Oscillator,
        )
        .unwrap();
        assert_eq!(b.f_alpha(1.0).unwrap(), 0.0);
        assert_eq!(b.omega_shift_sq(1.0).unwrap(), 0.0);
    }

    #[test]
    fn no_cutoff_refuses_shift() {
        let b = no_cutoff(1.0, 1.0, 1.0);
        assert!(matches!(b.f_alpha(1.0), Err(Error::NoCutoff(_))));
        assert!(matches!(b.nu_kernel(1.0), Err(Error::NoCutoff(_))));
    }

    #[test]
    fn zero_shift_closed_form() {
        // -∫ λ e^{-ω/ω_c} dω = -λ ω_c
        let b = ohmic_exp(7.0, Beta::Finite(1.0), BathKind::Oscillator);
        assert_relative_eq!(b.omega_shift_sq(0.0).unwrap(), -7.0, max_relative = 1e-10);
    }

    #[test]
    fn shift_closed_form_ohmic_exp() {
        // continuity of the principal value at Ω → 0
        let b = ohmic_exp(5.0, Beta::Finite(1.0), BathKind::Oscillator);
        let small = b.omega_shift_sq(1e-6).unwrap();
        assert_relative_eq!(small, b.omega_shift_sq(0.0).unwrap(), max_relative = 1e-5);
    }

    #[test]
    fn kernels_trivial_values() {
        let b = ohmic_exp(5.0, Beta::Finite(1.0), BathKind::Oscillator);
        assert!(b.eta_kernel(0.0).unwrap().abs() < 1e-15);
        for t in [0.1f64, 0.7, 2.3] {
            assert_relative_eq!(b.nu_kernel(t).unwrap(), b.nu_kernel(-t).unwrap(), epsilon = 1e-14);
        }
        // η(τ) = λ 2τ/c / (1/c² + τ²)² for the exponential Ohmic density
        let c: f64 = 5.0;
        for t in [0.1f64, 0.7, 2.3] {
            let exact: f64 = 2.0 * t / c / (1.0 / (c * c) + t * t).powi(2);
            assert_relative_eq!(b.eta_kernel(t).unwrap(), exact, max_relative = 1e-8);
        }
    }

    #[test]
    fn regulated_oracle_matches_closed_forms() {
        for (w, beta, wc) in [(1.0, 1.0, 10.0), (0.5, 3.0, 4.0), (2.0, 0.2, 6.0)] {
            let b = ohmic_exp(wc, Beta::Finite(beta), BathKind::Oscillator);
            let m = regulated_moments(&b, w).unwrap();
            assert_relative_eq!(m.d, b.d_alpha(w), max_relative = 1e-6);
            assert_relative_eq!(m.gamma, b.gamma_alpha(w), max_relative = 1e-6);
            assert_relative_eq!(m.f, b.f_alpha(w).unwrap(), max_relative = 1e-6, epsilon = 1e-9);
            assert_relative_eq!(m.omega_shift_sq, b.omega_shift_sq(w).unwrap(), max_relative = 1e-6);
        }
    }

    #[test]
    fn regulated_oracle_hard_and_spin() {
        let hard = Bath::new(
            SpectralDensity::power_law(2.0, 0.3, Cutoff::Hard(5.0)).unwrap(),
            Beta::Finite(1.5),
            BathKind::Oscillator,
        )
        .unwrap();
        let spin = ohmic_exp(8.0, Beta::Finite(0.8), BathKind::Spin);
        for b in [hard, spin] {
            let w = 1.3;
            let m = regulated_moments(&b, w).unwrap();
            assert_relative_eq!(m.d, b.d_alpha(w), max_relative = 1e-6);
            assert_relative_eq!(m.gamma, b.gamma_alpha(w), max_relative = 1e-6);
            assert_relative_eq!(m.f, b.f_alpha(w).unwrap(), max_relative = 1e-6);
            assert_relative_eq!(m.omega_shift_sq, b.omega_shift_sq(w).unwrap(), max_relative = 1e-6);
        }
    }

    #[test]
    fn tau_domain_cosine_moment_reproduces_d() {
        // direct 2D quadrature: ν(τ) by ω-quadrature, then ∫ ν cos Ωτ dτ on a
        // truncated τ range; the ν ~ τ^{-2} tail beyond 60 is below 1e-4
        let b = ohmic_exp(5.0, Beta::Finite(1.0), BathKind::Oscillator);
        let w = 1.0;
        let tol = Tolerance {
            rel: 1e-7,
            abs: 1e-10,
            max_intervals: 2000,
        };
        let pts: Vec<f64> = (0..=120).map(|k| k as f64 * 0.5).collect();
        let d = integrate_breaks(|t: f64| b.nu_kernel(t).unwrap() * (w * t).cos(), &pts, false, tol).value;
        assert_relative_eq!(d, b.d_alpha(w), max_relative = 1e-3);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SpectralDensity::power_law(0.0, 1.0, Cutoff::<f64>::None).is_err());
        assert!(SpectralDensity::power_law(1.0, -1.0, Cutoff::<f64>::None).is_err());
        assert!(SpectralDensity::power_law(1.0, 1.0, Cutoff::Hard(0.0)).is_err());
        let j = SpectralDensity::ohmic(1.0, Cutoff::None).unwrap();
        assert!(Bath::new(j, Beta::Finite(0.0), BathKind::Spin).is_err());
        assert!(Bath::new(j, Beta::Finite(f64::INFINITY), BathKind::Spin).is_err());
    }
}
