//! Oscillator group `{q, p, 1, h₀}` on a truncated Fock space.
//!
//! `q = √(Ω/2)(a + a†)`, `p = i√(Ω/2)(a† − a)`, `h₀ = Ω(n + ½)`, so that
//! `[q, p] = iΩ` and `h₀ = (q² + p²)/2` below the truncation edge.

use nalgebra::DVector;

use crate::adjoint::{build_ad_matrix, canonical_decomposition, AdjointDecomposition};
use crate::algebra::{CommutatorCheck, LieModel, StructureConstants};
use crate::bath::BathCoefficients;
use crate::error::{Error, Result};
use crate::functional::{EntropyModel, EntropyOptions, Regime};
use crate::linalg::{commutator, frobenius, CMat, CVec};
use crate::scalar::{cplx, creal, lit, Real, C};
use crate::state::PureState;

pub const DEFAULT_TRUNCATION: usize = 40;
pub const EDGE_THRESHOLD: f64 = 1e-6;
/// Levels counted as "edge" when checking occupation.
const EDGE_LEVELS: usize = 2;

pub const Q: usize = 0;
pub const P: usize = 1;
pub const ONE: usize = 2;
pub const H0: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationReport<T: Real> {
    /// `‖[q,p] − iΩ‖` on levels `0..n−1`.
    pub leading_residual: T,
    /// Same, on the full truncated space; nonzero because of the edge.
    pub edge_residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorModel<T: Real> {
    omega: T,
    n_trunc: usize,
    model: LieModel<T>,
    report: TruncationReport<T>,
}

/// Nonzero `f`: `f_{q,p,1} = Ω`, `f_{h₀,q,p} = −Ω`, `f_{h₀,p,q} = Ω` and
/// their pair-antisymmetric partners.
pub fn oscillator_structure_constants<T: Real>(omega: T) -> StructureConstants<T> {
    let mut f = StructureConstants::zeros(4);
    f.set(Q, P, ONE, omega);
    f.set(P, Q, ONE, -omega);
    f.set(H0, Q, P, -omega);
    f.set(Q, H0, P, omega);
    f.set(H0, P, Q, omega);
    f.set(P, H0, Q, -omega);
    f
}

pub fn annihilation<T: Real>(n_trunc: usize) -> CMat<T> {
    let mut a = CMat::<T>::zeros(n_trunc, n_trunc);
    for k in 1..n_trunc {
        a[(k - 1, k)] = creal(lit::<T>(k as f64).sqrt());
    }
    a
}

/// Coupling `a = (1, 0, 0, 0)` (`A = q`), `H₀ = h₀`.
pub fn oscillator_model<T: Real>(omega: T, n_trunc: usize) -> Result<OscillatorModel<T>> {
    if n_trunc < 4 {
        return Err(Error::TruncationTooSmall(n_trunc));
    }
    if !(omega > T::zero()) {
        return Err(Error::Shape("oscillator frequency must be positive".into()));
    }
    let a = annihilation::<T>(n_trunc);
    let ad = a.adjoint();
    let amp = (omega / lit(2.0)).sqrt();
    let q = (&a + &ad) * creal(amp);
    let p = (&ad - &a) * cplx(T::zero(), amp);
    let one = CMat::<T>::identity(n_trunc, n_trunc);
    let h0 = CMat::<T>::from_diagonal(&DVector::from_fn(n_trunc, |k, _| {
        creal(omega * (lit::<T>(k as f64) + lit(0.5)))
    }));

    let ccr = commutator(&q, &p) - &one * cplx(T::zero(), omega);
    let lead = n_trunc - 1;
    let report = TruncationReport {
        leading_residual: frobenius(&ccr.view((0, 0), (lead, lead)).into_owned()),
        edge_residual: frobenius(&ccr),
    };
    let mut coupling = DVector::zeros(4);
    coupling[Q] = T::one();
    let model = LieModel::with_structure_constants(
        vec![q, p, one, h0],
        oscillator_structure_constants(omega),
        coupling,
        CommutatorCheck::LeadingSubspace(lead),
    )?;
    Ok(OscillatorModel {
        omega,
        n_trunc,
        model,
        report,
    })
}

impl<T: Real> OscillatorModel<T> {
    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn model(&self) -> &LieModel<T> {
        &self.model
    }

    pub fn truncation_report(&self) -> &TruncationReport<T> {
        &self.report
    }

    pub fn q(&self) -> &CMat<T> {
        &self.model.generators()[Q]
    }

    pub fn p(&self) -> &CMat<T> {
        &self.model.generators()[P]
    }

    pub fn decomposition(&self) -> Result<AdjointDecomposition<T>> {
        canonical_decomposition(&build_ad_matrix(&self.model, H0)?)
    }

    /// Entropy model with diffusion `d` on the `(q, p)` block, no damping.
    pub fn high_temperature_model(&self, d: T) -> Result<EntropyModel<T>> {
        let dec = self.decomposition()?;
        let coeffs = BathCoefficients::from_ratio(&dec.physical_frequencies(self.model.h0_scale()), d, T::zero());
        let options = EntropyOptions {
            regime: Regime::HighTemperature,
            ..Default::default()
        };
        EntropyModel::new(&self.model, &dec, &coeffs, options)
    }

    /// Weight on the top Fock levels.
    pub fn edge_occupation(&self, state: &PureState<T>) -> T {
        let amps = state.amplitudes();
        (self.n_trunc - EDGE_LEVELS..self.n_trunc).fold(T::zero(), |s, k| s + amps[k].norm_sqr())
    }

    fn check_state(&self, state: &PureState<T>) -> Result<()> {
        if state.dim() != self.n_trunc {
            return Err(Error::Shape(format!(
                "state has dimension {}, truncation is {}",
                state.dim(),
                self.n_trunc
            )));
        }
        let edge = self.edge_occupation(state);
        if edge > lit(EDGE_THRESHOLD) {
            return Err(Error::EdgeOccupation(crate::scalar::to_f64(edge)));
        }
        Ok(())
    }

    /// `s̄ = 2 M Ω² d [ΔQ² + ΔP²/(M²Ω²)]` with `Q = q/(√M Ω)`, `P = √M p`;
    /// equal to `2d[Δq² + Δp²]` for every mass.
    pub fn qbm_entropy(&self, state: &PureState<T>, d: T, mass: T) -> Result<T> {
        self.check_state(state)?;
        if !(mass > T::zero()) {
            return Err(Error::Shape("mass must be positive".into()));
        }
        let w = self.omega;
        let big_q = self.q() * creal(T::one() / (mass.sqrt() * w));
        let big_p = self.p() * creal(mass.sqrt());
        let vq = state.variance(&big_q);
        let vp = state.variance(&big_p);
        Ok(lit::<T>(2.0) * mass * w * w * d * (vq + vp / (mass * mass * w * w)))
    }
}

pub fn fock_state<T: Real>(n_trunc: usize, k: usize) -> Result<PureState<T>> {
    if k >= n_trunc {
        return Err(Error::Shape(format!("level {k} outside truncation {n_trunc}")));
    }
    Ok(PureState::basis(n_trunc, k))
}

/// `|α⟩`: `c_n = e^{−|α|²/2} αⁿ/√n!`, renormalized after truncation.
pub fn coherent_state<T: Real>(n_trunc: usize, alpha: C<T>) -> Result<PureState<T>> {
    let mut amps = CVec::<T>::zeros(n_trunc);
    let mut c = creal((-alpha.norm_sqr() / lit(2.0)).exp());
    for (n, slot) in amps.iter_mut().enumerate() {
        if n > 0 {
            c = c * alpha / creal(lit::<T>(n as f64).sqrt());
        }
        *slot = c;
    }
    PureState::normalized(amps)
}

/// `S(r)|0⟩`, `S(r) = exp(r(a² − a†²)/2)`:
/// `c_{2m} = (−tanh r)^m √((2m)!)/(2^m m!)/√(cosh r)`, so `Δq² = (Ω/2)e^{−2r}`.
pub fn squeezed_vacuum<T: Real>(n_trunc: usize, r: T) -> Result<PureState<T>> {
    let mut amps = CVec::<T>::zeros(n_trunc);
    let t = -r.tanh();
    let mut c = T::one() / r.cosh().sqrt();
    let mut m = 0usize;
    while 2 * m < n_trunc {
        amps[2 * m] = creal(c);
        // ratio c_{2m+2}/c_{2m} = t √((2m+1)(2m+2)) / (2(m+1))
        let k = lit::<T>((2 * m + 1) as f64) * lit::<T>((2 * m + 2) as f64);
        c = c * t * k.sqrt() / lit::<T>(2.0 * (m + 1) as f64);
        m += 1;
    }
    PureState::normalized(amps)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRow<T: Real> {
    pub label: String,
    pub value: T,
    /// `value / value(vacuum)`.
    pub ratio: T,
    /// Closed-form ratio for the family member.
    pub expected_ratio: T,
}

/// Curated comparison set: vacuum, displaced vacuum, `|1⟩`, `|2⟩`, squeezed
/// vacua at `r = 0.2, 0.5`.
pub fn family_table<T: Real>(osc: &OscillatorModel<T>, d: T) -> Result<Vec<FamilyRow<T>>> {
    let n = osc.n_trunc();
    let alpha = cplx(lit(0.8), lit(0.3));
    let members: Vec<(String, PureState<T>, T)> = vec![
        ("vacuum".into(), fock_state(n, 0)?, T::one()),
        ("displaced(0.8+0.3i)".into(), coherent_state(n, alpha)?, T::one()),
        ("fock(1)".into(), fock_state(n, 1)?, lit(3.0)),
        ("fock(2)".into(), fock_state(n, 2)?, lit(5.0)),
        ("squeezed(0.2)".into(), squeezed_vacuum(n, lit(0.2))?, lit::<T>(0.4).cosh()),
        ("squeezed(0.5)".into(), squeezed_vacuum(n, lit(0.5))?, lit::<T>(1.0).cosh()),
    ];
    let vac = osc.qbm_entropy(&members[0].1, d, T::one())?;
    members
        .into_iter()
        .map(|(label, st, expected_ratio)| {
            let value = osc.qbm_entropy(&st, d, T::one())?;
            Ok(FamilyRow {
                label,
                value,
                ratio: value / vac,
                expected_ratio,
            })
        })
        .collect()
}
