use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{expect, CMat, CVec};
use crate::scalar::{cabs, lit, Real, C};

/// Normalized pure state `|psi>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: Real> {
    amplitudes: CVec<T>,
}

impl<T: Real> PureState<T> {
    /// Wraps amplitudes that are already normalized to within `1e-12`
    /// (relative to the scalar's precision).
    pub fn new(amplitudes: CVec<T>) -> Result<Self> {
        let n2 = amplitudes.norm_squared();
        let tol = lit::<T>(1e-12).max(T::default_epsilon() * lit(64.0));
        if (n2 - T::one()).abs() > tol {
            return Err(Error::NotNormalized(crate::scalar::to_f64(n2)));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: CVec<T>) -> Result<Self> {
        let n = amplitudes.norm();
        if n == T::zero() {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(n),
        })
    }

    pub fn from_slice(amps: &[C<T>]) -> Result<Self> {
        Self::normalized(DVector::from_column_slice(amps))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = CVec::<T>::zeros(dim);
        v[k] = C::new(T::one(), T::zero());
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVec<T> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVec<T> {
        self.amplitudes
    }

    pub fn expect(&self, op: &CMat<T>) -> T {
        expect(&self.amplitudes, op)
    }

    pub fn variance(&self, op: &CMat<T>) -> T {
        let m = self.expect(op);
        let v = op * &self.amplitudes;
        v.norm_squared() - m * m
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &Self) -> T {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }

    pub fn apply(&self, unitary: &CMat<T>) -> Self {
        Self {
            amplitudes: unitary * &self.amplitudes,
        }
    }

    /// Representative with the largest-magnitude amplitude real and
    /// nonnegative (first index wins ties).
    pub fn canonical_phase(&self) -> Self {
        let mut best = 0;
        let mut best_mag = T::zero();
        let slack = lit::<T>(1e-9);
        for (k, z) in self.amplitudes.iter().enumerate() {
            let m = cabs(*z);
            if m > best_mag + slack {
                best = k;
                best_mag = m;
            }
        }
        if best_mag == T::zero() {
            return self.clone();
        }
        let z = self.amplitudes[best];
        let phase = z.conj().unscale(cabs(z));
        Self {
            amplitudes: self.amplitudes.map(|a| a * phase),
        }
    }
}
