//! Small dense helpers on complex operator matrices.

use nalgebra::{DMatrix, DVector};

use crate::scalar::{creal, imag_unit, Real, C};

pub type CMat<T> = DMatrix<C<T>>;
pub type CVec<T> = DVector<C<T>>;

pub fn commutator<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a * b - b * a
}

pub fn anticommutator<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    a * b + b * a
}

/// `-i [a, b]`, Hermitian whenever `a` and `b` are.
pub fn commutator_over_i<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    commutator(a, b) * (-imag_unit::<T>())
}

pub fn frobenius<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

pub fn hermitian_defect<T: Real>(m: &CMat<T>) -> T {
    frobenius(&(m - m.adjoint()))
}

pub fn hermitize<T: Real>(m: &CMat<T>) -> CMat<T> {
    (m + m.adjoint()) * creal(crate::scalar::lit::<T>(0.5))
}

/// Hilbert-Schmidt inner product `Re Tr(a† b)`.
pub fn hs_inner<T: Real>(a: &CMat<T>, b: &CMat<T>) -> T {
    a.iter().zip(b.iter()).fold(T::zero(), |acc, (x, y)| acc + (x.conj() * y).re)
}

/// `Re <psi| m |psi>`.
pub fn expect<T: Real>(psi: &CVec<T>, m: &CMat<T>) -> T {
    psi.dotc(&(m * psi)).re
}

/// Real linear combination `sum_k w_k M_k`.
pub fn combine<T: Real>(weights: &[T], mats: &[CMat<T>]) -> CMat<T> {
    let d = mats.first().map_or(0, |m| m.nrows());
    let mut out = CMat::<T>::zeros(d, d);
    for (w, m) in weights.iter().zip(mats) {
        if *w != T::zero() {
            out += m * creal(*w);
        }
    }
    out
}

pub fn to_complex<T: Real>(m: &DMatrix<T>) -> CMat<T> {
    m.map(creal)
}

/// Largest absolute entry of `m + mᵀ` (zero for an antisymmetric matrix).
pub fn antisymmetry_defect<T: Real>(m: &DMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] + m[(j, i)]).abs());
        }
    }
    worst
}
