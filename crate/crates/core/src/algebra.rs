//! Lie-algebraic model: generators, structure constants, Killing form and
//! basis normalization.
//!
//! Conventions: generators are Hermitian, `[X_i, X_j] = i sum_k f_ijk X_k`,
//! and the free Hamiltonian is `H0 = h0_scale * X_N` with `X_N` the last
//! generator.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{combine, commutator_over_i, frobenius, hermitian_defect, hs_inner, CMat};
use crate::scalar::{lit, to_f64, Real};

/// Absolute tolerance for Hermiticity, commutation and Jacobi checks.
pub const TOL_ALGEBRA: f64 = 1e-10;
/// Largest Gram-matrix condition number accepted when inferring constants.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

pub(crate) fn tolerance<T: Real>(base: f64) -> T {
    lit::<T>(base).max(T::default_epsilon() * lit(1e3))
}

/// Dense `f_ijk`, row-major in `(i, j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants<T: Real> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> StructureConstants<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n * n],
        }
    }

    /// `f_ijk = epsilon_ijk` (su(2) in the spin basis).
    pub fn levi_civita() -> Self {
        let mut f = Self::zeros(3);
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            f.set_antisymmetric(i, j, k, T::one());
        }
        f
    }

    /// Builds from a nested `[i][j][k]` array.
    pub fn from_nested(values: &[Vec<Vec<T>>]) -> Result<Self> {
        let n = values.len();
        let mut f = Self::zeros(n);
        for (i, plane) in values.iter().enumerate() {
            if plane.len() != n {
                return Err(Error::Shape(format!("structure_constants[{i}] has {} rows, expected {n}", plane.len())));
            }
            for (j, row) in plane.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::Shape(format!(
                        "structure_constants[{i}][{j}] has {} entries, expected {n}",
                        row.len()
                    )));
                }
                for (k, v) in row.iter().enumerate() {
                    f.set(i, j, k, *v);
                }
            }
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        self.data[(i * self.n + j) * self.n + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: T) {
        self.data[(i * self.n + j) * self.n + k] = v;
    }

    /// Sets `f_ijk = v` and `f_jik = -v`.
    pub fn set_antisymmetric(&mut self, i: usize, j: usize, k: usize, v: T) {
        self.set(i, j, k, v);
        self.set(j, i, k, -v);
    }

    /// Real matrix `F` with `F_jk = f_{index, j, k}`.
    pub fn ad_real(&self, index: usize) -> DMatrix<T> {
        DMatrix::from_fn(self.n, self.n, |j, k| self.get(index, j, k))
    }

    /// Largest `|f_ijk + f_jik|`.
    pub fn pair_antisymmetry_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    worst = worst.max((self.get(i, j, k) + self.get(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Largest `|f_ijk + f_ikj|`; zero when `f` is totally antisymmetric.
    pub fn total_antisymmetry_defect(&self) -> T {
        let mut worst = self.pair_antisymmetry_defect();
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    worst = worst.max((self.get(i, j, k) + self.get(i, k, j)).abs());
                }
            }
        }
        worst
    }

    /// Largest Jacobi residual over all index quadruples.
    pub fn jacobi_residual(&self) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = T::zero();
                        for m in 0..n {
                            s += self.get(i, j, m) * self.get(m, k, l)
                                + self.get(j, k, m) * self.get(m, i, l)
                                + self.get(k, i, m) * self.get(m, j, l);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Constants in the basis `Y_a = sum_i L_ai X_i`.
    pub fn transformed(&self, l: &DMatrix<T>, l_inv: &DMatrix<T>) -> Self {
        let n = self.n;
        // contract one index at a time: O(n^4)
        let mut stage1 = vec![T::zero(); n * n * n]; // (a, j, k)
        for a in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s = T::zero();
                    for i in 0..n {
                        s += l[(a, i)] * self.get(i, j, k);
                    }
                    stage1[(a * n + j) * n + k] = s;
                }
            }
        }
        let mut stage2 = vec![T::zero(); n * n * n]; // (a, b, k)
        for a in 0..n {
            for b in 0..n {
                for k in 0..n {
                    let mut s = T::zero();
                    for j in 0..n {
                        s += l[(b, j)] * stage1[(a * n + j) * n + k];
                    }
                    stage2[(a * n + b) * n + k] = s;
                }
            }
        }
        let mut out = Self::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = T::zero();
                    for k in 0..n {
                        s += stage2[(a * n + b) * n + k] * l_inv[(k, c)];
                    }
                    out.set(a, b, c, s);
                }
            }
        }
        out
    }

    /// Relabels the basis: new index `a` is old index `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.n);
        for a in 0..self.n {
            for b in 0..self.n {
                for c in 0..self.n {
                    out.set(a, b, c, self.get(perm[a], perm[b], perm[c]));
                }
            }
        }
        out
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<T>>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| (0..self.n).map(|k| self.get(i, j, k)).collect()).collect())
            .collect()
    }
}

/// Which part of the representation the commutation relations must hold on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommutatorCheck {
    Full,
    /// Only the leading `k x k` block is compared; used for truncated
    /// representations of non-compact groups.
    LeadingSubspace(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<T: Real> {
    pub hermiticity: T,
    pub commutation: T,
    pub jacobi: T,
    /// Residual of the least-squares projection when constants were inferred.
    pub projection_residual: Option<T>,
}

/// Generators, structure constants, coupling vector and H0 scale.
#[derive(Debug, Clone, PartialEq)]
pub struct LieModel<T: Real> {
    generators: Vec<CMat<T>>,
    structure: StructureConstants<T>,
    coupling: DVector<T>,
    h0_scale: T,
    check: CommutatorCheck,
}

impl<T: Real> LieModel<T> {
    /// Builds a model whose structure constants are inferred from the
    /// generator matrices.
    pub fn from_generators(generators: Vec<CMat<T>>, coupling: DVector<T>) -> Result<Self> {
        check_shapes(&generators, &coupling)?;
        check_hermitian(&generators)?;
        let (structure, _) = infer_structure_constants(&generators)?;
        let model = Self {
            generators,
            structure,
            coupling,
            h0_scale: T::one(),
            check: CommutatorCheck::Full,
        };
        model.validate()?;
        Ok(model)
    }

    /// Builds a model from explicit structure constants, validating them
    /// against the matrices on the requested subspace.
    pub fn with_structure_constants(
        generators: Vec<CMat<T>>,
        structure: StructureConstants<T>,
        coupling: DVector<T>,
        check: CommutatorCheck,
    ) -> Result<Self> {
        check_shapes(&generators, &coupling)?;
        if structure.dim() != generators.len() {
            return Err(Error::Shape(format!(
                "structure constants have dimension {}, expected {}",
                structure.dim(),
                generators.len()
            )));
        }
        check_hermitian(&generators)?;
        let model = Self {
            generators,
            structure,
            coupling,
            h0_scale: T::one(),
            check,
        };
        model.validate()?;
        Ok(model)
    }

    /// Sets `H0 = scale * X_N`.
    pub fn with_h0_scale(mut self, scale: T) -> Self {
        self.h0_scale = scale;
        self
    }

    pub fn with_coupling(mut self, coupling: DVector<T>) -> Result<Self> {
        if coupling.len() != self.dim_algebra() {
            return Err(Error::Shape(format!(
                "coupling has {} entries, expected {}",
                coupling.len(),
                self.dim_algebra()
            )));
        }
        self.coupling = coupling;
        Ok(self)
    }

    pub fn dim_algebra(&self) -> usize {
        self.generators.len()
    }

    pub fn dim_rep(&self) -> usize {
        self.generators[0].nrows()
    }

    pub fn generators(&self) -> &[CMat<T>] {
        &self.generators
    }

    pub fn structure_constants(&self) -> &StructureConstants<T> {
        &self.structure
    }

    pub fn coupling(&self) -> &DVector<T> {
        &self.coupling
    }

    pub fn h0_index(&self) -> usize {
        self.dim_algebra() - 1
    }

    pub fn h0_scale(&self) -> T {
        self.h0_scale
    }

    pub fn commutator_check(&self) -> CommutatorCheck {
        self.check
    }

    /// `H0 = h0_scale * X_N` as a matrix.
    pub fn hamiltonian(&self) -> CMat<T> {
        &self.generators[self.h0_index()] * crate::scalar::creal(self.h0_scale)
    }

    /// `A = sum_j a_j X_j`.
    pub fn coupling_operator(&self) -> CMat<T> {
        combine(self.coupling.as_slice(), &self.generators)
    }

    /// Measures every invariant without failing.
    pub fn validation_report(&self) -> ValidationReport<T> {
        let hermiticity = self
            .generators
            .iter()
            .map(hermitian_defect)
            .fold(T::zero(), |a, b| a.max(b));
        ValidationReport {
            hermiticity,
            commutation: commutation_residual(&self.generators, &self.structure, self.check),
            jacobi: self.structure.jacobi_residual(),
            projection_residual: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.structure.pair_antisymmetry_defect() > tolerance(TOL_ALGEBRA) {
            return Err(Error::NotAntisymmetricPair);
        }
        let n = self.dim_algebra();
        let tol = tolerance::<T>(TOL_ALGEBRA);
        for i in 0..n {
            for j in (i + 1)..n {
                let r = pair_residual(&self.generators, &self.structure, i, j, self.check);
                if r > tol {
                    return Err(Error::NotClosed {
                        i,
                        j,
                        residual: to_f64(r),
                    });
                }
            }
        }
        let jac = self.structure.jacobi_residual();
        if jac > tol {
            return Err(Error::JacobiViolated { residual: to_f64(jac) });
        }
        Ok(())
    }
}

/// Moves generator `index` to the last position (the H0 slot), permuting the
/// coupling and, if given, the structure constants alongside.
pub fn move_h0_last<T: Real>(
    generators: &mut Vec<CMat<T>>,
    coupling: &mut Vec<T>,
    structure: Option<&mut StructureConstants<T>>,
    index: usize,
) {
    let n = generators.len();
    if index + 1 == n {
        return;
    }
    let perm: Vec<usize> = (0..n).filter(|&k| k != index).chain(std::iter::once(index)).collect();
    let g = generators.remove(index);
    generators.push(g);
    let a = coupling.remove(index);
    coupling.push(a);
    if let Some(f) = structure {
        *f = f.permuted(&perm);
    }
}

fn check_shapes<T: Real>(generators: &[CMat<T>], coupling: &DVector<T>) -> Result<()> {
    let Some(first) = generators.first() else {
        return Err(Error::Shape("at least one generator is required".into()));
    };
    let d = first.nrows();
    for (k, g) in generators.iter().enumerate() {
        if g.nrows() != d || g.ncols() != d {
            return Err(Error::Shape(format!("generator {k} is {}x{}, expected {d}x{d}", g.nrows(), g.ncols())));
        }
    }
    if coupling.len() != generators.len() {
        return Err(Error::Shape(format!(
            "coupling has {} entries, expected {}",
            coupling.len(),
            generators.len()
        )));
    }
    Ok(())
}

fn check_hermitian<T: Real>(generators: &[CMat<T>]) -> Result<()> {
    let tol = tolerance::<T>(TOL_ALGEBRA);
    for (index, g) in generators.iter().enumerate() {
        let defect = hermitian_defect(g);
        if defect > tol {
            return Err(Error::NotHermitian {
                index,
                defect: to_f64(defect),
            });
        }
    }
    Ok(())
}

fn restrict<T: Real>(m: &CMat<T>, check: CommutatorCheck) -> CMat<T> {
    match check {
        CommutatorCheck::Full => m.clone(),
        CommutatorCheck::LeadingSubspace(k) => {
            let k = k.min(m.nrows());
            m.view((0, 0), (k, k)).into_owned()
        }
    }
}

fn pair_residual<T: Real>(
    generators: &[CMat<T>],
    f: &StructureConstants<T>,
    i: usize,
    j: usize,
    check: CommutatorCheck,
) -> T {
    let lhs = commutator_over_i(&generators[i], &generators[j]);
    let coeffs: Vec<T> = (0..generators.len()).map(|k| f.get(i, j, k)).collect();
    let rhs = combine(&coeffs, generators);
    frobenius(&restrict(&(lhs - rhs), check))
}

/// Largest `||[X_i,X_j] - i sum_k f_ijk X_k||_F` over all pairs.
pub fn commutation_residual<T: Real>(
    generators: &[CMat<T>],
    f: &StructureConstants<T>,
    check: CommutatorCheck,
) -> T {
    let n = generators.len();
    let mut worst = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max(pair_residual(generators, f, i, j, check));
        }
    }
    worst
}

/// Least-squares projection of each commutator onto the generator span.
///
/// Returns the constants (antisymmetrized in the first two indices) and the
/// largest projection residual.
pub fn infer_structure_constants<T: Real>(generators: &[CMat<T>]) -> Result<(StructureConstants<T>, T)> {
    let n = generators.len();
    let mut f = StructureConstants::zeros(n);
    if n == 0 {
        return Ok((f, T::zero()));
    }
    let gram = DMatrix::from_fn(n, n, |a, b| hs_inner(&generators[a], &generators[b]));
    let eig = SymmetricEigen::new(gram.clone());
    let max_ev = eig.eigenvalues.iter().fold(T::zero(), |a, b| a.max(b.abs()));
    let min_ev = eig.eigenvalues.iter().fold(max_ev, |a, b| a.min(b.abs()));
    if min_ev <= T::zero() || max_ev / min_ev > lit(MAX_GRAM_CONDITION) {
        let condition = if min_ev <= T::zero() {
            f64::INFINITY
        } else {
            to_f64(max_ev / min_ev)
        };
        return Err(Error::DegenerateBasis { condition });
    }
    let chol = gram.cholesky().ok_or(Error::DegenerateBasis {
        condition: f64::INFINITY,
    })?;
    let tol = tolerance::<T>(TOL_ALGEBRA);
    let mut worst = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let c = commutator_over_i(&generators[i], &generators[j]);
            let rhs = DVector::from_fn(n, |k, _| hs_inner(&generators[k], &c));
            let coeffs = chol.solve(&rhs);
            let resid = frobenius(&(c - combine(coeffs.as_slice(), generators)));
            worst = worst.max(resid);
            if resid > tol {
                return Err(Error::NotClosed {
                    i,
                    j,
                    residual: to_f64(resid),
                });
            }
            for k in 0..n {
                f.set_antisymmetric(i, j, k, coeffs[k]);
            }
        }
    }
    Ok((f, worst))
}

/// Inertia of a symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    pub fn is_definite(&self) -> bool {
        self.zero == 0 && (self.positive == 0 || self.negative == 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KillingForm<T: Real> {
    pub matrix: DMatrix<T>,
    pub signature: Signature,
}

/// `h_jk = Tr(ad_j ad_k)` with `[ad_j]_kl = i f_jkl`.
pub fn killing_form<T: Real>(f: &StructureConstants<T>) -> KillingForm<T> {
    let n = f.dim();
    let mut h = DMatrix::<T>::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let mut s = T::zero();
            for l in 0..n {
                for m in 0..n {
                    s -= f.get(j, l, m) * f.get(k, m, l);
                }
            }
            h[(j, k)] = s;
            h[(k, j)] = s;
        }
    }
    let signature = signature_of(&h);
    KillingForm { matrix: h, signature }
}

fn signature_of<T: Real>(h: &DMatrix<T>) -> Signature {
    let n = h.nrows();
    if n == 0 {
        return Signature {
            positive: 0,
            negative: 0,
            zero: 0,
        };
    }
    let eig = SymmetricEigen::new(h.clone()).eigenvalues;
    let scale = eig.iter().fold(T::one(), |a, b| a.max(b.abs()));
    let tol = tolerance::<T>(1e-9) * scale;
    let mut sig = Signature {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    for e in eig.iter() {
        if *e > tol {
            sig.positive += 1;
        } else if *e < -tol {
            sig.negative += 1;
        } else {
            sig.zero += 1;
        }
    }
    sig
}

/// What [`normalize_basis`] did to the generators.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleReport<T: Real> {
    /// +1 / -1 for a definite Killing form, 0 when orthogonality was asserted
    /// on a degenerate or indefinite form.
    pub killing_sign: i8,
    /// `L` in `Y_a = sum_i L_ai X_i`.
    pub transform: DMatrix<T>,
    /// Set when `L` is a multiple of the identity.
    pub uniform_scale: Option<T>,
    /// `new h0_scale / old h0_scale`.
    pub h0_rescale: T,
    pub asserted_orthogonal: bool,
}

/// Value of `|h'|` on the diagonal after normalization (the su(2) spin
/// normalization, so `J_x, J_y, J_z` are a fixed point).
pub const KILLING_TARGET: f64 = 2.0;

/// Rescales/rotates the basis so that the Killing form is proportional to
/// the identity and `ad_{X_N}` is antisymmetric, keeping the `X_N` direction.
pub fn normalize_basis<T: Real>(
    model: &LieModel<T>,
    assume_orthogonal_adjoint: bool,
) -> Result<(LieModel<T>, ScaleReport<T>)> {
    let n = model.dim_algebra();
    let kf = killing_form(&model.structure);
    let sig = kf.signature;
    if !sig.is_definite() {
        if !assume_orthogonal_adjoint {
            return Err(Error::IndefiniteMetric {
                pos: sig.positive,
                neg: sig.negative,
                zero: sig.zero,
            });
        }
        let defect = crate::linalg::antisymmetry_defect(&model.structure.ad_real(model.h0_index()));
        if defect > tolerance(TOL_ALGEBRA) {
            return Err(Error::NotAntisymmetric { defect: to_f64(defect) });
        }
        return Ok((
            model.clone(),
            ScaleReport {
                killing_sign: 0,
                transform: DMatrix::identity(n, n),
                uniform_scale: Some(T::one()),
                h0_rescale: T::one(),
                asserted_orthogonal: true,
            },
        ));
    }

    let sign: i8 = if sig.negative > 0 { -1 } else { 1 };
    let metric = if sign < 0 { -kf.matrix.clone() } else { kf.matrix.clone() };
    let inner = |u: &DVector<T>, v: &DVector<T>| u.dot(&(&metric * v));

    // Gram-Schmidt in |h|, starting from X_N so its direction is kept.
    let order: Vec<usize> = std::iter::once(n - 1).chain(0..n - 1).collect();
    let mut rows: Vec<Option<DVector<T>>> = vec![None; n];
    let mut done: Vec<DVector<T>> = Vec::with_capacity(n);
    let target = lit::<T>(KILLING_TARGET).sqrt();
    for &idx in &order {
        let mut u = DVector::<T>::zeros(n);
        u[idx] = T::one();
        for v in &done {
            let c = inner(v, &u);
            u -= v * c;
        }
        let norm = inner(&u, &u).sqrt();
        u /= norm;
        done.push(u.clone());
        rows[idx] = Some(u * target);
    }
    let l = DMatrix::from_fn(n, n, |a, i| rows[a].as_ref().expect("row filled")[i]);
    let l_inv = l.clone().try_inverse().ok_or(Error::DegenerateBasis {
        condition: f64::INFINITY,
    })?;

    let generators: Vec<CMat<T>> = (0..n)
        .map(|a| combine(l.row(a).transpose().as_slice(), &model.generators))
        .collect();
    let structure = model.structure.transformed(&l, &l_inv);
    let coupling = l_inv.transpose() * &model.coupling;
    let h0_rescale = T::one() / l[(n - 1, n - 1)];

    let c = l[(0, 0)];
    let uniform = (0..n).all(|a| {
        (0..n).all(|i| {
            let expected = if a == i { c } else { T::zero() };
            (l[(a, i)] - expected).abs() <= tolerance::<T>(1e-12) * c.abs().max(T::one())
        })
    });

    let normalized = LieModel {
        generators,
        structure,
        coupling,
        h0_scale: model.h0_scale * h0_rescale,
        check: model.check,
    };
    Ok((
        normalized,
        ScaleReport {
            killing_sign: sign,
            transform: l,
            uniform_scale: uniform.then_some(c),
            h0_rescale,
            asserted_orthogonal: false,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cplx, creal};

    fn spin1() -> Vec<CMat<f64>> {
        let s = 0.5f64.sqrt();
        let z = creal(0.0);
        let jx = CMat::from_row_slice(3, 3, &[z, creal(s), z, creal(s), z, creal(s), z, creal(s), z]);
        let jy = CMat::from_row_slice(
            3,
            3,
            &[z, cplx(0.0, -s), z, cplx(0.0, s), z, cplx(0.0, -s), z, cplx(0.0, s), z],
        );
        let jz = CMat::from_diagonal(&DVector::from_vec(vec![creal(1.0), z, creal(-1.0)]));
        vec![jx, jy, jz]
    }

    #[test]
    fn spin1_structure_constants_are_levi_civita() {
        let (f, resid) = infer_structure_constants(&spin1()).unwrap();
        let eps = StructureConstants::<f64>::levi_civita();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!((f.get(i, j, k) - eps.get(i, j, k)).abs() < 1e-12);
                }
            }
        }
        assert!(resid < 1e-12);
    }

    #[test]
    fn single_generator_is_abelian() {
        let x = CMat::<f64>::from_diagonal(&DVector::from_vec(vec![creal(1.0), creal(-1.0)]));
        let (f, _) = infer_structure_constants(&[x]).unwrap();
        assert_eq!(f.get(0, 0, 0), 0.0);
    }

    #[test]
    fn random_hermitian_triple_does_not_close() {
        let gens3: Vec<CMat<f64>> = [[0.3, 1.1, -0.4, 0.9, 0.2, 0.7], [1.3, -0.2, 0.5, 0.1, 0.8, -0.6], [0.4, 0.6, 0.9, -1.2, 0.3, 0.5]]
            .iter()
            .map(|v| {
                CMat::from_row_slice(
                    3,
                    3,
                    &[
                        creal(v[0]),
                        cplx(v[1], v[2]),
                        cplx(v[3], 0.0),
                        cplx(v[1], -v[2]),
                        creal(v[4]),
                        cplx(0.0, v[5]),
                        cplx(v[3], 0.0),
                        cplx(0.0, -v[5]),
                        creal(-v[0]),
                    ],
                )
            })
            .collect();
        assert!(matches!(infer_structure_constants(&gens3), Err(Error::NotClosed { .. })));
    }

    #[test]
    fn dependent_generators_are_degenerate() {
        let g = spin1();
        let gens = vec![g[0].clone(), g[0].clone() * creal(2.0)];
        assert!(matches!(infer_structure_constants(&gens), Err(Error::DegenerateBasis { .. })));
    }

    #[test]
    fn killing_form_su2() {
        let kf = killing_form(&StructureConstants::<f64>::levi_civita());
        let expected = DMatrix::<f64>::identity(3, 3) * 2.0;
        assert!((kf.matrix - expected).abs().max() < 1e-14);
        assert_eq!(
            kf.signature,
            Signature {
                positive: 3,
                negative: 0,
                zero: 0
            }
        );
    }

    #[test]
    fn killing_form_abelian_vanishes() {
        let kf = killing_form(&StructureConstants::<f64>::zeros(4));
        assert_eq!(kf.matrix, DMatrix::zeros(4, 4));
        assert_eq!(kf.signature.zero, 4);
    }

    #[test]
    fn normalize_su2_is_identity() {
        let model = LieModel::from_generators(spin1(), DVector::from_vec(vec![-1.0, 0.0, 0.0])).unwrap();
        let (norm, report) = normalize_basis(&model, false).unwrap();
        assert_eq!(report.killing_sign, 1);
        assert!((report.uniform_scale.unwrap() - 1.0).abs() < 1e-12);
        assert!(norm.structure_constants().total_antisymmetry_defect() < 1e-12);
        assert!((norm.h0_scale() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_doubled_so3_reports_half() {
        let gens: Vec<_> = spin1().into_iter().map(|g| g * creal(2.0)).collect();
        let model = LieModel::from_generators(gens, DVector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
        let (norm, report) = normalize_basis(&model, false).unwrap();
        assert!((report.uniform_scale.unwrap() - 0.5).abs() < 1e-12);
        // H0 = 2 J_z survives as h0_scale = 2
        assert!((norm.h0_scale() - 2.0).abs() < 1e-12);
        assert!((norm.coupling()[0] - 2.0).abs() < 1e-12);
        let h = killing_form(norm.structure_constants()).matrix;
        assert!((h - DMatrix::identity(3, 3) * 2.0).abs().max() < 1e-12);
    }

    #[test]
    fn normalize_spin_boson_hamiltonian_direction() {
        // X = (J_x, J_y, 3 J_z): Killing form diag(2, 2, 18)
        let mut gens = spin1();
        gens[2] *= creal(3.0);
        let model = LieModel::from_generators(gens, DVector::from_vec(vec![-1.0, 0.0, 0.0])).unwrap();
        let (norm, report) = normalize_basis(&model, false).unwrap();
        assert!(report.uniform_scale.is_none());
        assert!((norm.h0_scale() - 3.0).abs() < 1e-12);
        assert!(norm.structure_constants().total_antisymmetry_defect() < 1e-12);
        let h = killing_form(norm.structure_constants()).matrix;
        assert!((h - DMatrix::identity(3, 3) * 2.0).abs().max() < 1e-12);
    }

    #[test]
    fn hermiticity_enforced() {
        let mut g = spin1();
        g[0][(0, 1)] = cplx(0.1, 0.3);
        assert!(matches!(
            LieModel::from_generators(g, DVector::zeros(3)),
            Err(Error::NotHermitian { index: 0, .. })
        ));
    }

    #[test]
    fn move_h0_last_permutes_everything() {
        let mut g = spin1();
        let mut a = vec![0.0, 0.0, 5.0];
        let mut f = StructureConstants::<f64>::levi_civita();
        move_h0_last(&mut g, &mut a, Some(&mut f), 0);
        assert_eq!(a, vec![0.0, 5.0, 0.0]);
        // new order (J_y, J_z, J_x): cyclic, still epsilon
        assert_eq!(f.get(0, 1, 2), 1.0);
        let model = LieModel::with_structure_constants(g, f, DVector::from_vec(a), CommutatorCheck::Full);
        assert!(model.is_ok());
    }
}
