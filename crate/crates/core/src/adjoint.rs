//! Canonical decomposition of the free-evolution rotation
//! `R(t) = exp(-t F)`, `F_jk = f_{N,j,k}`, into 2D rotation blocks.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::algebra::{tolerance, LieModel, TOL_ALGEBRA};
use crate::error::{Error, Result};
use crate::linalg::{antisymmetry_defect, combine, CMat};
use crate::scalar::{lit, to_f64, Real};

/// Relative threshold (times `||F||_F`) below which a frequency is zero and
/// within which two frequencies are considered equal.
pub const TOL_FREQ_REL: f64 = 1e-9;

/// One 2D block `[[cos tW, s sin tW], [-s sin tW, cos tW]]` in rows
/// `rows.0, rows.1` of `O R(t) Oᵀ`, with `s = orientation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationBlock<T: Real> {
    pub rows: (usize, usize),
    pub frequency: T,
    /// +1 matches the canonical sign layout; -1 only when `det O = +1`
    /// leaves no other choice (odd number of blocks, no spare trivial axis).
    pub orientation: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DecompositionWarning<T: Real> {
    /// Several blocks share one frequency; time averages then pick up cross
    /// terms the closed forms ignore.
    DegenerateFrequencies { blocks: Vec<usize>, frequency: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjointDecomposition<T: Real> {
    o: DMatrix<T>,
    blocks: Vec<RotationBlock<T>>,
    trivial: Vec<usize>,
    warnings: Vec<DecompositionWarning<T>>,
}

/// `F_jk = f_{index, j, k}`; must be antisymmetric.
pub fn build_ad_matrix<T: Real>(model: &LieModel<T>, index: usize) -> Result<DMatrix<T>> {
    let f = model.structure_constants().ad_real(index);
    let defect = antisymmetry_defect(&f);
    if defect > tolerance(TOL_ALGEBRA) {
        return Err(Error::NotAntisymmetric { defect: to_f64(defect) });
    }
    Ok(f)
}

/// `exp(-t F)` by Padé scaling-and-squaring; independent of the block route.
pub fn rotation_by_exponential<T: Real>(f: &DMatrix<T>, t: T) -> DMatrix<T> {
    (f * (-t)).exp()
}

struct Chooser<'a, T: Real> {
    space: &'a DMatrix<T>,
    chosen: Vec<DVector<T>>,
}

impl<T: Real> Chooser<'_, T> {
    /// Unit vector of the subspace, orthogonal to everything chosen so far,
    /// closest to a standard basis vector (lowest index wins ties).
    fn next(&self) -> DVector<T> {
        let m = self.space.nrows();
        let mut best: Option<(T, DVector<T>)> = None;
        for k in 0..m {
            let mut r: DVector<T> = self.space * self.space.row(k).transpose();
            for q in &self.chosen {
                let c = q[k];
                r -= q * c;
            }
            let norm = r.norm();
            let better = match &best {
                None => true,
                Some((b, _)) => norm > *b + lit(1e-12),
            };
            if better {
                best = Some((norm, r));
            }
        }
        let (norm, r) = best.expect("nonempty subspace");
        r / norm
    }
}

fn gram_schmidt<T: Real>(v: &mut DVector<T>, against: &[DVector<T>]) {
    for q in against {
        let c = q.dot(v);
        *v -= q * c;
    }
    let n = v.norm();
    *v /= n;
}

/// Block decomposition of an antisymmetric `F` whose last row and column
/// vanish (`X_N` is fixed by its own flow).
pub fn canonical_decomposition<T: Real>(f: &DMatrix<T>) -> Result<AdjointDecomposition<T>> {
    let n = f.nrows();
    if f.ncols() != n || n == 0 {
        return Err(Error::Shape(format!("ad matrix must be square and nonempty, got {}x{}", n, f.ncols())));
    }
    let defect = antisymmetry_defect(f);
    let scale = f.norm();
    if defect > tolerance::<T>(TOL_ALGEBRA) * scale.max(T::one()) {
        return Err(Error::NotAntisymmetric { defect: to_f64(defect) });
    }
    let tol = lit::<T>(TOL_FREQ_REL) * scale.max(T::default_epsilon());
    if (0..n).any(|k| f[(n - 1, k)].abs() > tol || f[(k, n - 1)].abs() > tol) {
        return Err(Error::Shape("ad matrix does not fix the X_N axis".into()));
    }

    let m = n - 1;
    let fp = f.view((0, 0), (m, m)).into_owned();
    let mut o = DMatrix::<T>::zeros(n, n);
    o[(n - 1, n - 1)] = T::one();
    let mut blocks = Vec::new();
    let mut warnings = Vec::new();
    let mut kernel: Vec<DVector<T>> = Vec::new();

    if m > 0 {
        let eig = SymmetricEigen::new(fp.transpose() * &fp);
        let mut order: Vec<usize> = (0..m).collect();
        let freq: Vec<T> = eig.eigenvalues.iter().map(|l| l.max(T::zero()).sqrt()).collect();
        order.sort_by(|&a, &b| freq[b].partial_cmp(&freq[a]).expect("finite eigenvalues"));

        // cluster equal frequencies
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for &k in &order {
            match clusters.last_mut() {
                Some(c) if (freq[c[0]] - freq[k]).abs() <= tol => c.push(k),
                _ => clusters.push(vec![k]),
            }
        }

        let mut pairs: Vec<(DVector<T>, DVector<T>, T)> = Vec::new();
        for cluster in &clusters {
            let space = DMatrix::from_fn(m, cluster.len(), |r, c| eig.eigenvectors[(r, cluster[c])]);
            if freq[cluster[0]] <= tol {
                let mut chooser = Chooser { space: &space, chosen: Vec::new() };
                for _ in 0..cluster.len() {
                    let v = chooser.next();
                    chooser.chosen.push(v.clone());
                    kernel.push(v);
                }
                continue;
            }
            if cluster.len() % 2 != 0 {
                return Err(Error::Shape(format!(
                    "eigenspace of F^T F at frequency {} has odd dimension {}",
                    to_f64(freq[cluster[0]]),
                    cluster.len()
                )));
            }
            let first_block = pairs.len();
            let mut chooser = Chooser { space: &space, chosen: Vec::new() };
            for _ in 0..cluster.len() / 2 {
                let v = chooser.next();
                let fv = &fp * &v;
                let omega = fv.norm();
                let mut w = fv / omega;
                let mut against = chooser.chosen.clone();
                against.push(v.clone());
                gram_schmidt(&mut w, &against);
                chooser.chosen.push(v.clone());
                chooser.chosen.push(w.clone());
                pairs.push((v, w, omega));
            }
            if cluster.len() > 2 {
                warnings.push(DecompositionWarning::DegenerateFrequencies {
                    blocks: (first_block..pairs.len()).collect(),
                    frequency: freq[cluster[0]],
                });
            }
        }
        for (w0, w1) in pairs.iter().zip(pairs.iter().skip(1)) {
            if (w0.2 - w1.2).abs() <= tol && !warnings.iter().any(|DecompositionWarning::DegenerateFrequencies { frequency, .. }| (*frequency - w0.2).abs() <= tol) {
                warnings.push(DecompositionWarning::DegenerateFrequencies {
                    blocks: vec![],
                    frequency: w0.2,
                });
            }
        }

        for (alpha, (v, w, omega)) in pairs.iter().enumerate() {
            for c in 0..m {
                o[(2 * alpha, c)] = v[c];
                o[(2 * alpha + 1, c)] = w[c];
            }
            blocks.push(RotationBlock {
                rows: (2 * alpha, 2 * alpha + 1),
                frequency: *omega,
                orientation: 1,
            });
        }
        let offset = 2 * pairs.len();
        for (k, v) in kernel.iter().enumerate() {
            for c in 0..m {
                o[(offset + k, c)] = v[c];
            }
        }

        let det = o.clone().determinant();
        if det < T::zero() {
            if !kernel.is_empty() {
                let row = n - 2;
                for c in 0..n {
                    o[(row, c)] = -o[(row, c)];
                }
            } else {
                let last = blocks.last_mut().expect("m > 0 with empty kernel has a block");
                let row = last.rows.1;
                for c in 0..n {
                    o[(row, c)] = -o[(row, c)];
                }
                last.orientation = -1;
            }
        }
    }

    let trivial: Vec<usize> = (2 * blocks.len()..n).collect();
    Ok(AdjointDecomposition {
        o,
        blocks,
        trivial,
        warnings,
    })
}

impl<T: Real> AdjointDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.o.nrows()
    }

    /// Rows are the new basis vectors: `X~_m = sum_m' O_mm' X_m'`.
    pub fn o(&self) -> &DMatrix<T> {
        &self.o
    }

    pub fn blocks(&self) -> &[RotationBlock<T>] {
        &self.blocks
    }

    /// Rows of `O R Oᵀ` that are fixed; always ends with `N - 1` (zero-based).
    pub fn trivial(&self) -> &[usize] {
        &self.trivial
    }

    /// Block frequencies in physical units when `H₀ = h0_scale · X_N`.
    pub fn physical_frequencies(&self, h0_scale: T) -> Vec<T> {
        self.blocks.iter().map(|b| b.frequency * h0_scale).collect()
    }

    pub fn warnings(&self) -> &[DecompositionWarning<T>] {
        &self.warnings
    }

    /// `⊕_α R_α(t)` padded with ones on the trivial rows.
    pub fn block_matrix(&self, t: T) -> DMatrix<T> {
        let n = self.dim();
        let mut b = DMatrix::<T>::identity(n, n);
        for blk in &self.blocks {
            let (i, j) = blk.rows;
            let (s, c) = (t * blk.frequency).sin_cos();
            let s = if blk.orientation < 0 { -s } else { s };
            b[(i, i)] = c;
            b[(i, j)] = s;
            b[(j, i)] = -s;
            b[(j, j)] = c;
        }
        b
    }

    /// `R(t) = Oᵀ (⊕_α R_α(t)) O`.
    pub fn evaluate_r(&self, t: T) -> DMatrix<T> {
        self.o.transpose() * self.block_matrix(t) * &self.o
    }

    pub fn rotate_vector(&self, a: &DVector<T>) -> DVector<T> {
        &self.o * a
    }

    pub fn rotate_generators(&self, generators: &[CMat<T>]) -> Vec<CMat<T>> {
        (0..self.dim())
            .map(|m| combine(self.o.row(m).transpose().as_slice(), generators))
            .collect()
    }

    /// `||R(t) - Oᵀ(⊕R_α)O||` against the exponential of `F`.
    pub fn reconstruction_error(&self, f: &DMatrix<T>, t: T) -> T {
        (rotation_by_exponential(f, t) - self.evaluate_r(t)).abs().max()
    }
}
