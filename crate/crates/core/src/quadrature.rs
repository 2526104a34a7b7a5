//! Globally adaptive Gauss-Kronrod (7/15) quadrature, generic over the scalar.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::scalar::{lit, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-9,
            abs: 1e-13,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    /// False when `max_intervals` was hit before the tolerance was met.
    pub converged: bool,
}

fn kronrod<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = (b - a) * lit(0.5);
    let mid = (a + b) * lit(0.5);
    let fc = f(mid);
    let mut k = fc * lit(WGK[7]);
    let mut g = fc * lit(WG[3]);
    for i in 0..7 {
        let dx = half * lit(XGK[i]);
        let s = f(mid - dx) + f(mid + dx);
        k += s * lit(WGK[i]);
        if i % 2 == 1 {
            g += s * lit(WG[i / 2]);
        }
    }
    (k * half, ((k - g) * half).abs())
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// `∫_a^b f` with bisection of the worst panel until the summed error
/// estimate meets `max(abs, rel * |value|)`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: Tolerance) -> Estimate<T> {
    if a == b {
        return Estimate {
            value: T::zero(),
            error: T::zero(),
            converged: true,
        };
    }
    let (value, error) = kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let (mut total, mut err) = (value, error);
    let (rel, abs) = (lit::<T>(tol.rel), lit::<T>(tol.abs));
    while err > abs.max(rel * total.abs()) {
        if heap.len() >= tol.max_intervals {
            return Estimate {
                value: total,
                error: err,
                converged: false,
            };
        }
        let worst = heap.pop().expect("heap nonempty");
        let mid = (worst.a + worst.b) * lit(0.5);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            return Estimate {
                value: total,
                error: err,
                converged: false,
            };
        }
        let (v1, e1) = kronrod(&f, worst.a, mid);
        let (v2, e2) = kronrod(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // resum to shed accumulated update roundoff
    let value = heap.iter().fold(T::zero(), |s, p| s + p.value);
    let error = heap.iter().fold(T::zero(), |s, p| s + p.error);
    Estimate {
        value,
        error,
        converged: true,
    }
}

/// `∫_a^∞ f` via `x = a + u / (1 - u)`.
pub fn integrate_to_infinity<T: Real, F: Fn(T) -> T>(f: F, a: T, tol: Tolerance) -> Estimate<T> {
    integrate(
        |u: T| {
            let one_minus = T::one() - u;
            let x = a + u / one_minus;
            f(x) / (one_minus * one_minus)
        },
        T::zero(),
        T::one(),
        tol,
    )
}

/// Sum over consecutive panels `[p_i, p_{i+1}]`, plus `[p_last, ∞)` when
/// `tail` is set. Points must be nondecreasing.
pub fn integrate_breaks<T: Real, F: Fn(T) -> T>(f: F, points: &[T], tail: bool, tol: Tolerance) -> Estimate<T> {
    let mut out = Estimate {
        value: T::zero(),
        error: T::zero(),
        converged: true,
    };
    let mut add = |e: Estimate<T>| {
        out.value += e.value;
        out.error += e.error;
        out.converged &= e.converged;
    };
    for w in points.windows(2) {
        add(integrate(&f, w[0], w[1], tol));
    }
    if tail {
        if let Some(&last) = points.last() {
            add(integrate_to_infinity(&f, last, tol));
        }
    }
    out
}
