use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::SymmetricEigen;
use pointer_sieve::functional::{covariance, Regime};
use pointer_sieve::linalg::CVec;
use pointer_sieve::optimizer::{descend, riemannian_gradient};
use pointer_sieve::scalar::cplx;
use pointer_sieve::spin::{
    coherent_entropy, coherent_state, rotate_about_z, spin1_cubic_roots, spin1_solve, spin_entropy_model,
    spin_generators,
};
use pointer_sieve::state::PureState;
use proptest::prelude::*;

fn state_from(parts: &[f64]) -> Option<PureState<f64>> {
    let d = parts.len() / 2;
    let v = CVec::<f64>::from_fn(d, |k, _| cplx(parts[2 * k], parts[2 * k + 1]));
    (v.norm() > 1e-3).then(|| PureState::normalized(v).unwrap())
}

fn amplitudes(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn high_t_value_is_metric_contraction(parts in amplitudes(3), j2 in 1u32..5) {
        let j = j2 as f64 / 2.0;
        let spin = spin_generators::<f64>(j).unwrap();
        let d = spin.dim();
        let parts: Vec<f64> = parts.iter().cycle().take(2 * d).cloned().collect();
        let Some(st) = state_from(&parts) else { return Ok(()) };
        let em = spin_entropy_model(&spin, 0.0, Regime::HighTemperature).unwrap();
        let g = em.high_t_metric();
        let c = covariance(&st, em.rotated_generators());
        let contraction = 0.5 * g.component_mul(&c).sum();
        prop_assert!((em.value(&st) - contraction).abs() <= 1e-12);
        prop_assert!(em.value(&st) >= -1e-12);
        let min_eig = SymmetricEigen::new(g).eigenvalues.min();
        prop_assert!(min_eig >= -1e-12);
    }

    #[test]
    fn spin1_functional_u1_invariant(parts in amplitudes(3), phi in 0.0f64..(2.0 * PI), x in 0.0f64..1.0) {
        let Some(st) = state_from(&parts) else { return Ok(()) };
        let spin = spin_generators::<f64>(1.0).unwrap();
        let em = spin_entropy_model(&spin, x, Regime::Full).unwrap();
        let rotated = rotate_about_z(&spin, &st, phi);
        prop_assert!((em.value(&st) - em.value(&rotated)).abs() <= 1e-12);
    }

    #[test]
    fn gradient_is_tangent(parts in amplitudes(3), x in 0.0f64..1.0) {
        let Some(st) = state_from(&parts) else { return Ok(()) };
        let em = spin_entropy_model(&spin_generators::<f64>(1.0).unwrap(), x, Regime::Full).unwrap();
        let g = riemannian_gradient(&st, em.functional());
        prop_assert!(st.amplitudes().dotc(&g).norm() <= 1e-12);
    }

    #[test]
    fn descent_keeps_norm_and_never_rises(parts in amplitudes(3), x in 0.0f64..1.0) {
        let Some(st) = state_from(&parts) else { return Ok(()) };
        let em = spin_entropy_model(&spin_generators::<f64>(1.0).unwrap(), x, Regime::Full).unwrap();
        let start = em.value(&st);
        let out = descend(em.functional(), st, 200, 1e-9);
        prop_assert!((out.state.amplitudes().norm() - 1.0).abs() <= 1e-12);
        prop_assert!(out.value <= start + 1e-14);
    }

    #[test]
    fn coherent_entropy_matches_functional(theta in 0.0f64..PI, phi in 0.0f64..(2.0 * PI), x in 0.0f64..1.0, j2 in 1u32..5) {
        let j = j2 as f64 / 2.0;
        let spin = spin_generators::<f64>(j).unwrap();
        let em = spin_entropy_model(&spin, x, Regime::Full).unwrap();
        let st = coherent_state(&spin, theta, phi);
        prop_assert!((em.value(&st) - coherent_entropy(j, theta, x)).abs() <= 1e-10);
        prop_assert!((st.expect(spin.jz()) + j * theta.cos()).abs() <= 1e-12);
    }
}

#[test]
fn spin1_solution_invariants_on_grid() {
    let spin = spin_generators::<f64>(1.0).unwrap();
    for k in 0..=100 {
        let x = k as f64 / 100.0;
        let sol = spin1_solve(x).unwrap();
        let mu = sol.mu0;
        assert!((2.0 * mu.powi(3) - 3.0 * mu * mu + x * x).abs() <= 1e-12, "cubic residual at {x}");
        let r2 = (mu * mu - x * x) / (4.0 * mu);
        assert!(r2 >= -1e-15);
        assert!((sol.r * sol.r - r2).abs() <= 1e-12);
        assert!((sol.state.amplitudes().norm() - 1.0).abs() <= 1e-12);
        let em = spin_entropy_model(&spin, x, Regime::Full).unwrap();
        assert!((em.value(&sol.state) - sol.min_value).abs() <= 1e-10, "value mismatch at {x}");
        for phi in [0.3, 1.7, 4.0] {
            let rotated = rotate_about_z(&spin, &sol.state, phi);
            assert!((em.value(&rotated) - sol.min_value).abs() <= 1e-12);
        }
        let roots = spin1_cubic_roots(x);
        assert!(roots.iter().any(|r| (r - mu).abs() <= 1e-12));
    }
}

#[test]
fn intermediate_parameters() {
    let x = FRAC_1_SQRT_2;
    let sol = spin1_solve(x).unwrap();
    let (s2, s3) = (2f64.sqrt(), 3f64.sqrt());
    let k = -(1.0 + s3 + s2) / (1.0 + s3 - s2);
    assert!((sol.k - k).abs() <= 1e-10);
    assert!((sol.q_sq * (1.0 + k * k) - 0.75).abs() <= 1e-12);
    assert!((sol.r - 0.5).abs() <= 1e-12);
}
