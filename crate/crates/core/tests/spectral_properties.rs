use std::sync::Arc;

use mlfrac::spectral::*;
use proptest::prelude::*;

fn variable_spec(a0: f64, a1: f64, c: f64) -> OperatorSpec {
    let xs: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0 * 2.0).collect();
    let vs: Vec<f64> = xs.iter().map(|x| a0 + a1 * (3.0 * x).sin().abs()).collect();
    OperatorSpec::new(
        2.0,
        Coefficient::tabulated(xs, vs).unwrap(),
        Coefficient::Constant(c),
    )
    .unwrap()
}

#[test]
fn finite_difference_spectrum_converges_under_refinement() {
    let spec = variable_spec(1.0, 0.5, 2.0);
    let coarse = sturm_liouville_eigensystem(&spec, 1024, 16).unwrap();
    let fine = sturm_liouville_eigensystem(&spec, 2048, 16).unwrap();
    for k in 0..16 {
        let rel = (coarse.lambda(k) - fine.lambda(k)).abs() / fine.lambda(k);
        assert!(rel <= 1e-3, "mode {k}: relative change {rel:e}");
    }
}

#[test]
fn first_mode_positive_at_interior_nodes() {
    let spec = variable_spec(0.3, 2.0, 0.0);
    let es = sturm_liouville_eigensystem(&spec, 512, 32).unwrap();
    let q = es.quadrature();
    let phi1 = es.mode_samples(0);
    assert!((1..q.intervals()).all(|i| phi1[i] > 0.0));
    let lap = dirichlet_laplacian_eigensystem(2.0, 4).unwrap();
    let q = lap.quadrature();
    assert!((1..q.intervals()).all(|i| lap.phi(0, q.node(i)) > 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectrum_is_positive_and_strictly_increasing(a0 in 0.1f64..3.0, a1 in 0.0f64..3.0, c in 0.0f64..10.0) {
        let es = sturm_liouville_eigensystem(&variable_spec(a0, a1, c), 256, 64).unwrap();
        prop_assert!(es.lambda(0) > 0.0);
        for w in es.lambdas().windows(2) {
            prop_assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn finite_difference_modes_are_orthonormal(a0 in 0.1f64..3.0, a1 in 0.0f64..3.0, c in 0.0f64..10.0) {
        let es = sturm_liouville_eigensystem(&variable_spec(a0, a1, c), 256, 24).unwrap();
        let q = es.quadrature();
        let modes: Vec<Vec<f64>> = (0..es.len()).map(|k| es.mode_samples(k)).collect();
        for i in 0..es.len() {
            for j in 0..=i {
                let g = q.inner(&modes[i], &modes[j]);
                prop_assert!((g - if i == j { 1.0 } else { 0.0 }).abs() <= 1e-8, "({i},{j}): {g}");
            }
        }
    }

    #[test]
    fn projection_then_synthesis_reproduces_modal_combinations(
        coeffs in proptest::collection::vec(-2.0f64..2.0, 1..12),
        x in 0.0f64..3.0,
    ) {
        let es = dirichlet_laplacian_eigensystem(3.0, 12).unwrap();
        let c = ModalCoefficients::new(coeffs.clone(), es.clone()).unwrap();
        let samples = es.quadrature().sample(|y| c.eval(y));
        let back = project(&samples, &es, coeffs.len()).unwrap();
        for (a, b) in coeffs.iter().zip(back.values()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        let direct: f64 = coeffs.iter().enumerate().map(|(k, v)| v * es.phi(k, x)).sum();
        prop_assert!((c.eval(x) - direct).abs() < 1e-12);
    }

    #[test]
    fn power_norm_is_nondecreasing_in_gamma_when_lambda_one_is_at_least_one(
        coeffs in proptest::collection::vec(-2.0f64..2.0, 1..10),
        g1 in 0.0f64..2.0,
        dg in 0.0f64..2.0,
    ) {
        let es: Arc<EigenSystem> = dirichlet_laplacian_eigensystem(std::f64::consts::PI, 10).unwrap();
        let c = ModalCoefficients::new(coeffs, es).unwrap();
        let lo = fractional_power_norm(&c, g1).unwrap().norm;
        let hi = fractional_power_norm(&c, g1 + dg).unwrap().norm;
        prop_assert!(hi >= lo * (1.0 - 1e-14));
    }
}
