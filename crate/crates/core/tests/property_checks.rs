use std::f64::consts::PI;

use mlfrac::fracops::FractionalOrders;
use mlfrac::properties::*;
use mlfrac::solver::solve_homogeneous;
use mlfrac::special::gamma;
use mlfrac::spectral::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn canonical() -> FractionalOrders {
    FractionalOrders::new(vec![0.8, 0.4], vec![1.0, 1.0]).unwrap()
}

/// Smooth bump supported on (0, π/4).
fn left_bump(x: f64) -> f64 {
    let s = 4.0 * x / PI;
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        (-1.0 / (s * (1.0 - s))).exp() * 1e2
    }
}

#[test]
fn nonnegative_data_stay_nonnegative() {
    let es = dirichlet_laplacian_eigensystem(PI, 4096).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let xs: Vec<f64> = (1..=64).map(|i| i as f64 * PI / 65.0).collect();
    let ts = geometric_grid(1e-2, 10.0, 64);
    for _ in 0..5 {
        let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = project_fn(
            |x| {
                c.iter()
                    .enumerate()
                    .map(|(n, v)| v * ((n + 1) as f64 * x).sin())
                    .sum::<f64>()
                    .max(0.0)
            },
            &es,
            4096,
        )
        .unwrap();
        let sol = solve_homogeneous(&a, &canonical(), 1e-9, 1e-2).unwrap();
        let r = verify_weak_maximum(&sol, &xs, &ts, 1e-8, Some(DataSign::Nonnegative)).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn zero_data_give_a_zero_minimum() {
    let es = dirichlet_laplacian_eigensystem(PI, 8).unwrap();
    let a = ModalCoefficients::new(vec![0.0; 8], es).unwrap();
    let sol = solve_homogeneous(&a, &canonical(), 1e-9, 1e-2).unwrap();
    let r = verify_weak_maximum(
        &sol,
        &[0.5, 1.0],
        &[0.1, 1.0],
        1e-8,
        Some(DataSign::Nonnegative),
    )
    .unwrap();
    assert_eq!(r.min_value, 0.0);
    assert_eq!(r.violations, 0);
}

#[test]
fn positivity_away_from_the_support() {
    // u(7π/8, 10⁻²) is about 3·10⁻¹³, so the truncation has to resolve far below it
    let es = dirichlet_laplacian_eigensystem(PI, 8192).unwrap();
    let a = project_fn(left_bump, &es, 8192).unwrap();
    let sol = solve_homogeneous(&a, &canonical(), 1e-14, 1e-2).unwrap();
    let ts = geometric_grid(1e-2, 1e2, 200);
    let r = verify_strict_positivity(&sol, 7.0 * PI / 8.0, &ts, 0.0).unwrap();
    assert!(r.nonpositive.is_empty(), "{r:?}");
}

#[test]
fn first_mode_stays_positive_and_onset_is_immediate() {
    let es = dirichlet_laplacian_eigensystem(PI, 4).unwrap();
    let a = ModalCoefficients::unit(0, 4, es).unwrap();
    let sol = solve_homogeneous(&a, &canonical(), 1e-10, 1e-2).unwrap();
    let ts = geometric_grid(1e-2, 1e2, 200);
    let r = verify_strict_positivity(&sol, PI / 2.0, &ts, 0.0).unwrap();
    assert!(r.nonpositive.is_empty() && r.passed());
    let onset = positivity_onset(&sol, PI / 2.0, &ts).unwrap();
    assert_eq!(onset.onset, Some(ts[0]));
    assert_eq!(positivity_onset(&sol, PI / 2.0, &[]).unwrap().onset, None);
}

#[test]
fn onset_precedes_the_predicted_crossing() {
    let es = dirichlet_laplacian_eigensystem(PI, 8192).unwrap();
    let a = project_fn(left_bump, &es, 8192).unwrap();
    let sol = solve_homogeneous(&a, &canonical(), 1e-14, 1e-2).unwrap();
    let ts = geometric_grid(1e-2, 1e4, 120);
    let r = positivity_onset(&sol, 7.0 * PI / 8.0, &ts).unwrap();
    let onset = r.onset.expect("positive at the end of the window");
    if let Some(p) = r.predicted {
        assert!(onset <= p.max(ts[0]), "{r:?}");
    }
}

#[test]
fn long_time_law_for_the_canonical_case() {
    let es = dirichlet_laplacian_eigensystem(PI, 16).unwrap();
    let a = project_fn(f64::sin, &es, 16).unwrap();
    let sol = solve_homogeneous(&a, &canonical(), 1e-10, 1e-2).unwrap();
    let expect = 1.0 / gamma(0.6);
    assert!((expect - 0.671505).abs() < 1e-6);
    let scaled = 1e4f64.powf(0.4) * sol.eval(PI / 2.0, 1e4).unwrap();
    assert!((scaled - expect).abs() <= 0.02 * expect, "{scaled}");
    let r = verify_asymptotics(&sol, &a, PI / 2.0, &geometric_grid(1e3, 1e5, 41)).unwrap();
    assert!(
        r.exponent_deviation <= 0.02 && r.amplitude_deviation <= 0.02,
        "{r:?}"
    );
    assert!((r.predicted_amplitude - expect).abs() < 1e-9);

    let doubled = canonical().with_q_m(2.0).unwrap();
    let sol2 = solve_homogeneous(&a, &doubled, 1e-10, 1e-2).unwrap();
    let r2 = verify_asymptotics(&sol2, &a, PI / 2.0, &geometric_grid(1e3, 1e5, 41)).unwrap();
    assert!((r2.predicted_amplitude / r.predicted_amplitude - 2.0).abs() < 1e-12);
    let ratio = r2.fitted_amplitude / r.fitted_amplitude;
    assert!((ratio / 2.0 - 1.0).abs() < 0.02, "{ratio}");
}

#[test]
fn sign_changing_data_are_rejected_by_the_log_fit() {
    let es = dirichlet_laplacian_eigensystem(PI, 4).unwrap();
    let a = ModalCoefficients::new(vec![-1.0, 0.0, 0.0, 0.0], es).unwrap();
    let sol = solve_homogeneous(&a, &canonical(), 1e-10, 1e-2).unwrap();
    assert!(verify_asymptotics(&sol, &a, 1.0, &geometric_grid(1e3, 1e5, 5)).is_err());
}

#[test]
fn canonical_factor_alternates_to_order_four() {
    let g = geometric_grid(1e-2, 10.0, 40);
    let r = check_complete_monotonicity(1.0, &canonical(), &g, 4).unwrap();
    assert!(r.all_hold(), "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn modal_factor_alternates_for_random_orders(
        a1 in 0.2f64..0.95,
        r2 in 0.1f64..0.9,
        q2 in 0.1f64..3.0,
        log_lambda in -1.0f64..2.0,
    ) {
        let orders = FractionalOrders::new(vec![a1, a1 * r2], vec![1.0, q2]).unwrap();
        let g = geometric_grid(1e-2, 10.0, 40);
        let r = check_complete_monotonicity(10f64.powf(log_lambda), &orders, &g, 4).unwrap();
        prop_assert!(r.all_hold(), "{:?}", r);
    }
}
