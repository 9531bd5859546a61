use std::f64::consts::PI;
use std::sync::Arc;

use mlfrac::fracops::{FractionalOrders, SampledFunction, TimeGrid};
use mlfrac::solver::*;
use mlfrac::spectral::*;
use proptest::prelude::*;

fn canonical() -> FractionalOrders {
    FractionalOrders::new(vec![0.8, 0.4], vec![1.0, 1.0]).unwrap()
}

fn rel_linf(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for (a, b) in pairs {
        err = err.max((a - b).abs());
        scale = scale.max(b.abs());
    }
    err / scale
}

/// Oracle nodes k with t_k in [0.05, T], every `stride`-th one.
fn compared_nodes(grid: &TimeGrid, stride: usize) -> Vec<usize> {
    (0..=grid.steps())
        .filter(|&k| grid.node(k) >= 0.05 && k % stride == 0)
        .collect()
}

fn spectral_vs_oracle(orders: &FractionalOrders, steps: usize, m: usize) -> f64 {
    let es = dirichlet_laplacian_eigensystem(PI, 64).unwrap();
    let a = project_fn(|x| x.sin() * (1.0 + 0.3 * (2.0 * x).cos()), &es, 64).unwrap();
    let spectral = solve_homogeneous(&a, orders, 1e-9, 0.05).unwrap();
    let spec = OperatorSpec::laplacian(PI).unwrap();
    let grid = Arc::new(TimeGrid::uniform(2.0, steps).unwrap());
    let h = spec.mesh_width(m);
    let a0: Vec<f64> = (0..m + 2).map(|i| a.eval(i as f64 * h)).collect();
    let oracle = solve_l1_oracle(&a0, &SpaceTimeSource::Zero, orders, &spec, m, &grid).unwrap();
    let ks = compared_nodes(&grid, steps / 32);
    let ts: Vec<f64> = ks.iter().map(|&k| grid.node(k)).collect();
    let reference = spectral.eval_grid(&oracle.xs, &ts).unwrap();
    rel_linf(
        ks.iter()
            .zip(&reference)
            .flat_map(|(&k, row)| oracle.values[k].iter().copied().zip(row.iter().copied())),
    )
}

#[test]
fn spectral_solution_agrees_with_oracle_for_one_and_two_terms() {
    let one = FractionalOrders::single(0.6).unwrap();
    for orders in [one, canonical()] {
        let err = spectral_vs_oracle(&orders, 1024, 128);
        assert!(err <= 1e-2, "{:?}: relative L∞ {err:e}", orders.alpha());
    }
}

#[test]
fn oracle_error_decreases_under_time_refinement() {
    let orders = canonical();
    let errs: Vec<f64> = [128, 256, 512, 1024]
        .iter()
        .map(|&k| spectral_vs_oracle(&orders, k, 64))
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn duhamel_solution_agrees_with_oracle() {
    let orders = canonical();
    let es = dirichlet_laplacian_eigensystem(PI, 8).unwrap();
    let g = project_fn(f64::sin, &es, 8).unwrap();
    let tgrid = Arc::new(TimeGrid::graded_for(2.0, 512, 0.8).unwrap());
    let rho = SampledFunction::from_fn(tgrid, |t| 1.0 + t / 2.0);
    let src = SourceSpec::new(rho, g).unwrap();
    let spectral = solve_source_duhamel(&src, &orders, 1e-9).unwrap();

    let m = 128;
    let spec = OperatorSpec::laplacian(PI).unwrap();
    let grid = Arc::new(TimeGrid::uniform(2.0, 1024).unwrap());
    let h = spec.mesh_width(m);
    let gx: Vec<f64> = (0..m + 2).map(|i| (i as f64 * h).sin()).collect();
    let rho_k: Vec<f64> = grid.nodes().iter().map(|t| 1.0 + t / 2.0).collect();
    let source = SpaceTimeSource::Separable { rho: rho_k, g: gx };
    let oracle = solve_l1_oracle(&vec![0.0; m + 2], &source, &orders, &spec, m, &grid).unwrap();
    let ks = compared_nodes(&grid, 32);
    let ts: Vec<f64> = ks.iter().map(|&k| grid.node(k)).collect();
    let reference = spectral.eval_grid(&oracle.xs, &ts).unwrap();
    let err = rel_linf(
        ks.iter()
            .zip(&reference)
            .flat_map(|(&k, row)| oracle.values[k].iter().copied().zip(row.iter().copied())),
    );
    assert!(err <= 1e-2, "relative L∞ {err:e}");
}

#[test]
fn superposition_holds_on_the_oracle() {
    let orders = canonical();
    let spec = OperatorSpec::laplacian(PI).unwrap();
    let m = 31;
    let grid = Arc::new(TimeGrid::uniform(1.0, 64).unwrap());
    let h = spec.mesh_width(m);
    let a: Vec<f64> = (0..m + 2)
        .map(|i| (i as f64 * h) * (PI - i as f64 * h))
        .collect();
    let rows: Vec<Vec<f64>> = grid
        .nodes()
        .iter()
        .map(|t| (0..m + 2).map(|i| (t * i as f64 * h).cos()).collect())
        .collect();
    let source = SpaceTimeSource::Samples(rows);
    let both = solve_l1_oracle(&a, &source, &orders, &spec, m, &grid).unwrap();
    let only_a = solve_l1_oracle(&a, &SpaceTimeSource::Zero, &orders, &spec, m, &grid).unwrap();
    let only_f = solve_l1_oracle(&vec![0.0; m + 2], &source, &orders, &spec, m, &grid).unwrap();
    for k in 0..=grid.steps() {
        for i in 0..m + 2 {
            let sum = only_a.values[k][i] + only_f.values[k][i];
            assert!((both.values[k][i] - sum).abs() <= 1e-6, "({k}, {i})");
        }
        assert_eq!(both.values[k][0], 0.0);
        assert_eq!(both.values[k][m + 1], 0.0);
    }
}

#[test]
fn superposition_holds_on_the_spectral_path() {
    let orders = canonical();
    let es = dirichlet_laplacian_eigensystem(PI, 16).unwrap();
    let grid = Arc::new(TimeGrid::graded_for(1.0, 512, 0.8).unwrap());
    // finite modal sums without a projection tail, so every mode is retained
    let g1 = ModalCoefficients::new((0..16).map(|n| 1.0 / (n + 1) as f64).collect(), es.clone())
        .unwrap();
    let g2 =
        ModalCoefficients::new((0..16).map(|n| (n as f64).cos()).collect(), es.clone()).unwrap();
    let g12 = ModalCoefficients::new(
        g1.values()
            .iter()
            .zip(g2.values())
            .map(|(a, b)| a + b)
            .collect(),
        es.clone(),
    )
    .unwrap();
    let rho = SampledFunction::from_fn(grid, |t| (2.0 * t).cos());
    let solve = |g: &ModalCoefficients| {
        solve_source_duhamel(
            &SourceSpec::new(rho.clone(), g.clone()).unwrap(),
            &orders,
            1e-14,
        )
        .unwrap()
    };
    let (s1, s2, s12) = (solve(&g1), solve(&g2), solve(&g12));
    for &(x, t) in &[(0.3, 0.1), (1.5, 0.5), (2.8, 1.0)] {
        let lhs = s12.eval(x, t).unwrap();
        let rhs = s1.eval(x, t).unwrap() + s2.eval(x, t).unwrap();
        assert!((lhs - rhs).abs() <= 1e-8, "({x}, {t}): {lhs} vs {rhs}");
    }
}

#[test]
fn first_mode_decays_monotonically() {
    let es = dirichlet_laplacian_eigensystem(PI, 4).unwrap();
    let a = ModalCoefficients::unit(0, 4, es).unwrap();
    let sol = solve_homogeneous(&a, &canonical(), 1e-10, 1e-3).unwrap();
    let ts: Vec<f64> = (0..=120)
        .map(|i| 1e-3 * 10f64.powf(i as f64 / 20.0))
        .collect();
    let u: Vec<f64> = ts.iter().map(|&t| sol.eval(PI / 2.0, t).unwrap()).collect();
    assert!(u.windows(2).all(|w| w[1] <= w[0]), "{u:?}");
    // single mode: u(x, t)/φ₁(x) does not depend on x
    let r1 = sol.eval(0.4, 0.7).unwrap() / (0.4f64).sin();
    let r2 = sol.eval(2.2, 0.7).unwrap() / (2.2f64).sin();
    assert!((r1 - r2).abs() < 1e-14);
}

#[test]
fn boundary_values_are_exactly_zero() {
    let es = dirichlet_laplacian_eigensystem(PI, 32).unwrap();
    let a = project_fn(|x| (3.0 * x).cos() + 2.0, &es, 32).unwrap();
    let sol = solve_homogeneous(&a, &canonical(), 1e-1, 1e-2).unwrap();
    for t in [0.0, 0.01, 0.5, 20.0] {
        assert_eq!(sol.eval(0.0, t).unwrap(), 0.0);
        assert_eq!(sol.eval(PI, t).unwrap(), 0.0);
    }
}

// Frozen from ‖u(·, t)‖ / ‖a‖ over the families below; every modal factor lies in (0, 1].
const L2_STABILITY_CONSTANT: f64 = 1.0;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn l2_norm_is_bounded_by_the_initial_norm(
        coeffs in proptest::collection::vec(-1.0f64..1.0, 1..24),
        t in 1e-3f64..10.0,
        which in 0usize..2,
    ) {
        let orders = [canonical(), FractionalOrders::new(vec![0.9, 0.5, 0.1], vec![1.0, 0.3, 2.0]).unwrap()];
        let es = dirichlet_laplacian_eigensystem(PI, 24).unwrap();
        let a = ModalCoefficients::new(coeffs, es).unwrap();
        let norm_a = a.values().iter().map(|c| c * c).sum::<f64>().sqrt();
        let sol = solve_homogeneous(&a, &orders[which], 1e-12, 1e-3).unwrap();
        prop_assert!(sol.l2_norm(t).unwrap() <= L2_STABILITY_CONSTANT * norm_a * (1.0 + 1e-12));
    }

    #[test]
    fn green_function_is_nonnegative(
        x in 0.05f64..3.09,
        y in 0.05f64..3.09,
        log_t in -2.0f64..2.0,
        a1 in 0.5f64..0.95,
        ratio in 0.1f64..0.9,
    ) {
        let orders = FractionalOrders::new(vec![a1, a1 * ratio], vec![1.0, 1.0]).unwrap();
        let es = dirichlet_laplacian_eigensystem(PI, 2048).unwrap();
        let g = green_function(x, y, 10f64.powf(log_t), &orders, &es, 1e-10).unwrap();
        prop_assert!(g.value >= -1e-8, "G = {}", g.value);
    }
}
