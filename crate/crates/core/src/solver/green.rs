//! G(x, y, t) = Σ_n u(λ_n, t) φ_n(x) φ_n(y).
//!
//! u(λ, t) = S(t)/λ + O(λ⁻²) with S(t) = Σ_j q_j t^{−α_j}/Γ(1−α_j), so the
//! series is summed as S(t)·G_A(x, y) + Σ_n (u(λ_n, t) − S(t)/λ_n) φ_n(x) φ_n(y),
//! where G_A is the Green function of A. The remainder decays like λ_n⁻².

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fracops::FractionalOrders;
use crate::mittag_leffler::ModalFactors;
use crate::special::rgamma;
use crate::spectral::EigenSystem;

/// Green function value with an estimate of the discarded modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenValue {
    pub value: f64,
    /// Magnitude of the last doubling block of the remainder series, an
    /// upper estimate of the omitted tail for λ⁻² decay.
    pub tail_estimate: f64,
    pub modes: usize,
}

fn leading_coefficient(orders: &FractionalOrders, t: f64) -> f64 {
    orders
        .alpha()
        .iter()
        .zip(orders.q())
        .map(|(a, q)| q * t.powf(-a) * rgamma(1.0 - a))
        .sum()
}

/// Green function of A at (x, y).
fn elliptic_green(es: &EigenSystem, x: f64, y: f64) -> Result<f64> {
    let l = es.length();
    if es.is_closed_form() {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        return Ok(lo * (l - hi) / l);
    }
    let op = es
        .discrete_operator()
        .expect("finite-difference eigensystem");
    let m = op.dim();
    let h = l / (m + 1) as f64;
    // columns of A_h⁻¹ / h at the nodes bracketing y, interpolated in x and y
    let s = (y / h).clamp(0.0, (m + 1) as f64);
    let j = (s.floor() as usize).min(m);
    let wy = s - j as f64;
    let column = |node: usize| -> Result<Vec<f64>> {
        let mut full = vec![0.0; m + 2];
        if node >= 1 && node <= m {
            let mut e = vec![0.0; m];
            e[node - 1] = 1.0 / h;
            let v = op.solve_shifted(0.0, &e)?;
            full[1..=m].copy_from_slice(&v);
        }
        Ok(full)
    };
    let (c0, c1) = (column(j)?, column(j + 1)?);
    let sx = (x / h).clamp(0.0, (m + 1) as f64);
    let i = (sx.floor() as usize).min(m);
    let wx = sx - i as f64;
    let at = |c: &[f64]| c[i] + wx * (c[i + 1] - c[i]);
    Ok((1.0 - wy) * at(&c0) + wy * at(&c1))
}

/// G(x, y, t) for t > 0 and interior x, y, using every mode of `es` when needed
/// and stopping early once a doubling block of the remainder falls below `trunc_tol`.
pub fn green_function(
    x: f64,
    y: f64,
    t: f64,
    orders: &FractionalOrders,
    es: &Arc<EigenSystem>,
    trunc_tol: f64,
) -> Result<GreenValue> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::arg(
            "t",
            format!("Green function needs t > 0, got {t}"),
        ));
    }
    let l = es.length();
    if !(x > 0.0 && x < l && y > 0.0 && y < l) {
        return Err(Error::arg(
            "x",
            format!("({x}, {y}) not interior to (0, {l})"),
        ));
    }
    if !(trunc_tol > 0.0) {
        return Err(Error::arg("trunc_tol", "must be positive"));
    }
    let s = leading_coefficient(orders, t);
    let f = ModalFactors::new(orders, t, es.lambda(0))?;
    let mut value = s * elliptic_green(es, x, y)?;
    let n = es.len();
    let mut block = 0.0;
    let mut block_end = 16.min(n);
    let mut used = n;
    // Fixed summation order n = 0, 1, … for reproducibility.
    for k in 0..n {
        let lam = es.lambda(k);
        let term = (f.u(lam) - s / lam) * es.phi(k, x) * es.phi(k, y);
        value += term;
        block += term.abs();
        if k + 1 == block_end {
            if block < trunc_tol && k + 1 >= 16 {
                used = k + 1;
                break;
            }
            block = 0.0;
            block_end = (2 * block_end).min(n);
        }
    }
    let tail_estimate = if used < n {
        block
    } else {
        block.max(f64::MIN_POSITIVE)
    };
    if used == n && block >= trunc_tol {
        return Err(Error::TruncationUnreachable {
            requested: trunc_tol,
            achieved: block,
            modes: n,
        });
    }
    Ok(GreenValue {
        value,
        tail_estimate,
        modes: used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::solve_homogeneous;
    use crate::spectral::{
        dirichlet_laplacian_eigensystem, project_fn, sturm_liouville_eigensystem, OperatorSpec,
    };
    use std::f64::consts::PI;

    #[test]
    fn symmetric_and_rejects_t_zero() {
        let es = dirichlet_laplacian_eigensystem(PI, 4096).unwrap();
        let o = FractionalOrders::new(vec![0.8, 0.4], vec![1.0, 1.0]).unwrap();
        let a = green_function(0.4, 2.1, 0.3, &o, &es, 1e-8).unwrap();
        let b = green_function(2.1, 0.4, 0.3, &o, &es, 1e-8).unwrap();
        assert_eq!(a.value, b.value);
        assert!(a.value > 0.0);
        assert!(green_function(0.4, 2.1, 0.0, &o, &es, 1e-8).is_err());
        assert!(green_function(0.0, 2.1, 1.0, &o, &es, 1e-8).is_err());
    }

    #[test]
    fn elliptic_green_agrees_between_closed_form_and_finite_difference() {
        let spec = OperatorSpec::laplacian(PI).unwrap();
        let fd = sturm_liouville_eigensystem(&spec, 255, 16).unwrap();
        let cf = dirichlet_laplacian_eigensystem(PI, 16).unwrap();
        // the diagonal is checked at a node; bilinear interpolation across the kink is only O(h)
        let node = 128.0 * PI / 256.0;
        for (x, y) in [(0.3, 1.2), (2.0, 2.9), (node, node)] {
            let a = elliptic_green(&fd, x, y).unwrap();
            let b = elliptic_green(&cf, x, y).unwrap();
            assert!((a - b).abs() < 1e-10, "({x}, {y}): {a} vs {b}");
        }
    }

    #[test]
    fn integrating_against_data_reproduces_the_solution() {
        let es = dirichlet_laplacian_eigensystem(PI, 2048).unwrap();
        let o = FractionalOrders::new(vec![0.7, 0.3], vec![1.0, 0.5]).unwrap();
        let data = |y: f64| y * (PI - y) * (1.0 + y.sin());
        let a = project_fn(data, &es, 2048).unwrap();
        let sol = solve_homogeneous(&a, &o, 1e-9, 0.05).unwrap();
        let (x, t) = (1.1, 0.5);
        // trapezoid in y over the kink of G at y = x, with x a node
        let n = 2200;
        let h = PI / n as f64;
        let x = (x / h).round() * h;
        let mut integral = 0.0;
        for i in 1..n {
            let y = i as f64 * h;
            integral += h * green_function(x, y, t, &o, &es, 1e-10).unwrap().value * data(y);
        }
        let direct = sol.eval(x, t).unwrap();
        assert!((integral - direct).abs() < 1e-6, "{integral} vs {direct}");
    }
}
