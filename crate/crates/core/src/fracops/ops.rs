use rayon::prelude::*;

use super::weights::{hat_weights_multi, l1_weight};
use super::SampledFunction;
use crate::error::{Error, Result};
use crate::special::{gamma, rgamma};

fn check_order(name: &'static str, v: f64, closed_right: bool) -> Result<()> {
    let ok = v > 0.0 && if closed_right { v <= 1.0 } else { v < 1.0 };
    if ok {
        Ok(())
    } else {
        let range = if closed_right { "(0, 1]" } else { "(0, 1)" };
        Err(Error::arg(name, format!("must lie in {range}, got {v}")))
    }
}

/// Σ_j coefs_j · J^{β_j} f evaluated at any t ∈ (0, T].
///
/// Full panels up to the one containing t use the stored cofactors; the last
/// partial panel uses the interpolated cofactor at t.
pub fn multi_rl_integral_at(f: &SampledFunction, betas: &[f64], coefs: &[f64], t: f64) -> f64 {
    debug_assert_eq!(betas.len(), coefs.len());
    let grid = f.grid();
    let nodes = grid.nodes();
    let cof = f.cofactors();
    let p = f.singular_exponent();
    if t <= 0.0 {
        return 0.0;
    }
    let i0 = grid.locate(t);
    let scaled: Vec<f64> = betas
        .iter()
        .zip(coefs)
        .map(|(b, c)| c * rgamma(*b))
        .collect();
    let mut w = vec![(0.0, 0.0); betas.len()];
    let mut acc = 0.0;
    let mut add = |a: f64, b: f64, ca: f64, cb: f64, w: &mut [(f64, f64)]| {
        hat_weights_multi(t, a, b, betas, p, w);
        for (wj, sj) in w.iter().zip(&scaled) {
            acc += sj * (wj.0 * ca + wj.1 * cb);
        }
    };
    let full = if t >= nodes[i0 + 1] { i0 + 1 } else { i0 };
    for i in 0..full {
        add(nodes[i], nodes[i + 1], cof[i], cof[i + 1], &mut w);
    }
    if full == i0 && t > nodes[i0] {
        add(nodes[i0], t, cof[i0], f.cofactor_at(t), &mut w);
    }
    acc
}

/// J^β h sampled on the grid of h, by exact product integration of the
/// representation t^p · (piecewise-linear cofactor).
///
/// The result carries the singular exponent min(p + β, 0).
pub fn rl_integral(h: &SampledFunction, beta: f64) -> Result<SampledFunction> {
    check_order("beta", beta, true)?;
    let grid = h.grid();
    let nodes = grid.nodes();
    let p = h.singular_exponent();
    let cof = h.cofactors();
    let k_max = grid.steps();
    let q = (p + beta).min(0.0);
    let rg = rgamma(beta);
    let mut out: Vec<f64> = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let t = nodes[k];
            let mut w = [(0.0, 0.0)];
            let mut acc = 0.0;
            for i in 0..k {
                hat_weights_multi(t, nodes[i], nodes[i + 1], &[beta], p, &mut w);
                acc += w[0].0 * cof[i] + w[0].1 * cof[i + 1];
            }
            let v = acc * rg;
            if q == 0.0 {
                v
            } else {
                v * t.powf(-q)
            }
        })
        .collect();
    let c0 = if p + beta <= 0.0 {
        cof[0] * gamma(p + 1.0) * rgamma(p + 1.0 + beta)
    } else {
        0.0
    };
    out.insert(0, c0);
    SampledFunction::from_cofactors(grid.clone(), q, out)
}

/// L1 approximation of the Caputo derivative ∂^α h for a nonsingular h.
pub fn caputo_derivative(h: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    check_order("alpha", alpha, false)?;
    if h.singular_exponent() != 0.0 {
        return Err(Error::arg(
            "h",
            format!(
                "Caputo derivative needs a nonsingular input, got exponent {}",
                h.singular_exponent()
            ),
        ));
    }
    let grid = h.grid();
    let nodes = grid.nodes();
    let c = h.cofactors();
    let rg = rgamma(2.0 - alpha);
    let mut out: Vec<f64> = (1..=grid.steps())
        .into_par_iter()
        .map(|k| {
            let t = nodes[k];
            (0..k)
                .map(|i| l1_weight(t, nodes[i], nodes[i + 1], alpha, rg) * (c[i + 1] - c[i]))
                .sum()
        })
        .collect();
    out.insert(0, 0.0);
    SampledFunction::from_cofactors(grid.clone(), 0.0, out)
}

/// Riemann–Liouville derivative D^β h = d/dt J^{1−β} h.
///
/// J^{1−β} h is differenced at half nodes, scaled by t^{β−p} and the resulting
/// cofactors are interpolated back to the nodes. First-order accurate. The
/// result carries the singular exponent p − β.
pub fn rl_derivative(h: &SampledFunction, beta: f64) -> Result<SampledFunction> {
    check_order("beta", beta, false)?;
    let p = h.singular_exponent();
    let q_out = p - beta;
    if q_out <= -1.0 {
        return Err(Error::arg(
            "beta",
            format!("D^{beta} of a t^{p} singular input is not integrable at the origin"),
        ));
    }
    let grid = h.grid();
    let k_max = grid.steps();
    if k_max < 3 {
        return Err(Error::arg(
            "h",
            "numerical differentiation needs at least 3 steps",
        ));
    }
    let g = rl_integral(h, 1.0 - beta)?;
    let gv = g.values();
    let nodes = grid.nodes();
    let first = if g.singular_exponent() < 0.0 { 1 } else { 0 };
    // Half-node i sits between t_i and t_{i+1}.
    let half: Vec<(f64, f64)> = (first..k_max)
        .map(|i| {
            let tm = 0.5 * (nodes[i] + nodes[i + 1]);
            let d = (gv[i + 1] - gv[i]) / (nodes[i + 1] - nodes[i]);
            (tm, d * tm.powf(-q_out))
        })
        .collect();
    let lerp = |a: (f64, f64), b: (f64, f64), t: f64| a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0);
    let mut out = vec![0.0; k_max + 1];
    out[0] = h.cofactors()[0] * gamma(p + 1.0) * rgamma(p + 1.0 - beta);
    for (k, o) in out.iter_mut().enumerate().skip(1) {
        let t = nodes[k];
        // half index j holds half-node (first + j).
        let right = k as isize - first as isize;
        let (a, b) = if right <= 0 {
            (half[0], half[1])
        } else if right as usize >= half.len() {
            (half[half.len() - 2], half[half.len() - 1])
        } else {
            (half[right as usize - 1], half[right as usize])
        };
        *o = lerp(a, b, t);
    }
    SampledFunction::from_cofactors(grid.clone(), q_out, out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fracops::TimeGrid;

    fn grid(k: usize, r: f64) -> Arc<TimeGrid> {
        Arc::new(TimeGrid::new(1.0, k, r).unwrap())
    }

    #[test]
    fn integral_of_constant_is_power() {
        let g = grid(64, 2.0);
        let h = SampledFunction::from_fn(g.clone(), |_| 1.0);
        let j = rl_integral(&h, 0.5).unwrap();
        for (k, &t) in g.nodes().iter().enumerate().skip(1) {
            let exact = t.sqrt() * rgamma(1.5);
            assert!((j.value(k) - exact).abs() < 1e-13, "{k}");
        }
        assert!((j.value(64) - 1.1283791670955126).abs() < 1e-13);
    }

    #[test]
    fn integral_of_singular_power_is_constant() {
        let g = grid(40, 3.0);
        let h = SampledFunction::from_cofactors(g.clone(), -0.5, vec![rgamma(0.5); 41]).unwrap();
        let j = rl_integral(&h, 0.5).unwrap();
        assert_eq!(j.singular_exponent(), 0.0);
        for v in j.values() {
            assert!((v - 1.0).abs() < 1e-13, "{v}");
        }
    }

    #[test]
    fn zero_in_zero_out() {
        let g = grid(16, 1.0);
        let z = SampledFunction::zeros(g.clone(), 0.0);
        assert!(rl_integral(&z, 0.3)
            .unwrap()
            .values()
            .iter()
            .all(|v| *v == 0.0));
        assert!(caputo_derivative(&z, 0.3)
            .unwrap()
            .values()
            .iter()
            .all(|v| *v == 0.0));
        assert!(rl_derivative(&z, 0.3)
            .unwrap()
            .values()
            .iter()
            .all(|v| *v == 0.0));
    }

    #[test]
    fn caputo_of_linear_is_exact() {
        let g = grid(32, 1.0);
        let h = SampledFunction::from_fn(g.clone(), |t| t);
        let d = caputo_derivative(&h, 0.5).unwrap();
        assert!((d.value(32) - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-13);
        let c = SampledFunction::from_fn(g, |_| 3.0);
        assert!(caputo_derivative(&c, 0.5)
            .unwrap()
            .values()
            .iter()
            .all(|v| *v == 0.0));
    }

    #[test]
    fn caputo_error_decreases_under_refinement() {
        let alpha = 0.6;
        let exact = 2.0 * rgamma(3.0 - alpha);
        let mut last = f64::INFINITY;
        for k in [16, 32, 64, 128] {
            let g = grid(k, 1.0);
            let h = SampledFunction::from_fn(g, |t| t * t);
            let err = (caputo_derivative(&h, alpha).unwrap().value(k) - exact).abs();
            assert!(err < last, "K={k}: {err} !< {last}");
            last = err;
        }
    }

    #[test]
    fn caputo_rejects_singular_input() {
        let g = grid(8, 1.0);
        let h = SampledFunction::from_cofactors(g, -0.3, vec![1.0; 9]).unwrap();
        assert!(caputo_derivative(&h, 0.5).is_err());
    }

    #[test]
    fn rl_derivative_of_power_is_constant() {
        let beta = 0.4;
        let g = grid(512, 2.0);
        let h = SampledFunction::from_fn(g.clone(), |t| t.powf(beta) * rgamma(1.0 + beta));
        let d = rl_derivative(&h, beta).unwrap();
        for k in (g.steps() / 8)..=g.steps() {
            assert!((d.value(k) - 1.0).abs() < 2e-2, "{k}: {}", d.value(k));
        }
    }

    #[test]
    fn evaluation_off_grid_matches_nodes() {
        let g = grid(20, 2.0);
        let h = SampledFunction::from_fn(g.clone(), |t| 1.0 + t * t);
        let j = rl_integral(&h, 0.7).unwrap();
        for k in 1..=20 {
            let v = multi_rl_integral_at(&h, &[0.7], &[1.0], g.node(k));
            assert!((v - j.value(k)).abs() < 1e-14 * j.value(k).abs().max(1.0));
        }
    }
}
