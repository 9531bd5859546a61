use super::weights::hat_weights_multi;
use super::{multi_rl_integral_at, FractionalOrders, SampledFunction};
use crate::error::{Error, Result};
use crate::special::rgamma;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbelOptions {
    /// Largest accepted relative forward residual at panel midpoints.
    pub residual_threshold: f64,
    /// Diagonal entries below this multiple of the row weight count as degenerate.
    pub diagonal_floor: f64,
}

impl Default for AbelOptions {
    fn default() -> Self {
        AbelOptions {
            residual_threshold: 1e-3,
            diagonal_floor: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbelSolution {
    /// μ with singular exponent α₁ − 1.
    pub mu: SampledFunction,
    /// ‖Σ q_j J^{1−α_j} μ − ρ‖_∞ / ‖ρ‖_∞ at panel midpoints.
    pub residual: f64,
    pub min_diagonal: f64,
}

/// Solves Σ_j q_j J^{1−α_j} μ = ρ by collocation at the grid nodes.
pub fn solve_abel_system(rho: &SampledFunction, orders: &FractionalOrders) -> Result<AbelSolution> {
    solve_abel_system_with(rho, orders, &AbelOptions::default())
}

pub fn solve_abel_system_with(
    rho: &SampledFunction,
    orders: &FractionalOrders,
    opts: &AbelOptions,
) -> Result<AbelSolution> {
    if rho.singular_exponent() != 0.0 {
        return Err(Error::arg("rho", "source must be nonsingular"));
    }
    let grid = rho.grid();
    let nodes = grid.nodes();
    let r = rho.cofactors();
    let p = orders.alpha1() - 1.0;
    let betas: Vec<f64> = orders.alpha().iter().map(|a| 1.0 - a).collect();
    let scaled: Vec<f64> = betas
        .iter()
        .zip(orders.q())
        .map(|(b, q)| q * rgamma(*b))
        .collect();
    let k_max = grid.steps();

    let mut c = vec![0.0; k_max + 1];
    // J^{1−α₁}(t^{α₁−1}) → Γ(α₁) at the origin; lower orders vanish there.
    c[0] = r[0] * rgamma(orders.alpha1());
    let mut min_diag = f64::INFINITY;
    let mut w = vec![(0.0, 0.0); betas.len()];
    for k in 1..=k_max {
        let t = nodes[k];
        let mut acc = 0.0;
        let mut scale = 0.0;
        let mut diag = 0.0;
        for i in 0..k {
            hat_weights_multi(t, nodes[i], nodes[i + 1], &betas, p, &mut w);
            let (w0, w1): (f64, f64) = w
                .iter()
                .zip(&scaled)
                .fold((0.0, 0.0), |s, (wj, sj)| (s.0 + sj * wj.0, s.1 + sj * wj.1));
            scale += w0 + w1;
            acc += w0 * c[i];
            if i + 1 < k {
                acc += w1 * c[i + 1];
            } else {
                diag = w1;
            }
        }
        if !(diag > opts.diagonal_floor * scale) {
            return Err(Error::DegenerateDiagonal {
                row: k,
                value: diag,
            });
        }
        min_diag = min_diag.min(diag);
        c[k] = (r[k] - acc) / diag;
    }
    let mu = SampledFunction::from_cofactors(grid.clone(), p, c)?;

    let norm = rho.max_abs();
    let residual = if norm == 0.0 {
        mu.max_abs()
    } else {
        let mut worst: f64 = 0.0;
        for k in 0..k_max {
            let tm = 0.5 * (nodes[k] + nodes[k + 1]);
            let lhs = multi_rl_integral_at(&mu, &betas, orders.q(), tm);
            worst = worst.max((lhs - rho.eval(tm)).abs());
        }
        worst / norm
    };
    if residual > opts.residual_threshold {
        return Err(Error::GridTooCoarse {
            residual,
            threshold: opts.residual_threshold,
        });
    }
    Ok(AbelSolution {
        mu,
        residual,
        min_diagonal: min_diag,
    })
}
