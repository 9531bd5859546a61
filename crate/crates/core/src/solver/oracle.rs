//! Independent finite-difference solver: L1 Caputo weights in time on a
//! uniform grid, three-point differences in space.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fracops::{FractionalOrders, TimeGrid};
use crate::special::rgamma;
use crate::spectral::OperatorSpec;

/// Right-hand side F(x, t) of the oracle.
#[derive(Debug, Clone)]
pub enum SpaceTimeSource {
    Zero,
    /// ρ(t_k) g(x_i) from samples at the time nodes and at all M + 2 space nodes.
    Separable {
        rho: Vec<f64>,
        g: Vec<f64>,
    },
    /// Rows over time nodes, columns over all M + 2 space nodes.
    Samples(Vec<Vec<f64>>),
}

impl SpaceTimeSource {
    fn row(&self, k: usize, out: &mut [f64]) {
        match self {
            SpaceTimeSource::Zero => out.iter_mut().for_each(|v| *v = 0.0),
            SpaceTimeSource::Separable { rho, g } => {
                out.iter_mut().zip(g).for_each(|(v, gi)| *v = rho[k] * gi)
            }
            SpaceTimeSource::Samples(rows) => out.copy_from_slice(&rows[k]),
        }
    }

    fn check(&self, steps: usize, nx: usize) -> Result<()> {
        let bad = |what: String| Err(Error::GridMismatch(what));
        match self {
            SpaceTimeSource::Zero => Ok(()),
            SpaceTimeSource::Separable { rho, g } => {
                if rho.len() != steps + 1 || g.len() != nx {
                    return bad(format!(
                        "source has {}×{} samples, grid {}×{nx}",
                        rho.len(),
                        g.len(),
                        steps + 1
                    ));
                }
                Ok(())
            }
            SpaceTimeSource::Samples(rows) => {
                if rows.len() != steps + 1 || rows.iter().any(|r| r.len() != nx) {
                    return bad(format!(
                        "source rows do not match the {}×{nx} grid",
                        steps + 1
                    ));
                }
                Ok(())
            }
        }
    }
}

/// u(x_i, t_k) on the oracle grid.
#[derive(Debug, Clone)]
pub struct GridSolution {
    /// x_i = i h, i = 0..=M+1, ends included.
    pub xs: Vec<f64>,
    pub grid: Arc<TimeGrid>,
    /// One row per time node.
    pub values: Vec<Vec<f64>>,
}

impl GridSolution {
    /// Linear interpolation in x at time node k.
    pub fn eval_at_node(&self, x: f64, k: usize) -> f64 {
        let row = &self.values[k];
        let h = self.xs[1];
        let n = self.xs.len() - 1;
        let s = (x / h).clamp(0.0, n as f64);
        let i = (s.floor() as usize).min(n - 1);
        let w = s - i as f64;
        row[i] + w * (row[i + 1] - row[i])
    }
}

/// L1 weights b_l = (l+1)^{1−α} − l^{1−α}, l = 0..n.
fn l1_weights(alpha: f64, n: usize) -> Vec<f64> {
    let e = 1.0 - alpha;
    (0..n)
        .map(|l| ((l + 1) as f64).powf(e) - (l as f64).powf(e))
        .collect()
}

/// Marches Σ_j q_j ∂^{α_j} u + A_h u = F from u(·, 0) = a on a uniform grid.
///
/// With B_l = Σ_j q_j τ^{−α_j} b_l^{(j)} / Γ(2 − α_j), step k solves
/// (B_0 I + A_h) u^k = F^k + B_{k−1} u^0 + Σ_{i=1}^{k−1} (B_{i−1} − B_i) u^{k−i}.
pub fn solve_l1_oracle(
    a: &[f64],
    source: &SpaceTimeSource,
    orders: &FractionalOrders,
    spec: &OperatorSpec,
    m: usize,
    grid: &Arc<TimeGrid>,
) -> Result<GridSolution> {
    if !grid.is_uniform() {
        return Err(Error::arg(
            "grid",
            "the L1 oracle needs a uniform time grid",
        ));
    }
    let steps = grid.steps();
    if steps == 0 {
        return Err(Error::arg("grid", "no time steps"));
    }
    let nx = m + 2;
    if a.len() != nx {
        return Err(Error::GridMismatch(format!(
            "initial data has {} samples, grid {nx}",
            a.len()
        )));
    }
    source.check(steps, nx)?;
    let op = spec.finite_difference(m)?;
    let h = spec.mesh_width(m);
    let xs: Vec<f64> = (0..nx)
        .map(|i| {
            if i == nx - 1 {
                spec.length()
            } else {
                i as f64 * h
            }
        })
        .collect();
    let tau = grid.horizon() / steps as f64;
    let mut big_b = vec![0.0; steps];
    for (alpha, q) in orders.alpha().iter().zip(orders.q()) {
        let c = q * tau.powf(-alpha) * rgamma(2.0 - alpha);
        for (bl, w) in big_b.iter_mut().zip(l1_weights(*alpha, steps)) {
            *bl += c * w;
        }
    }

    let mut values: Vec<Vec<f64>> = Vec::with_capacity(steps + 1);
    let mut first = a.to_vec();
    first[0] = 0.0;
    first[nx - 1] = 0.0;
    values.push(first);
    let mut f = vec![0.0; nx];
    let mut rhs = vec![0.0; m];
    for k in 1..=steps {
        source.row(k, &mut f);
        rhs.copy_from_slice(&f[1..=m]);
        let u0 = &values[0];
        for (r, v) in rhs.iter_mut().zip(&u0[1..=m]) {
            *r += big_b[k - 1] * v;
        }
        for i in 1..k {
            let c = big_b[i - 1] - big_b[i];
            let prev = &values[k - i];
            for (r, v) in rhs.iter_mut().zip(&prev[1..=m]) {
                *r += c * v;
            }
        }
        let u = op.solve_shifted(big_b[0], &rhs)?;
        let mut row = vec![0.0; nx];
        row[1..=m].copy_from_slice(&u);
        values.push(row);
    }
    Ok(GridSolution {
        xs,
        grid: grid.clone(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_stays_zero() {
        let spec = OperatorSpec::laplacian(1.0).unwrap();
        let grid = Arc::new(TimeGrid::uniform(1.0, 8).unwrap());
        let o = FractionalOrders::single(0.5).unwrap();
        let s = solve_l1_oracle(&[0.0; 12], &SpaceTimeSource::Zero, &o, &spec, 10, &grid).unwrap();
        assert!(s.values.iter().flatten().all(|&v| v == 0.0));
        let graded = Arc::new(TimeGrid::new(1.0, 8, 2.0).unwrap());
        assert!(
            solve_l1_oracle(&[0.0; 12], &SpaceTimeSource::Zero, &o, &spec, 10, &graded).is_err()
        );
    }

    #[test]
    fn l1_weights_sum_telescopes() {
        let w = l1_weights(0.3, 10);
        assert!((w.iter().sum::<f64>() - 10f64.powf(0.7)).abs() < 1e-13);
        assert!(w.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn single_mode_relaxation_against_closed_form() {
        // u = E_{1/2}(−λ t^{1/2}) sin(πx) on (0, 1), λ the discrete eigenvalue
        let m = 63;
        let spec = OperatorSpec::laplacian(1.0).unwrap();
        let h = 1.0 / (m + 1) as f64;
        let lam = 2.0 * (1.0 - (std::f64::consts::PI * h).cos()) / (h * h);
        let a: Vec<f64> = (0..m + 2)
            .map(|i| (std::f64::consts::PI * i as f64 * h).sin())
            .collect();
        let o = FractionalOrders::single(0.5).unwrap();
        let mut errs = Vec::new();
        for steps in [200, 400, 800] {
            let grid = Arc::new(TimeGrid::uniform(0.1, steps).unwrap());
            let s = solve_l1_oracle(&a, &SpaceTimeSource::Zero, &o, &spec, m, &grid).unwrap();
            let z = lam * 0.1f64.sqrt();
            let exact = (z * z).exp() * libm::erfc(z);
            errs.push((s.values[steps][32] - exact).abs());
        }
        assert!(
            errs[0] < 1e-2 && errs[1] < errs[0] && errs[2] < errs[1],
            "{errs:?}"
        );
    }
}
