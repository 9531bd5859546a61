use serde::Serialize;

use crate::error::{Error, Result};
use crate::fracops::FractionalOrders;
use crate::mittag_leffler::solution_factor_with;
use crate::mittag_leffler::MlContext;

/// Sign check of the order-k divided differences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderSign {
    pub order: usize,
    pub holds: bool,
    /// Smallest (−1)^k f[t_i, …, t_{i+k}] over the grid; positive when the check holds.
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub lambda: f64,
    pub orders: Vec<OrderSign>,
}

impl MonotonicityReport {
    pub fn all_hold(&self) -> bool {
        self.orders.iter().all(|o| o.holds)
    }
}

const MAX_DEPTH: usize = 6;
const FACTOR_TOL: f64 = 1e-14;

/// Divided differences of t ↦ u(λ, t) up to order `depth` on an increasing grid,
/// each expected to carry the sign (−1)^k.
pub fn check_complete_monotonicity(
    lambda: f64,
    orders: &FractionalOrders,
    t_grid: &[f64],
    depth: usize,
) -> Result<MonotonicityReport> {
    if depth > MAX_DEPTH {
        return Err(Error::arg("depth", format!("{depth} exceeds {MAX_DEPTH}")));
    }
    if t_grid.len() < depth + 1 {
        return Err(Error::arg(
            "t_grid",
            format!(
                "{} points cannot carry order-{depth} differences",
                t_grid.len()
            ),
        ));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.first().is_some_and(|t| !(*t > 0.0)) {
        return Err(Error::arg(
            "t_grid",
            "must be positive and strictly increasing",
        ));
    }
    let mut ctx = MlContext::new();
    let mut dd: Vec<f64> = Vec::with_capacity(t_grid.len());
    if depth > 0 {
        for &t in t_grid {
            dd.push(solution_factor_with(lambda, orders, t, FACTOR_TOL, &mut ctx)?.u);
        }
    }
    let mut report = Vec::with_capacity(depth);
    for k in 1..=depth {
        // in place: dd[i] ← (dd[i+1] − dd[i]) / (t_{i+k} − t_i)
        for i in 0..dd.len() - 1 {
            dd[i] = (dd[i + 1] - dd[i]) / (t_grid[i + k] - t_grid[i]);
        }
        dd.pop();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let worst = dd.iter().map(|v| sign * v).fold(f64::INFINITY, f64::min);
        report.push(OrderSign {
            order: k,
            holds: worst > 0.0,
            worst,
        });
    }
    Ok(MonotonicityReport {
        lambda,
        orders: report,
    })
}
