use serde::Serialize;

use super::geometric_grid;
use crate::error::{Error, Result};
use crate::solver::{SolutionKind, SpectralSolution};

/// Sign hypothesis on the data (a, F), declared by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSign {
    Nonnegative,
    /// Control case: negative values are reported but are not failures.
    SignChanging,
}

/// Minimum of u over a sampled (x, t) grid.
///
/// `violations == 0` exactly when `min_value >= -tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub min_value: f64,
    /// (x, t) of the minimum.
    pub argmin: (f64, f64),
    pub violations: usize,
    pub tolerance: f64,
    /// (number of x samples, number of t samples).
    pub grid: (usize, usize),
    pub hypothesis: DataSign,
}

impl PositivityReport {
    /// Violations only count against the nonnegative-data hypothesis.
    pub fn passed(&self) -> bool {
        self.hypothesis == DataSign::SignChanging || self.violations == 0
    }
}

fn check_times(sol: &SpectralSolution, ts: &[f64]) -> Result<()> {
    if let SolutionKind::Homogeneous { t_min, .. } = sol.kind() {
        if let Some(t) = ts.iter().find(|&&t| !(t >= *t_min)) {
            return Err(Error::arg(
                "t_samples",
                format!("{t} lies below t_min = {t_min}"),
            ));
        }
    }
    Ok(())
}

/// Evaluates u on `xs` × `ts` and counts values below −`tol`.
pub fn verify_weak_maximum(
    sol: &SpectralSolution,
    xs: &[f64],
    ts: &[f64],
    tol: f64,
    sign: Option<DataSign>,
) -> Result<PositivityReport> {
    let hypothesis = sign.ok_or(Error::HypothesisMissing(
        "sign of the initial data and source",
    ))?;
    if xs.is_empty() || ts.is_empty() {
        return Err(Error::arg("samples", "x and t samples must be nonempty"));
    }
    if !(tol >= 0.0) {
        return Err(Error::arg("tol", format!("must be nonnegative, got {tol}")));
    }
    check_times(sol, ts)?;
    let values = sol.eval_grid(xs, ts)?;
    let mut min_value = f64::INFINITY;
    let mut argmin = (xs[0], ts[0]);
    let mut violations = 0;
    for (row, &t) in values.iter().zip(ts) {
        for (&v, &x) in row.iter().zip(xs) {
            if v < min_value {
                min_value = v;
                argmin = (x, t);
            }
            if v < -tol {
                violations += 1;
            }
        }
    }
    Ok(PositivityReport {
        min_value,
        argmin,
        violations,
        tolerance: tol,
        grid: (xs.len(), ts.len()),
        hypothesis,
    })
}

/// Samples with u(x0, t) ≤ tol, and whether any of them persists under refinement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrictPositivityReport {
    pub x0: f64,
    pub min_value: f64,
    pub argmin: f64,
    pub tolerance: f64,
    pub samples: usize,
    /// Sample times flagged as nonpositive.
    pub nonpositive: Vec<f64>,
    /// Longest run of adjacent flagged points among the refinement samples.
    pub longest_refined_run: usize,
    /// A refined run longer than two points.
    pub persistent: bool,
}

impl StrictPositivityReport {
    /// Isolated zeros are allowed; only persistent nonpositive stretches fail.
    pub fn passed(&self) -> bool {
        !self.persistent
    }
}

const REFINEMENT_POINTS: usize = 9;

/// Checks u(x0, t) > tol on increasing `ts`, refining around every hit.
pub fn verify_strict_positivity(
    sol: &SpectralSolution,
    x0: f64,
    ts: &[f64],
    tol: f64,
) -> Result<StrictPositivityReport> {
    if ts.is_empty() {
        return Err(Error::arg("t_samples", "must be nonempty"));
    }
    if ts.windows(2).any(|w| !(w[1] > w[0])) || !(ts[0] > 0.0) {
        return Err(Error::arg(
            "t_samples",
            "must be positive and strictly increasing",
        ));
    }
    if tol.is_nan() {
        return Err(Error::arg("tol", "is NaN"));
    }
    check_times(sol, ts)?;
    let xs = [x0];
    let values: Vec<f64> = sol.eval_grid(&xs, ts)?.into_iter().map(|r| r[0]).collect();
    let (mut min_value, mut argmin) = (f64::INFINITY, ts[0]);
    for (&v, &t) in values.iter().zip(ts) {
        if v < min_value {
            min_value = v;
            argmin = t;
        }
    }
    let hits: Vec<usize> = (0..ts.len()).filter(|&i| values[i] <= tol).collect();
    let mut longest = 0;
    for &i in &hits {
        let lo = ts[i.saturating_sub(1)];
        let hi = ts[(i + 1).min(ts.len() - 1)];
        let refined = if hi > lo {
            geometric_grid(lo, hi, REFINEMENT_POINTS)
        } else {
            vec![lo]
        };
        let u = sol.eval_grid(&xs, &refined)?;
        let mut run = 0;
        for row in &u {
            run = if row[0] <= tol { run + 1 } else { 0 };
            longest = longest.max(run);
        }
    }
    Ok(StrictPositivityReport {
        x0,
        min_value,
        argmin,
        tolerance: tol,
        samples: ts.len(),
        nonpositive: hits.iter().map(|&i| ts[i]).collect(),
        longest_refined_run: longest,
        persistent: longest > 2,
    })
}
