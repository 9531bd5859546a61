use std::sync::Arc;

use super::TimeGrid;
use crate::error::{Error, Result};

/// f(t) = t^p · c(t) with c piecewise linear on the grid and p ∈ (−1, 0].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Arc<TimeGrid>,
    p: f64,
    cof: Vec<f64>,
}

impl SampledFunction {
    /// Plain piecewise-linear function through `values`.
    pub fn from_values(grid: Arc<TimeGrid>, values: Vec<f64>) -> Result<Self> {
        Self::from_cofactors(grid, 0.0, values)
    }

    pub fn from_fn(grid: Arc<TimeGrid>, f: impl Fn(f64) -> f64) -> Self {
        let cof = grid.nodes().iter().map(|&t| f(t)).collect();
        SampledFunction { grid, p: 0.0, cof }
    }

    pub fn zeros(grid: Arc<TimeGrid>, p: f64) -> Self {
        let n = grid.steps() + 1;
        SampledFunction {
            grid,
            p,
            cof: vec![0.0; n],
        }
    }

    /// t^p · c(t) from cofactor samples c(t_k).
    pub fn from_cofactors(grid: Arc<TimeGrid>, p: f64, cof: Vec<f64>) -> Result<Self> {
        if !(p > -1.0 && p <= 0.0) {
            return Err(Error::arg(
                "singular_exponent",
                format!("must lie in (-1, 0], got {p}"),
            ));
        }
        if cof.len() != grid.steps() + 1 {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid with {} nodes",
                cof.len(),
                grid.steps() + 1
            )));
        }
        if let Some(v) = cof.iter().find(|v| !v.is_finite()) {
            return Err(Error::arg(
                "values",
                format!("samples must be finite, got {v}"),
            ));
        }
        Ok(SampledFunction { grid, p, cof })
    }

    /// From values f(t_k); for p < 0 the first entry is the prefactor lim t^{−p} f(t).
    pub fn from_singular_values(grid: Arc<TimeGrid>, p: f64, values: Vec<f64>) -> Result<Self> {
        let nodes = grid.nodes().to_vec();
        let cof = values
            .iter()
            .zip(&nodes)
            .enumerate()
            .map(|(k, (v, t))| {
                if k == 0 || p == 0.0 {
                    *v
                } else {
                    v * t.powf(-p)
                }
            })
            .collect();
        Self::from_cofactors(grid, p, cof)
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn singular_exponent(&self) -> f64 {
        self.p
    }

    pub fn cofactors(&self) -> &[f64] {
        &self.cof
    }

    /// f(t_k) for k ≥ 1 and the prefactor at k = 0.
    pub fn values(&self) -> Vec<f64> {
        (0..self.cof.len()).map(|k| self.value(k)).collect()
    }

    /// f(t_k); at k = 0 the stored prefactor.
    pub fn value(&self, k: usize) -> f64 {
        if k == 0 || self.p == 0.0 {
            self.cof[k]
        } else {
            self.cof[k] * self.grid.node(k).powf(self.p)
        }
    }

    /// Interpolated cofactor at arbitrary t ∈ [0, T].
    pub fn cofactor_at(&self, t: f64) -> f64 {
        let i = self.grid.locate(t);
        let (a, b) = (self.grid.node(i), self.grid.node(i + 1));
        let w = ((t - a) / (b - a)).clamp(0.0, 1.0);
        self.cof[i] * (1.0 - w) + self.cof[i + 1] * w
    }

    /// f(t) for t ∈ (0, T]; at t = 0 the prefactor.
    pub fn eval(&self, t: f64) -> f64 {
        let c = self.cofactor_at(t);
        if self.p == 0.0 || t == 0.0 {
            c
        } else {
            c * t.powf(self.p)
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        SampledFunction {
            grid: self.grid.clone(),
            p: self.p,
            cof: self.cof.iter().map(|c| c * s).collect(),
        }
    }

    /// a·self + b·other on a shared grid and exponent.
    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.grid != other.grid || self.p != other.p {
            return Err(Error::GridMismatch(
                "operands live on different representations".into(),
            ));
        }
        let cof = self
            .cof
            .iter()
            .zip(&other.cof)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(SampledFunction {
            grid: self.grid.clone(),
            p: self.p,
            cof,
        })
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.cof.len())
            .map(|k| self.value(k).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_representation_round_trip() {
        let g = Arc::new(TimeGrid::new(1.0, 16, 2.0).unwrap());
        let f = SampledFunction::from_cofactors(g.clone(), -0.5, vec![2.0; 17]).unwrap();
        assert_eq!(f.value(0), 2.0);
        assert!((f.value(16) - 2.0).abs() < 1e-15);
        assert!((f.eval(0.25) - 4.0).abs() < 1e-14);
        let back = SampledFunction::from_singular_values(g, -0.5, f.values()).unwrap();
        for (a, b) in back.cofactors().iter().zip(f.cofactors()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_wrong_length_and_exponent() {
        let g = Arc::new(TimeGrid::uniform(1.0, 4).unwrap());
        assert!(SampledFunction::from_values(g.clone(), vec![0.0; 4]).is_err());
        assert!(SampledFunction::from_cofactors(g, -1.0, vec![0.0; 5]).is_err());
    }
}
