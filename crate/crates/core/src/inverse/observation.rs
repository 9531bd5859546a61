use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fracops::{FractionalOrders, TimeGrid};
use crate::properties::DataSign;
use crate::solver::{solve_source_duhamel, SourceSpec};

/// Samples u(x₀, t_k) at every grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    x0: f64,
    grid: Arc<TimeGrid>,
    values: Vec<f64>,
    noise: f64,
    g_sign: Option<DataSign>,
}

impl Observation {
    pub fn new(
        x0: f64,
        grid: Arc<TimeGrid>,
        values: Vec<f64>,
        noise: f64,
        g_sign: Option<DataSign>,
    ) -> Result<Self> {
        if values.len() != grid.steps() + 1 {
            return Err(Error::GridMismatch(format!(
                "{} samples for {} nodes",
                values.len(),
                grid.steps() + 1
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::arg(
                "values",
                format!("observation samples must be finite, got {v}"),
            ));
        }
        if !(noise >= 0.0) {
            return Err(Error::arg(
                "noise",
                format!("must be nonnegative, got {noise}"),
            ));
        }
        Ok(Observation {
            x0,
            grid,
            values,
            noise,
            g_sign,
        })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Declared bound on the additive noise.
    pub fn noise(&self) -> f64 {
        self.noise
    }

    /// Sign hypothesis on the spatial factor g, if declared.
    pub fn g_sign(&self) -> Option<DataSign> {
        self.g_sign
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// a·self + b·other on a shared grid; the noise bounds combine accordingly.
    pub fn combine(&self, a: f64, other: &Observation, b: f64) -> Result<Self> {
        if self.grid.nodes() != other.grid.nodes() || self.x0 != other.x0 {
            return Err(Error::GridMismatch(
                "observations differ in grid or sensor".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| a * u + b * v)
            .collect();
        let g_sign = if self.g_sign == other.g_sign {
            self.g_sign
        } else {
            None
        };
        Observation::new(
            self.x0,
            self.grid.clone(),
            values,
            a.abs() * self.noise + b.abs() * other.noise,
            g_sign,
        )
    }

    /// Every `stride`-th node; the grid must map onto itself.
    pub fn subsample(&self, stride: usize) -> Result<Self> {
        let steps = self.grid.steps();
        if stride == 0 || steps % stride != 0 {
            return Err(Error::arg(
                "stride",
                format!("{stride} does not divide {steps} steps"),
            ));
        }
        let grid = Arc::new(TimeGrid::new(
            self.grid.horizon(),
            steps / stride,
            self.grid.grading(),
        )?);
        for (k, t) in grid.nodes().iter().enumerate() {
            if (t - self.grid.node(k * stride)).abs() > 1e-14 * self.grid.horizon() {
                return Err(Error::GridMismatch(
                    "coarse grid nodes are not fine grid nodes".into(),
                ));
            }
        }
        let values = self.values.iter().step_by(stride).copied().collect();
        Observation::new(self.x0, grid, values, self.noise, self.g_sign)
    }
}

/// Additive noise uniform on [−level, level], from a seeded generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub level: f64,
    pub seed: u64,
}

/// u(x₀, t_k) on the grid of ρ for zero initial data and F = ρ g.
pub fn synthesize_observation(
    src: &SourceSpec,
    orders: &FractionalOrders,
    x0: f64,
    trunc_tol: f64,
    noise: Option<NoiseModel>,
    g_sign: Option<DataSign>,
) -> Result<Observation> {
    let l = src.g().eigensystem().length();
    if !(x0 > 0.0 && x0 < l) {
        return Err(Error::arg(
            "x0",
            format!("{x0} is not interior to (0, {l})"),
        ));
    }
    let sol = solve_source_duhamel(src, orders, trunc_tol)?;
    let grid = src.rho().grid().clone();
    let mut values: Vec<f64> = sol
        .eval_grid(&[x0], grid.nodes())?
        .into_iter()
        .map(|r| r[0])
        .collect();
    let level = match noise {
        Some(n) if n.level > 0.0 => {
            let mut rng = ChaCha8Rng::seed_from_u64(n.seed);
            for v in values.iter_mut() {
                *v += rng.gen_range(-n.level..=n.level);
            }
            n.level
        }
        _ => 0.0,
    };
    Observation::new(x0, grid, values, level, g_sign)
}
