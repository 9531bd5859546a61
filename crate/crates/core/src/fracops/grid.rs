use crate::error::{Error, Result};

/// Nodes t_k = T (k/K)^r, k = 0..=K.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    grading: f64,
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize, grading: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::arg(
                "horizon",
                format!("must be positive, got {horizon}"),
            ));
        }
        if steps == 0 {
            return Err(Error::arg("steps", "grid needs at least one step"));
        }
        if !(grading >= 1.0 && grading.is_finite()) {
            return Err(Error::arg(
                "grading",
                format!("must be >= 1, got {grading}"),
            ));
        }
        let k = steps as f64;
        let mut nodes: Vec<f64> = (0..=steps)
            .map(|i| {
                if grading == 1.0 {
                    horizon * i as f64 / k
                } else {
                    horizon * (i as f64 / k).powf(grading)
                }
            })
            .collect();
        nodes[steps] = horizon;
        Ok(TimeGrid {
            horizon,
            grading,
            nodes,
        })
    }

    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        Self::new(horizon, steps, 1.0)
    }

    /// Grading min(2/α₁, 4), resolving t^{α₁−1} behaviour at the origin.
    pub fn graded_for(horizon: f64, steps: usize, alpha1: f64) -> Result<Self> {
        Self::new(horizon, steps, (2.0 / alpha1).min(4.0))
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    /// Number of steps K.
    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, k: usize) -> f64 {
        self.nodes[k]
    }

    pub fn is_uniform(&self) -> bool {
        self.grading == 1.0
    }

    /// Panel index i with t_i ≤ t ≤ t_{i+1}, clamped to the grid.
    pub fn locate(&self, t: f64) -> usize {
        let k = self.steps();
        if t <= 0.0 {
            return 0;
        }
        if t >= self.horizon {
            return k - 1;
        }
        let guess = ((t / self.horizon).powf(1.0 / self.grading) * k as f64).floor() as usize;
        let mut i = guess.min(k - 1);
        while i > 0 && self.nodes[i] > t {
            i -= 1;
        }
        while i + 1 < k && self.nodes[i + 1] <= t {
            i += 1;
        }
        i
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_and_graded_nodes() {
        let g = TimeGrid::uniform(2.0, 8).unwrap();
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(8), 2.0);
        assert!((g.node(3) - 0.75).abs() <= f64::EPSILON);
        let h = TimeGrid::new(1.0, 10, 2.0).unwrap();
        assert!((h.node(5) - 0.25).abs() < 1e-16);
        assert!(h.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn locate_brackets() {
        let g = TimeGrid::new(3.0, 50, 2.5).unwrap();
        for &t in &[0.0, 1e-9, 0.1, 1.0, 2.999, 3.0] {
            let i = g.locate(t);
            assert!(g.node(i) <= t && t <= g.node(i + 1), "{t}");
        }
        for k in 0..50 {
            assert_eq!(g.locate(g.node(k)), k);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(TimeGrid::new(1.0, 0, 1.0).is_err());
        assert!(TimeGrid::new(-1.0, 4, 1.0).is_err());
        assert!(TimeGrid::new(1.0, 4, 0.5).is_err());
    }
}
