use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orders 1 > α₁ > … > α_m > 0 and weights q_j > 0 with q₁ = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalOrders {
    alpha: Vec<f64>,
    q: Vec<f64>,
}

impl FractionalOrders {
    pub fn new(alpha: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidOrders(
                "at least one order is required (m >= 1)".into(),
            ));
        }
        if alpha.len() != q.len() {
            return Err(Error::InvalidOrders(format!(
                "alpha has {} entries but q has {}",
                alpha.len(),
                q.len()
            )));
        }
        if alpha[0] >= 1.0 || !alpha.iter().all(|a| *a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidOrders(format!(
                "orders must lie in (0,1): 1>α₁>⋯>α_m>0 violated by {alpha:?}"
            )));
        }
        if alpha.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidOrders(format!(
                "orders must be strictly decreasing: 1>α₁>⋯>α_m>0 violated by {alpha:?}"
            )));
        }
        if q[0] != 1.0 {
            return Err(Error::InvalidOrders(format!(
                "q₁ must equal 1, got {}",
                q[0]
            )));
        }
        if !q.iter().all(|w| *w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidOrders(format!(
                "weights must be positive, got {q:?}"
            )));
        }
        Ok(FractionalOrders { alpha, q })
    }

    /// Single-term orders (α) with q = (1).
    pub fn single(alpha: f64) -> Result<Self> {
        Self::new(vec![alpha], vec![1.0])
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn m(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha[0]
    }

    pub fn alpha_m(&self) -> f64 {
        *self.alpha.last().unwrap()
    }

    pub fn q_m(&self) -> f64 {
        *self.q.last().unwrap()
    }

    /// β = (α₁, α₁ − α₂, …, α₁ − α_m) of the modal Mittag-Leffler factors.
    pub fn ml_beta(&self) -> Vec<f64> {
        let a1 = self.alpha[0];
        std::iter::once(a1)
            .chain(self.alpha[1..].iter().map(|a| a1 - a))
            .collect()
    }

    /// z = (−λ t^{α₁}, −q₂ t^{α₁−α₂}, …) of the modal factors.
    pub fn ml_z(&self, lambda: f64, t: f64) -> Vec<f64> {
        let a1 = self.alpha[0];
        std::iter::once(-lambda * t.powf(a1))
            .chain(
                self.alpha[1..]
                    .iter()
                    .zip(&self.q[1..])
                    .map(|(a, q)| -q * t.powf(a1 - a)),
            )
            .collect()
    }

    /// Same orders with q_m replaced.
    pub fn with_q_m(&self, q_m: f64) -> Result<Self> {
        let mut q = self.q.clone();
        *q.last_mut().unwrap() = q_m;
        Self::new(self.alpha.clone(), q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(FractionalOrders::new(vec![0.8, 0.4], vec![1.0, 1.0]).is_ok());
        let e = FractionalOrders::new(vec![0.4, 0.8], vec![1.0, 1.0]).unwrap_err();
        assert!(e.to_string().contains("1>α₁>⋯>α_m>0"));
        assert!(FractionalOrders::new(vec![1.0], vec![1.0]).is_err());
        assert!(FractionalOrders::new(vec![0.5], vec![2.0]).is_err());
        assert!(FractionalOrders::new(vec![0.5, 0.2], vec![1.0, 0.0]).is_err());
        assert!(FractionalOrders::new(vec![], vec![]).is_err());
    }

    #[test]
    fn modal_arguments() {
        let o = FractionalOrders::new(vec![0.8, 0.4], vec![1.0, 2.0]).unwrap();
        assert_eq!(o.ml_beta(), vec![0.8, 0.4]);
        let z = o.ml_z(3.0, 1.0);
        assert_eq!(z, vec![-3.0, -2.0]);
    }
}
