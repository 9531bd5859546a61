//! Modal coefficients (f, φ_n) and operations on them.

use std::sync::Arc;

use serde::Serialize;

use super::eigen::EigenSystem;
use crate::error::{Error, Result};

/// Coefficients of a function in the eigenbasis of `es`, modes 0..len.
#[derive(Debug, Clone)]
pub struct ModalCoefficients {
    values: Vec<f64>,
    /// ‖f‖² of the projected function, when known; bounds the discarded tail.
    norm_sq: Option<f64>,
    es: Arc<EigenSystem>,
}

impl ModalCoefficients {
    pub fn new(values: Vec<f64>, es: Arc<EigenSystem>) -> Result<Self> {
        if values.len() > es.len() {
            return Err(Error::GridMismatch(format!(
                "{} coefficients for {} modes",
                values.len(),
                es.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("values", "non-finite coefficient"));
        }
        Ok(Self {
            values,
            norm_sq: None,
            es,
        })
    }

    /// Coefficients of φ_k alone.
    pub fn unit(k: usize, n: usize, es: Arc<EigenSystem>) -> Result<Self> {
        if k >= n {
            return Err(Error::arg("k", format!("mode {k} outside the first {n}")));
        }
        let mut values = vec![0.0; n];
        values[k] = 1.0;
        let mut c = Self::new(values, es)?;
        c.norm_sq = Some(1.0);
        Ok(c)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn eigensystem(&self) -> &Arc<EigenSystem> {
        &self.es
    }

    pub fn source_norm_sq(&self) -> Option<f64> {
        self.norm_sq
    }

    /// ‖f‖² − Σ c_n², clamped at 0, when ‖f‖ is known.
    pub fn tail_sq(&self) -> Option<f64> {
        self.norm_sq
            .map(|n| (n - self.values.iter().map(|c| c * c).sum::<f64>()).max(0.0))
    }

    /// Σ c_n φ_n(x).
    pub fn eval(&self, x: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, c)| c * self.es.phi(k, x))
            .sum()
    }

    /// The first `n` coefficients; the tail estimate carries over.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Self {
            values: self.values[..n].to_vec(),
            norm_sq: self.norm_sq,
            es: self.es.clone(),
        }
    }
}

/// (f, φ_n) for n < `n` from samples of f on the quadrature nodes of `es`.
pub fn project(f: &[f64], es: &Arc<EigenSystem>, n: usize) -> Result<ModalCoefficients> {
    let q = es.quadrature();
    if f.len() != q.len() {
        return Err(Error::GridMismatch(format!(
            "{} samples on a {}-node quadrature",
            f.len(),
            q.len()
        )));
    }
    if n > es.len() {
        return Err(Error::arg(
            "n",
            format!("{n} modes requested, {} available", es.len()),
        ));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("f", "non-finite sample"));
    }
    let values = (0..n).map(|k| q.inner(f, &es.mode_samples(k))).collect();
    let mut c = ModalCoefficients::new(values, es.clone())?;
    c.norm_sq = Some(q.inner(f, f));
    Ok(c)
}

/// Samples `f` on the quadrature nodes and projects.
pub fn project_fn(
    f: impl Fn(f64) -> f64,
    es: &Arc<EigenSystem>,
    n: usize,
) -> Result<ModalCoefficients> {
    project(&es.quadrature().sample(f), es, n)
}

/// Coefficients of A⁻¹ f: b_n = f_n / λ_n.
pub fn inverse_elliptic(f: &ModalCoefficients) -> ModalCoefficients {
    let values = f
        .values
        .iter()
        .zip(f.es.lambdas())
        .map(|(c, l)| c / l)
        .collect();
    ModalCoefficients {
        values,
        norm_sq: None,
        es: f.es.clone(),
    }
}

/// ‖A^γ f‖ over the retained modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerNorm {
    pub norm: f64,
    /// |λ_N^γ f_N|, a truncation indicator.
    pub last_mode_contribution: f64,
}

pub fn fractional_power_norm(f: &ModalCoefficients, gamma: f64) -> Result<PowerNorm> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::arg(
            "gamma",
            format!("{gamma} is not a nonnegative exponent"),
        ));
    }
    let terms: Vec<f64> = f
        .values
        .iter()
        .zip(f.es.lambdas())
        .map(|(c, l)| (l.powf(gamma) * c).abs())
        .collect();
    // scaled sum of squares avoids overflow for large λ^γ
    let big = terms.iter().fold(0.0f64, |a, &b| a.max(b));
    let norm = if big > 0.0 {
        big * terms.iter().map(|t| (t / big).powi(2)).sum::<f64>().sqrt()
    } else {
        0.0
    };
    Ok(PowerNorm {
        norm,
        last_mode_contribution: terms.last().copied().unwrap_or(0.0),
    })
}
