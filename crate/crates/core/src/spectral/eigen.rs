//! Eigensystems of A: the closed-form Dirichlet Laplacian and a
//! finite-difference Sturm–Liouville realisation for variable coefficients.

use super::operator::OperatorSpec;
use super::tridiag::SymTridiagonal;
use crate::error::{Error, Result};

/// Composite trapezoid rule on the uniform grid x_i = i L / n, i = 0..=n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    length: f64,
    intervals: usize,
}

impl Quadrature {
    pub fn new(length: f64, intervals: usize) -> Result<Self> {
        if !(length > 0.0) || intervals == 0 {
            return Err(Error::arg(
                "intervals",
                "need a positive length and at least one interval",
            ));
        }
        Ok(Self { length, intervals })
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of nodes, intervals + 1.
    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.length / self.intervals as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.intervals {
            self.length
        } else {
            self.length * i as f64 / self.intervals as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.intervals {
            0.5 * self.step()
        } else {
            self.step()
        }
    }

    /// Σ w_i f_i g_i.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, (a, b)) in f.iter().zip(g).enumerate() {
            s += self.weight(i) * a * b;
        }
        s
    }

    /// Samples `f` at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(self.node(i))).collect()
    }
}

#[derive(Debug, Clone)]
enum Basis {
    /// φ_n(x) = √(2/L) sin(nπx/L).
    Sine,
    /// Mode values at the nodes of the finite-difference grid, ends included.
    Grid {
        spec: OperatorSpec,
        operator: SymTridiagonal,
        modes: Vec<Vec<f64>>,
    },
}

/// Eigenpairs (λ_n, φ_n), n = 1..=N, of A with λ ascending and φ_n
/// orthonormal under the attached quadrature. Modes are indexed from 0.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    length: f64,
    lambdas: Vec<f64>,
    basis: Basis,
    quadrature: Quadrature,
}

impl EigenSystem {
    /// −u″ on (0, L): λ_n = (nπ/L)², with a trapezoid rule fine enough that
    /// the sampled sines stay exactly orthogonal.
    pub fn laplacian(length: f64, n: usize) -> Result<Self> {
        Self::laplacian_with_quadrature(length, n, (2 * n).max(1024))
    }

    pub fn laplacian_with_quadrature(length: f64, n: usize, intervals: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::arg(
                "length",
                format!("{length} is not a positive length"),
            ));
        }
        if n == 0 {
            return Err(Error::arg("n", "need at least one mode"));
        }
        if intervals <= n {
            return Err(Error::arg(
                "intervals",
                format!("{intervals} intervals cannot resolve {n} modes"),
            ));
        }
        let k = std::f64::consts::PI / length;
        let lambdas = (1..=n).map(|j| (j as f64 * k).powi(2)).collect();
        Ok(Self {
            length,
            lambdas,
            basis: Basis::Sine,
            quadrature: Quadrature::new(length, intervals)?,
        })
    }

    /// Lowest `n` eigenpairs of the three-point discretisation of `spec` with
    /// `m` interior points; requires n ≤ m/4.
    pub fn sturm_liouville(spec: &OperatorSpec, m: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("n", "need at least one mode"));
        }
        if 4 * n > m {
            return Err(Error::arg(
                "n",
                format!("{n} modes exceed a quarter of {m} grid points"),
            ));
        }
        let operator = spec.finite_difference(m)?;
        let h = spec.mesh_width(m);
        let mut lambdas: Vec<f64> = Vec::with_capacity(n);
        let mut modes: Vec<Vec<f64>> = Vec::with_capacity(n);
        for k in 0..n {
            let lam = operator.eigenvalue(k);
            let mut v = operator.eigenvector(lam);
            // guard against drift into a neighbouring mode
            for (prev, &lp) in modes.iter().zip(&lambdas) {
                if (lam - lp).abs() < 1e-6 * lam.abs() {
                    let d: f64 = v.iter().zip(&prev[1..=m]).map(|(a, b)| a * b).sum::<f64>() * h;
                    v.iter_mut()
                        .zip(&prev[1..=m])
                        .for_each(|(a, b)| *a -= d * b);
                }
            }
            let norm = (h * v.iter().map(|x| x * x).sum::<f64>()).sqrt();
            // sign convention: positive slope at x = 0
            let sign = if v
                .iter()
                .find(|x| x.abs() > 1e-8 / h.sqrt())
                .copied()
                .unwrap_or(1.0)
                < 0.0
            {
                -1.0
            } else {
                1.0
            };
            let mut full = Vec::with_capacity(m + 2);
            full.push(0.0);
            full.extend(v.iter().map(|x| sign * x / norm));
            full.push(0.0);
            lambdas.push(lam);
            modes.push(full);
        }
        if !(lambdas[0] > 0.0) || lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Ellipticity(format!(
                "spectrum not positive and simple: {:?}",
                &lambdas[..n.min(4)]
            )));
        }
        let quadrature = Quadrature::new(spec.length(), m + 1)?;
        Ok(Self {
            length: spec.length(),
            lambdas,
            basis: Basis::Grid {
                spec: spec.clone(),
                operator,
                modes,
            },
            quadrature,
        })
    }

    /// Number of modes N.
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn lambda(&self, k: usize) -> f64 {
        self.lambdas[k]
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quadrature
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.basis, Basis::Sine)
    }

    /// Operator behind a finite-difference system.
    pub fn operator_spec(&self) -> Option<&OperatorSpec> {
        match &self.basis {
            Basis::Sine => None,
            Basis::Grid { spec, .. } => Some(spec),
        }
    }

    pub(crate) fn discrete_operator(&self) -> Option<&SymTridiagonal> {
        match &self.basis {
            Basis::Sine => None,
            Basis::Grid { operator, .. } => Some(operator),
        }
    }

    /// φ_k(x); exactly 0 outside the open interval.
    pub fn phi(&self, k: usize, x: f64) -> f64 {
        if !(x > 0.0 && x < self.length) {
            return 0.0;
        }
        match &self.basis {
            Basis::Sine => {
                (2.0 / self.length).sqrt()
                    * ((k + 1) as f64 * std::f64::consts::PI * x / self.length).sin()
            }
            Basis::Grid { modes, .. } => {
                let v = &modes[k];
                let h = self.quadrature.step();
                let s = x / h;
                let i = (s.floor() as usize).min(v.len() - 2);
                let w = s - i as f64;
                v[i] + w * (v[i + 1] - v[i])
            }
        }
    }

    /// φ_k at every quadrature node.
    pub fn mode_samples(&self, k: usize) -> Vec<f64> {
        match &self.basis {
            Basis::Grid { modes, .. } => modes[k].clone(),
            Basis::Sine => (0..self.quadrature.len())
                .map(|i| self.phi(k, self.quadrature.node(i)))
                .collect(),
        }
    }
}
