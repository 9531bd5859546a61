//! The elliptic operator A u = −(a u′)′ + c u on (0, L).

use serde::{Deserialize, Serialize};

use super::tridiag::SymTridiagonal;
use crate::error::{Error, Result};

/// Points on which ellipticity and the sign of the potential are checked.
const CHECK_POINTS: usize = 4096;

/// A coefficient function, constant or tabulated with linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Coefficient {
    Constant(f64),
    /// Strictly increasing abscissae with matching values.
    Tabulated {
        x: Vec<f64>,
        v: Vec<f64>,
    },
}

impl Coefficient {
    pub fn tabulated(x: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || x.len() != v.len() {
            return Err(Error::arg(
                "table",
                format!(
                    "{} abscissae, {} values (need ≥ 2, equal)",
                    x.len(),
                    v.len()
                ),
            ));
        }
        if x.iter().chain(&v).any(|z| !z.is_finite()) {
            return Err(Error::arg("table", "non-finite entry"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::arg("table", "abscissae must be strictly increasing"));
        }
        Ok(Coefficient::Tabulated { x, v })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Tabulated { x, v } => {
                let n = x.len();
                if t <= x[0] {
                    return v[0];
                }
                if t >= x[n - 1] {
                    return v[n - 1];
                }
                let i = x.partition_point(|&xi| xi <= t) - 1;
                let w = (t - x[i]) / (x[i + 1] - x[i]);
                v[i] + w * (v[i + 1] - v[i])
            }
        }
    }

    /// Smallest value on [0, L]; exact for piecewise-linear data.
    fn min_on(&self, length: f64) -> f64 {
        let mut m = self.eval(0.0).min(self.eval(length));
        if let Coefficient::Tabulated { x, .. } = self {
            for &xi in x.iter().filter(|&&xi| xi > 0.0 && xi < length) {
                m = m.min(self.eval(xi));
            }
        }
        for i in 0..=CHECK_POINTS {
            m = m.min(self.eval(length * i as f64 / CHECK_POINTS as f64));
        }
        m
    }

    fn covers(&self, length: f64) -> bool {
        match self {
            Coefficient::Constant(_) => true,
            Coefficient::Tabulated { x, .. } => x[0] <= 0.0 && x[x.len() - 1] >= length,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Coefficient::Constant(_))
    }
}

/// A = −(a(x) u′)′ + c(x) u on Ω = (0, L) with homogeneous Dirichlet ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    length: f64,
    diffusion: Coefficient,
    potential: Coefficient,
    /// min a on the check grid.
    delta: f64,
}

impl OperatorSpec {
    pub fn new(length: f64, diffusion: Coefficient, potential: Coefficient) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::arg(
                "length",
                format!("{length} is not a positive length"),
            ));
        }
        for (name, c) in [("diffusion", &diffusion), ("potential", &potential)] {
            if let Coefficient::Constant(v) = c {
                if !v.is_finite() {
                    return Err(Error::arg(name, "non-finite constant"));
                }
            }
            if !c.covers(length) {
                return Err(Error::arg(
                    name,
                    format!("table does not cover [0, {length}]"),
                ));
            }
        }
        let delta = diffusion.min_on(length);
        if !(delta > 0.0) {
            return Err(Error::Ellipticity(format!(
                "diffusion coefficient reaches {delta} on [0, {length}]"
            )));
        }
        let cmin = potential.min_on(length);
        if cmin < 0.0 {
            return Err(Error::Ellipticity(format!(
                "potential reaches {cmin} < 0 on [0, {length}]"
            )));
        }
        Ok(Self {
            length,
            diffusion,
            potential,
            delta,
        })
    }

    /// −u″ on (0, L).
    pub fn laplacian(length: f64) -> Result<Self> {
        Self::new(
            length,
            Coefficient::Constant(1.0),
            Coefficient::Constant(0.0),
        )
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn diffusion(&self) -> &Coefficient {
        &self.diffusion
    }

    pub fn potential(&self) -> &Coefficient {
        &self.potential
    }

    /// Ellipticity constant δ = min a.
    pub fn ellipticity(&self) -> f64 {
        self.delta
    }

    /// a ≡ 1 and c ≡ 0.
    pub fn is_laplacian(&self) -> bool {
        self.diffusion == Coefficient::Constant(1.0) && self.potential == Coefficient::Constant(0.0)
    }

    /// Mesh width of the finite-difference grid with `m` interior points.
    pub fn mesh_width(&self, m: usize) -> f64 {
        self.length / (m + 1) as f64
    }

    /// Three-point discretisation on x_i = i h, i = 1..=m, h = L/(m+1):
    /// (A_h u)_i = (a_{i−½}(u_i − u_{i−1}) − a_{i+½}(u_{i+1} − u_i))/h² + c(x_i) u_i.
    pub fn finite_difference(&self, m: usize) -> Result<SymTridiagonal> {
        if m == 0 {
            return Err(Error::arg("m", "need at least one interior point"));
        }
        let h = self.mesh_width(m);
        let h2 = h * h;
        let a_half: Vec<f64> = (0..=m)
            .map(|i| self.diffusion.eval((i as f64 + 0.5) * h))
            .collect();
        let diag = (1..=m)
            .map(|i| (a_half[i - 1] + a_half[i]) / h2 + self.potential.eval(i as f64 * h))
            .collect();
        let off = (1..m).map(|i| -a_half[i] / h2).collect();
        SymTridiagonal::new(diag, off)
    }
}
