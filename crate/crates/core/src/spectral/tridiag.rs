//! Symmetric tridiagonal matrices: solves, Sturm counts and eigenpairs.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix with `diag[i] = T_{ii}` and `off[i] = T_{i,i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::arg("diag", "empty matrix"));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::arg(
                "off",
                format!("length {} for dimension {}", off.len(), diag.len()),
            ));
        }
        if diag.iter().chain(&off).any(|v| !v.is_finite()) {
            return Err(Error::arg("diag", "non-finite entry"));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// y = T x.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Solves (T + shift·I) x = rhs for a positive definite shifted matrix.
    pub fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(Error::GridMismatch(format!(
                "right-hand side has {} entries, matrix {n}",
                rhs.len()
            )));
        }
        // LDLᵀ without pivoting; pivots stay positive for definite matrices.
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        d[0] = self.diag[0] + shift;
        for i in 1..n {
            if !(d[i - 1] > 0.0) {
                return Err(Error::DegenerateDiagonal {
                    row: i - 1,
                    value: d[i - 1],
                });
            }
            l[i - 1] = self.off[i - 1] / d[i - 1];
            d[i] = self.diag[i] + shift - l[i - 1] * self.off[i - 1];
        }
        if !(d[n - 1] > 0.0) {
            return Err(Error::DegenerateDiagonal {
                row: n - 1,
                value: d[n - 1],
            });
        }
        let mut x = rhs.to_vec();
        for i in 1..n {
            x[i] -= l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= d[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= l[i] * x[i + 1];
        }
        Ok(x)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + x.abs());
        for i in 0..self.dim() {
            if i > 0 {
                let prev = if q == 0.0 { tiny } else { q };
                q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / prev;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The k-th smallest eigenvalue (0-based) by bisection on the Sturm count.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for an isolated eigenvalue `lambda` by inverse iteration,
    /// normalised to unit Euclidean length.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        let scale = self
            .gershgorin()
            .1
            .abs()
            .max(self.gershgorin().0.abs())
            .max(f64::MIN_POSITIVE);
        let shift = lambda + 64.0 * f64::EPSILON * scale;
        let lu = PivotedLu::factor(self, shift);
        // deterministic start with components in every mode
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_749_895).fract())
            .collect();
        for _ in 0..4 {
            let mut w = lu.solve(&v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            w.iter_mut().for_each(|x| *x /= norm);
            v = w;
        }
        v
    }
}

/// LU factorisation of T − σI with partial pivoting, as used by inverse iteration.
struct PivotedLu {
    /// rows of U: (u_ii, u_{i,i+1}, u_{i,i+2})
    u: Vec<(f64, f64, f64)>,
    /// multiplier and whether rows i and i+1 were swapped
    l: Vec<(f64, bool)>,
}

impl PivotedLu {
    fn factor(t: &SymTridiagonal, sigma: f64) -> Self {
        let n = t.dim();
        let tiny = f64::EPSILON * t.gershgorin().1.abs().max(1.0);
        let mut u = Vec::with_capacity(n);
        let mut l = Vec::with_capacity(n.saturating_sub(1));
        // current row being eliminated: (a_ii, a_{i,i+1}, a_{i,i+2})
        let mut cur = (t.diag[0] - sigma, if n > 1 { t.off[0] } else { 0.0 }, 0.0);
        for i in 0..n {
            if i + 1 == n {
                let d = if cur.0.abs() < tiny { tiny } else { cur.0 };
                u.push((d, 0.0, 0.0));
                break;
            }
            let below = (
                t.off[i],
                t.diag[i + 1] - sigma,
                if i + 2 < n { t.off[i + 1] } else { 0.0 },
            );
            if below.0.abs() > cur.0.abs() {
                let m = cur.0 / below.0;
                u.push(below);
                l.push((m, true));
                cur = (cur.1 - m * below.1, cur.2 - m * below.2, 0.0);
            } else {
                let d = if cur.0.abs() < tiny { tiny } else { cur.0 };
                let m = below.0 / d;
                u.push((d, cur.1, cur.2));
                l.push((m, false));
                cur = (below.1 - m * cur.1, below.2 - m * cur.2, 0.0);
            }
        }
        Self { u, l }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut y = rhs.to_vec();
        for (i, &(m, swapped)) in self.l.iter().enumerate() {
            if swapped {
                y.swap(i, i + 1);
            }
            y[i + 1] -= m * y[i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let (d, a, b) = self.u[i];
            let mut s = y[i];
            if i + 1 < n {
                s -= a * x[i + 1];
            }
            if i + 2 < n {
                s -= b * x[i + 2];
            }
            x[i] = s / d;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn eigenvalues_of_second_difference_matrix() {
        let n = 50;
        let t = laplacian(n);
        for k in 0..n {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((t.eigenvalue(k) - exact).abs() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn eigenvectors_satisfy_the_eigen_equation() {
        let t = SymTridiagonal::new(
            (0..40).map(|i| 2.0 + (i as f64 * 0.3).sin()).collect(),
            (0..39)
                .map(|i| -1.0 - 0.2 * (i as f64 * 0.1).cos())
                .collect(),
        )
        .unwrap();
        for k in [0, 1, 7, 39] {
            let lam = t.eigenvalue(k);
            let v = t.eigenvector(lam);
            let r: f64 = t
                .apply(&v)
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - lam * b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(r < 1e-12, "k = {k}: residual {r:e}");
        }
    }

    #[test]
    fn shifted_solve_inverts_apply() {
        let t = laplacian(30);
        let x: Vec<f64> = (0..30).map(|i| (i as f64).sqrt()).collect();
        let mut b = t.apply(&x);
        b.iter_mut().zip(&x).for_each(|(b, x)| *b += 0.5 * x);
        let y = t.solve_shifted(0.5, &b).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-11);
        }
        assert!(matches!(
            t.solve_shifted(-4.5, &b),
            Err(Error::DegenerateDiagonal { .. })
        ));
    }
}
