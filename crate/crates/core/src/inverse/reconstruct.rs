use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::Observation;
use crate::error::{Error, Result};
use crate::fracops::{multi_rl_integral_at, FractionalOrders, SampledFunction};
use crate::mittag_leffler::ModalFactors;
use crate::solver::{bilinear, for_each_panel, reflected_hats};
use crate::special::gamma;
use crate::spectral::ModalCoefficients;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularization {
    /// Plain triangular solve.
    None,
    /// Fixed weight of the second-difference penalty, relative to the largest
    /// diagonal entry of the normal matrix.
    Tikhonov(f64),
    /// Largest relative weight in 10⁰, 10⁻¹, …, 10⁻¹⁴ whose sup-norm residual
    /// stays within the given noise level.
    Discrepancy { noise: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionOptions {
    pub regularization: Regularization,
    /// Diagonal entries at or below this multiple of the largest absolute row sum are degenerate.
    pub diagonal_floor: f64,
}

impl Default for ReconstructionOptions {
    fn default() -> Self {
        ReconstructionOptions {
            regularization: Regularization::None,
            diagonal_floor: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    /// ρ on the observation grid.
    pub rho: SampledFunction,
    /// μ with singular exponent α₁ − 1.
    pub mu: SampledFunction,
    /// sup_k |(μ ∗ v_g)(t_k) − u(x₀, t_k)|.
    pub residual: f64,
    /// Smallest diagonal entry of the triangular convolution matrix.
    pub min_diagonal: f64,
    /// Relative penalty weight actually used; 0 without regularization.
    pub penalty: f64,
}

/// Lower-triangular discretisation of c ↦ (μ ∗ v)(t_k), k = 1..K, for
/// μ = σ^{α₁−1} c(σ) with c piecewise linear and c(t₀) = c(t₁).
pub(crate) struct ConvolutionMatrix {
    /// rows[k − 1][a − 1] multiplies c(t_a), a = 1..=k.
    rows: Vec<Vec<f64>>,
}

impl ConvolutionMatrix {
    pub(crate) fn new(nodes: &[f64], p: f64, kernel: &[f64]) -> Self {
        let steps = nodes.len() - 1;
        let rows = (1..=steps)
            .into_par_iter()
            .map(|k| {
                let mut w = vec![0.0; k + 1];
                for_each_panel(nodes, p, k, |pn| {
                    let a = pn.a;
                    let ha = nodes[a + 1] - nodes[a];
                    let (hb, hb1) = reflected_hats(nodes, k, pn);
                    let v = (
                        kernel[pn.b] * hb.0 + kernel[pn.b + 1] * hb1.0,
                        kernel[pn.b] * hb.1 + kernel[pn.b + 1] * hb1.1,
                    );
                    w[a] += bilinear(&pn.m, ((nodes[a + 1] - pn.lo) / ha, -1.0 / ha), v);
                    w[a + 1] += bilinear(&pn.m, ((pn.lo - nodes[a]) / ha, 1.0 / ha), v);
                });
                let c0 = w.remove(0);
                w[0] += c0;
                w
            })
            .collect();
        ConvolutionMatrix { rows }
    }

    pub(crate) fn dim(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn apply(&self, c: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(c).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Checks every diagonal entry against the largest absolute row sum; returns the smallest one.
    pub(crate) fn check_diagonal(&self, floor: f64) -> Result<f64> {
        let scale = self
            .rows
            .iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let mut min = f64::INFINITY;
        for (i, r) in self.rows.iter().enumerate() {
            let d = r[i];
            if !(d.abs() > floor * scale) {
                return Err(Error::DegenerateDiagonal {
                    row: i + 1,
                    value: d,
                });
            }
            min = min.min(d.abs());
        }
        Ok(min)
    }

    pub(crate) fn forward_solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut c = vec![0.0; rhs.len()];
        for (i, r) in self.rows.iter().enumerate() {
            let acc: f64 = r[..i].iter().zip(&c[..i]).map(|(a, b)| a * b).sum();
            c[i] = (rhs[i] - acc) / r[i];
        }
        c
    }

    /// ‖L⁻¹‖_∞ from the explicit inverse.
    pub(crate) fn inverse_norm(&self) -> f64 {
        let n = self.dim();
        let mut inv: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut worst: f64 = 0.0;
        for (k, r) in self.rows.iter().enumerate() {
            // X[k][j] = (δ_kj − Σ_{a<k} L[k][a] X[a][j]) / L[k][k]
            let mut row = vec![0.0; k + 1];
            for (a, xa) in inv.iter().enumerate() {
                let l = r[a];
                if l != 0.0 {
                    for (x, y) in row.iter_mut().zip(xa) {
                        *x -= l * y;
                    }
                }
            }
            row[k] += 1.0;
            row.iter_mut().for_each(|x| *x /= r[k]);
            worst = worst.max(row.iter().map(|x| x.abs()).sum());
            inv.push(row);
        }
        worst
    }

    fn dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| if j <= i { self.rows[i][j] } else { 0.0 })
    }
}

/// Normal equations of min ‖L c − u‖² + w·s·‖D² c‖², s the largest diagonal entry of LᵀL.
struct PenalizedSystem {
    normal: DMatrix<f64>,
    penalty: DMatrix<f64>,
    rhs: DVector<f64>,
    scale: f64,
}

impl PenalizedSystem {
    fn new(l: &ConvolutionMatrix, u: &[f64]) -> Self {
        let n = l.dim();
        let a = l.dense();
        let normal = a.tr_mul(&a);
        let rhs = a.tr_mul(&DVector::from_column_slice(u));
        let scale = normal.diagonal().max();
        let mut d = DMatrix::zeros(n.saturating_sub(2), n);
        for i in 0..n.saturating_sub(2) {
            d[(i, i)] = 1.0;
            d[(i, i + 1)] = -2.0;
            d[(i, i + 2)] = 1.0;
        }
        PenalizedSystem {
            normal,
            penalty: d.tr_mul(&d),
            rhs,
            scale,
        }
    }

    fn solve(&self, weight: f64) -> Option<Vec<f64>> {
        let m = &self.normal + &self.penalty * (weight * self.scale);
        m.cholesky().map(|c| c.solve(&self.rhs).as_slice().to_vec())
    }
}

/// v_g(x₀, t_k) at every node.
fn kernel_samples(
    obs: &Observation,
    g: &ModalCoefficients,
    orders: &FractionalOrders,
) -> Result<Vec<f64>> {
    let es = g.eigensystem();
    let x0 = obs.x0();
    let phi: Vec<f64> = g
        .values()
        .iter()
        .enumerate()
        .map(|(k, c)| c * es.phi(k, x0))
        .collect();
    let lambdas = &es.lambdas()[..g.len()];
    obs.grid()
        .nodes()
        .par_iter()
        .map(|&t| {
            let f = ModalFactors::new(orders, t, lambdas[0])?;
            Ok(phi.iter().zip(lambdas).map(|(p, l)| p * f.u(*l)).sum())
        })
        .collect()
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn reconstruct_rho(
    obs: &Observation,
    g: &ModalCoefficients,
    orders: &FractionalOrders,
) -> Result<ReconstructionResult> {
    reconstruct_rho_with(obs, g, orders, &ReconstructionOptions::default())
}

/// Deconvolves μ from u(x₀, ·) = μ ∗ v_g(x₀, ·), then ρ = Σ_j q_j J^{1−α_j} μ.
pub fn reconstruct_rho_with(
    obs: &Observation,
    g: &ModalCoefficients,
    orders: &FractionalOrders,
    opts: &ReconstructionOptions,
) -> Result<ReconstructionResult> {
    Ok(reconstruct_parts(obs, g, orders, opts)?.1)
}

/// The reconstruction together with its convolution matrix.
pub(crate) fn reconstruct_parts(
    obs: &Observation,
    g: &ModalCoefficients,
    orders: &FractionalOrders,
    opts: &ReconstructionOptions,
) -> Result<(ConvolutionMatrix, ReconstructionResult)> {
    let (
        l,
        Cofactors {
            cof,
            residual,
            min_diagonal,
            penalty,
        },
    ) = solve_cofactors(obs, g, orders, opts)?;
    let grid = obs.grid().clone();
    let p = orders.alpha1() - 1.0;
    let mu = SampledFunction::from_cofactors(grid.clone(), p, cof)?;
    let betas: Vec<f64> = orders.alpha().iter().map(|a| 1.0 - a).collect();
    let nodes = grid.nodes();
    let mut rho: Vec<f64> = nodes
        .par_iter()
        .map(|&t| multi_rl_integral_at(&mu, &betas, orders.q(), t))
        .collect();
    // J^{1−α₁}(σ^{α₁−1}) = Γ(α₁) at the origin; lower orders vanish there.
    rho[0] = orders.q()[0] * mu.cofactors()[0] * gamma(orders.alpha1());
    let rho = SampledFunction::from_values(grid, rho)?;
    Ok((
        l,
        ReconstructionResult {
            rho,
            mu,
            residual,
            min_diagonal,
            penalty,
        },
    ))
}

struct Cofactors {
    /// c(t_k), k = 0..=K, with c(t₀) = c(t₁).
    cof: Vec<f64>,
    residual: f64,
    min_diagonal: f64,
    penalty: f64,
}

fn solve_cofactors(
    obs: &Observation,
    g: &ModalCoefficients,
    orders: &FractionalOrders,
    opts: &ReconstructionOptions,
) -> Result<(ConvolutionMatrix, Cofactors)> {
    if g.is_empty() {
        return Err(Error::arg("g", "no modal coefficients"));
    }
    let grid = obs.grid();
    if grid.steps() == 0 {
        return Err(Error::arg("grid", "no time steps"));
    }
    let kernel = kernel_samples(obs, g, orders)?;
    let l = ConvolutionMatrix::new(grid.nodes(), orders.alpha1() - 1.0, &kernel);
    let min_diagonal = l.check_diagonal(opts.diagonal_floor)?;
    let u = &obs.values()[1..];
    let plain = |l: &ConvolutionMatrix| {
        let c = l.forward_solve(u);
        let r = sup_distance(&l.apply(&c), u);
        (c, r)
    };
    let (c, residual, penalty) = match opts.regularization {
        Regularization::None => {
            let (c, r) = plain(&l);
            (c, r, 0.0)
        }
        Regularization::Tikhonov(w) => {
            if !(w >= 0.0) {
                return Err(Error::arg(
                    "penalty",
                    format!("must be nonnegative, got {w}"),
                ));
            }
            let sys = PenalizedSystem::new(&l, u);
            let c = sys.solve(w).ok_or(Error::RegularizationFailed {
                residual: f64::INFINITY,
                tolerance: 0.0,
            })?;
            let r = sup_distance(&l.apply(&c), u);
            (c, r, w)
        }
        Regularization::Discrepancy { noise } => {
            if !(noise >= 0.0) {
                return Err(Error::arg(
                    "noise",
                    format!("must be nonnegative, got {noise}"),
                ));
            }
            let sys = PenalizedSystem::new(&l, u);
            let mut best = f64::INFINITY;
            let mut chosen = None;
            for e in 0..=14 {
                let w = 10f64.powi(-e);
                if let Some(c) = sys.solve(w) {
                    let r = sup_distance(&l.apply(&c), u);
                    best = best.min(r);
                    if r <= noise {
                        chosen = Some((c, r, w));
                        break;
                    }
                }
            }
            match chosen {
                Some(x) => x,
                None => {
                    let (c, r) = plain(&l);
                    if r > noise {
                        return Err(Error::RegularizationFailed {
                            residual: best.min(r),
                            tolerance: noise,
                        });
                    }
                    (c, r, 0.0)
                }
            }
        }
    };
    let mut cof = Vec::with_capacity(c.len() + 1);
    cof.push(c[0]);
    cof.extend_from_slice(&c);
    Ok((
        l,
        Cofactors {
            cof,
            residual,
            min_diagonal,
            penalty,
        },
    ))
}
