//! Separable sources F(x, t) = ρ(t) g(x): u(·, t) = ∫₀ᵗ μ(t − s) v_g(·, s) ds,
//! with μ the density solving Σ_j q_j J^{1−α_j} μ = ρ.

use std::sync::Arc;

use rayon::prelude::*;

use super::spectral_solution::{DuhamelHistory, SpectralSolution};
use crate::error::{Error, Result};
use crate::fracops::{
    solve_abel_system_with, AbelOptions, FractionalOrders, SampledFunction, TimeGrid,
};
use crate::mittag_leffler::ModalFactors;
use crate::spectral::ModalCoefficients;

/// F(x, t) = ρ(t) g(x).
#[derive(Debug, Clone)]
pub struct SourceSpec {
    rho: SampledFunction,
    g: ModalCoefficients,
}

impl SourceSpec {
    pub fn new(rho: SampledFunction, g: ModalCoefficients) -> Result<Self> {
        if rho.singular_exponent() != 0.0 {
            return Err(Error::arg(
                "rho",
                "temporal factor must be bounded at t = 0",
            ));
        }
        if g.is_empty() {
            return Err(Error::arg("g", "no modal coefficients"));
        }
        Ok(Self { rho, g })
    }

    pub fn rho(&self) -> &SampledFunction {
        &self.rho
    }

    pub fn g(&self) -> &ModalCoefficients {
        &self.g
    }
}

/// ∫_0^1 (1 + xτ)^p τ^j dτ for j = 0, 1, 2 and x > 0.
fn local_moments(p: f64, x: f64) -> [f64; 3] {
    if x <= 0.25 {
        // binomial series in xτ
        let mut out = [0.0; 3];
        let mut c = 1.0;
        let mut xn = 1.0;
        for n in 0..80 {
            let nf = n as f64;
            let t = c * xn;
            for (j, o) in out.iter_mut().enumerate() {
                *o += t / (nf + j as f64 + 1.0);
            }
            if t.abs() < 1e-18 {
                break;
            }
            c *= (p - nf) / (nf + 1.0);
            xn *= x;
        }
        out
    } else {
        // P_q = ∫_1^{1+x} y^q dy
        let pw = |q: f64| ((q + 1.0) * x.ln_1p()).exp_m1() / (q + 1.0);
        let (p0, p1, p2) = (pw(p), pw(p + 1.0), pw(p + 2.0));
        [
            p0 / x,
            (p1 - p0) / (x * x),
            (p2 - 2.0 * p1 + p0) / (x * x * x),
        ]
    }
}

/// Piece [lo, lo + d] of [0, t_k] on which σ stays in μ-panel `a` and
/// t_k − σ stays in panel `b`, with m_j = ∫_0^d (lo + s)^p s^j ds.
pub(crate) struct ConvolutionPanel {
    pub a: usize,
    pub b: usize,
    pub lo: f64,
    pub m: [f64; 3],
}

/// Visits the common refinement of {t_a} and {t_k − t_b} on [0, t_k].
pub(crate) fn for_each_panel(
    nodes: &[f64],
    p: f64,
    k: usize,
    mut f: impl FnMut(&ConvolutionPanel),
) {
    if k == 0 {
        return;
    }
    let tk = nodes[k];
    let close = 1e-14 * tk;
    let mut a = 0;
    let mut b = k - 1;
    let mut lo = 0.0;
    while a < k {
        let next_a = nodes[a + 1];
        let next_b = tk - nodes[b];
        let hi = next_a.min(next_b);
        if hi > lo {
            let d = hi - lo;
            let m = if lo == 0.0 {
                let e = |j: f64| d.powf(p + j + 1.0) / (p + j + 1.0);
                [e(0.0), e(1.0), e(2.0)]
            } else {
                let j = local_moments(p, d / lo);
                let s = lo.powf(p);
                [s * d * j[0], s * d * d * j[1], s * d * d * d * j[2]]
            };
            f(&ConvolutionPanel { a, b, lo, m });
        }
        if next_a <= hi + close {
            a += 1;
        }
        if next_b <= hi + close && b > 0 {
            b -= 1;
        }
        lo = hi;
    }
}

/// ∫_0^d (lo + s)^p (h0 + h1 s)(v0 + v1 s) ds from the panel moments.
pub(crate) fn bilinear(m: &[f64; 3], (h0, h1): (f64, f64), (v0, v1): (f64, f64)) -> f64 {
    h0 * v0 * m[0] + (h0 * v1 + h1 * v0) * m[1] + h1 * v1 * m[2]
}

/// Hats of the panel [t_b, t_{b+1}] at t_k − σ, as (value at s = 0, slope in s).
pub(crate) fn reflected_hats(
    nodes: &[f64],
    k: usize,
    panel: &ConvolutionPanel,
) -> ((f64, f64), (f64, f64)) {
    let b = panel.b;
    let gb = nodes[b + 1] - nodes[b];
    let up = (nodes[k] - panel.lo - nodes[b]) / gb;
    ((1.0 - up, 1.0 / gb), (up, -1.0 / gb))
}

/// Convolution weights ω_b with Σ_b ω_b U(t_b) = ∫₀^{t_k} μ(σ) U(t_k − σ) dσ
/// for U piecewise linear on the grid and μ = σ^p · (piecewise-linear cofactor).
pub(crate) fn convolution_weights(mu: &SampledFunction, k: usize, out: &mut Vec<f64>) {
    let nodes = mu.grid().nodes();
    let c = mu.cofactors();
    out.clear();
    out.resize(k + 1, 0.0);
    for_each_panel(nodes, mu.singular_exponent(), k, |pn| {
        let a = pn.a;
        let slope = (c[a + 1] - c[a]) / (nodes[a + 1] - nodes[a]);
        let cof = (c[a] + slope * (pn.lo - nodes[a]), slope);
        let (hb, hb1) = reflected_hats(nodes, k, pn);
        out[pn.b] += bilinear(&pn.m, cof, hb);
        out[pn.b + 1] += bilinear(&pn.m, cof, hb1);
    });
}

/// Modal time histories w_n(t_k) for the eigenvalues `lambdas`.
fn modal_histories(
    mu: &SampledFunction,
    orders: &FractionalOrders,
    lambdas: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let grid = mu.grid();
    let nodes = grid.nodes();
    let kmax = grid.steps();
    let n = lambdas.len();
    // u(λ_n, t_b), one row per time node
    let factors: Vec<Vec<f64>> = nodes
        .par_iter()
        .map(|&t| {
            if t == 0.0 {
                return Ok(vec![1.0; n]);
            }
            let f = ModalFactors::new(orders, t, lambdas[0])?;
            Ok(lambdas.iter().map(|&l| f.u(l)).collect())
        })
        .collect::<Result<_>>()?;
    let columns: Vec<Vec<f64>> = (0..=kmax)
        .into_par_iter()
        .map_init(Vec::new, |w, k| {
            convolution_weights(mu, k, w);
            let mut col = vec![0.0; n];
            for (b, wb) in w.iter().enumerate() {
                for (cn, u) in col.iter_mut().zip(&factors[b]) {
                    *cn += wb * u;
                }
            }
            col
        })
        .collect();
    Ok((0..n)
        .map(|i| columns.iter().map(|col| col[i]).collect())
        .collect())
}

/// Solution of the separable-source problem with zero initial data.
///
/// Modes are truncated using |w_n(t)| ≤ sup|ρ| / λ_n, so the discarded part
/// is at most sup|ρ|·(Σ_{n>K} g_n²/λ_n² + ‖g‖²_tail/λ_N²)^{1/2} in L²(Ω).
pub fn solve_source_duhamel(
    src: &SourceSpec,
    orders: &FractionalOrders,
    trunc_tol: f64,
) -> Result<SpectralSolution> {
    solve_source_duhamel_with(src, orders, trunc_tol, &AbelOptions::default())
}

pub fn solve_source_duhamel_with(
    src: &SourceSpec,
    orders: &FractionalOrders,
    trunc_tol: f64,
    abel: &AbelOptions,
) -> Result<SpectralSolution> {
    if !(trunc_tol > 0.0) {
        return Err(Error::arg("trunc_tol", "must be positive"));
    }
    let grid: &Arc<TimeGrid> = src.rho.grid();
    let rho_sup = src.rho.max_abs();
    let sol = solve_abel_system_with(&src.rho, orders, abel)?;
    let (k, bound) = SpectralSolution::choose_duhamel_modes(&src.g, rho_sup, trunc_tol)?;
    let g = src.g.truncated(k);
    let lambdas = &g.eigensystem().lambdas()[..k];
    let modal = if rho_sup == 0.0 {
        vec![vec![0.0; grid.steps() + 1]; k]
    } else {
        modal_histories(&sol.mu, orders, lambdas)?
    };
    let history = DuhamelHistory {
        mu: sol.mu,
        abel_residual: sol.residual,
        modal,
        rho_sup,
    };
    Ok(SpectralSolution::duhamel(orders, &g, history, bound))
}
