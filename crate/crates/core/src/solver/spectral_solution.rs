//! Eigenfunction-expansion solutions: the homogeneous problem and the
//! separable-source problem, sharing evaluation and truncation logic.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fracops::{FractionalOrders, SampledFunction, TimeGrid};
use crate::mittag_leffler::{envelope_constant, ModalFactors};
use crate::spectral::{EigenSystem, ModalCoefficients};

/// Time histories of a separable-source solution.
#[derive(Debug, Clone)]
pub struct DuhamelHistory {
    /// Density μ of the source reduction, singular exponent α₁ − 1.
    pub mu: SampledFunction,
    /// Relative forward residual of the Abel solve.
    pub abel_residual: f64,
    /// w_n(t_k) = ∫₀^{t_k} μ(t_k − s) u(λ_n, s) ds, one row per retained mode.
    pub modal: Vec<Vec<f64>>,
    /// sup_t |ρ(t)|.
    pub rho_sup: f64,
}

#[derive(Debug, Clone)]
pub enum SolutionKind {
    Homogeneous {
        /// Envelope constant Ĉ at t_min.
        envelope: f64,
        t_min: f64,
    },
    Duhamel(DuhamelHistory),
}

/// u(x, t) = Σ_n A_n(t) φ_n(x) over the retained modes.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    orders: FractionalOrders,
    coeffs: ModalCoefficients,
    kind: SolutionKind,
    truncation_bound: f64,
}

/// Smallest k ≤ n with bound(k) ≤ tol, given the bound as a tail sum.
///
/// `weights[i]` is the squared contribution of mode i; `rest` covers the
/// modes past the stored ones. bound(k) = scale·sqrt(Σ_{i≥k} weights + rest).
fn choose_modes(weights: &[f64], rest: f64, scale: f64, tol: f64) -> Result<(usize, f64)> {
    let n = weights.len();
    let mut tail = rest;
    let mut bound = scale * rest.sqrt();
    if !(bound <= tol) {
        return Err(Error::TruncationUnreachable {
            requested: tol,
            achieved: bound,
            modes: n,
        });
    }
    let mut k = n;
    while k > 1 {
        let b = scale * (tail + weights[k - 1]).sqrt();
        if b > tol {
            break;
        }
        tail += weights[k - 1];
        bound = b;
        k -= 1;
    }
    Ok((k, bound))
}

/// Homogeneous solution for initial data with coefficients `a`.
///
/// Retains the fewest modes such that, for every t ≥ t_min,
/// Ĉ·(Σ_{n>K} a_n²/(1+λ_n t_min^{α₁})² + ‖a‖²_tail/(1+λ_N t_min^{α₁})²)^{1/2} ≤ trunc_tol.
pub fn solve_homogeneous(
    a: &ModalCoefficients,
    orders: &FractionalOrders,
    trunc_tol: f64,
    t_min: f64,
) -> Result<SpectralSolution> {
    if !(trunc_tol > 0.0) {
        return Err(Error::arg("trunc_tol", "must be positive"));
    }
    if a.is_empty() {
        return Err(Error::arg("a", "no modal coefficients"));
    }
    let envelope = envelope_constant(orders, t_min)?;
    let es = a.eigensystem();
    let tau = t_min.powf(orders.alpha1());
    let weights: Vec<f64> = a
        .values()
        .iter()
        .zip(es.lambdas())
        .map(|(c, l)| (c / (1.0 + l * tau)).powi(2))
        .collect();
    let last = es.lambda(a.len() - 1);
    let rest = a.tail_sq().unwrap_or(0.0) / (1.0 + last * tau).powi(2);
    let (k, bound) = choose_modes(&weights, rest, envelope, trunc_tol)?;
    Ok(SpectralSolution {
        orders: orders.clone(),
        coeffs: a.truncated(k),
        kind: SolutionKind::Homogeneous { envelope, t_min },
        truncation_bound: bound,
    })
}

impl SpectralSolution {
    pub(crate) fn duhamel(
        orders: &FractionalOrders,
        g: &ModalCoefficients,
        history: DuhamelHistory,
        truncation_bound: f64,
    ) -> Self {
        SpectralSolution {
            orders: orders.clone(),
            coeffs: g.clone(),
            kind: SolutionKind::Duhamel(history),
            truncation_bound,
        }
    }

    pub(crate) fn choose_duhamel_modes(
        g: &ModalCoefficients,
        rho_sup: f64,
        tol: f64,
    ) -> Result<(usize, f64)> {
        // |w_n(t)| ≤ sup|ρ| / λ_n for every t
        let es = g.eigensystem();
        let weights: Vec<f64> = g
            .values()
            .iter()
            .zip(es.lambdas())
            .map(|(c, l)| (c / l).powi(2))
            .collect();
        let last = es.lambda(g.len() - 1);
        let rest = g.tail_sq().unwrap_or(0.0) / (last * last);
        choose_modes(&weights, rest, rho_sup, tol)
    }

    pub fn orders(&self) -> &FractionalOrders {
        &self.orders
    }

    pub fn coefficients(&self) -> &ModalCoefficients {
        &self.coeffs
    }

    pub fn eigensystem(&self) -> &Arc<EigenSystem> {
        self.coeffs.eigensystem()
    }

    pub fn kind(&self) -> &SolutionKind {
        &self.kind
    }

    pub fn retained_modes(&self) -> usize {
        self.coeffs.len()
    }

    /// Bound on the L²(Ω) norm of the discarded modes.
    pub fn truncation_bound(&self) -> f64 {
        self.truncation_bound
    }

    /// Time grid of a separable-source solution.
    pub fn time_grid(&self) -> Option<&Arc<TimeGrid>> {
        match &self.kind {
            SolutionKind::Duhamel(h) => Some(h.mu.grid()),
            SolutionKind::Homogeneous { .. } => None,
        }
    }

    /// Coefficients of u(·, t) in the eigenbasis.
    pub fn modal_amplitudes(&self, t: f64) -> Result<Vec<f64>> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::arg("t", format!("must be nonnegative, got {t}")));
        }
        let es = self.eigensystem();
        let c = self.coeffs.values();
        match &self.kind {
            SolutionKind::Homogeneous { t_min, .. } => {
                if t == 0.0 {
                    return Ok(c.to_vec());
                }
                if t < *t_min {
                    log::warn!("evaluation at t = {t:e} below t_min = {t_min:e}; truncation bound not guaranteed");
                }
                let f = ModalFactors::new(&self.orders, t, es.lambda(0))?;
                Ok(c.iter()
                    .zip(es.lambdas())
                    .map(|(c, l)| c * f.u(*l))
                    .collect())
            }
            SolutionKind::Duhamel(h) => {
                let grid = h.mu.grid();
                if t > grid.horizon() * (1.0 + 1e-12) {
                    return Err(Error::arg(
                        "t",
                        format!("{t} beyond the source horizon {}", grid.horizon()),
                    ));
                }
                let i = grid.locate(t);
                let (t0, t1) = (grid.node(i), grid.node(i + 1));
                let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
                Ok(c.iter()
                    .zip(&h.modal)
                    .map(|(c, row)| c * (row[i] + w * (row[i + 1] - row[i])))
                    .collect())
            }
        }
    }

    /// u(x, t).
    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        let amp = self.modal_amplitudes(t)?;
        Ok(synthesize(self.eigensystem(), &amp, x))
    }

    /// u on the tensor grid `ts` × `xs`; rows follow `ts`.
    pub fn eval_grid(&self, xs: &[f64], ts: &[f64]) -> Result<Vec<Vec<f64>>> {
        let es = self.eigensystem();
        ts.par_iter()
            .map(|&t| {
                let amp = self.modal_amplitudes(t)?;
                Ok(xs.iter().map(|&x| synthesize(es, &amp, x)).collect())
            })
            .collect()
    }

    /// ‖u(·, t)‖_{L²(Ω)} of the retained modes.
    pub fn l2_norm(&self, t: f64) -> Result<f64> {
        Ok(self
            .modal_amplitudes(t)?
            .iter()
            .map(|a| a * a)
            .sum::<f64>()
            .sqrt())
    }
}

/// Σ_n amp_n φ_n(x), summed in mode order.
pub(crate) fn synthesize(es: &EigenSystem, amp: &[f64], x: f64) -> f64 {
    let mut s = 0.0;
    for (k, a) in amp.iter().enumerate() {
        s += a * es.phi(k, x);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{dirichlet_laplacian_eigensystem, project_fn};
    use std::f64::consts::PI;

    #[test]
    fn mode_selection_stops_at_the_tolerance() {
        let (k, b) = choose_modes(&[1.0, 1e-4, 1e-6, 1e-8], 0.0, 1.0, 2e-3).unwrap();
        assert_eq!(k, 2);
        assert!((b - (1e-6f64 + 1e-8).sqrt()).abs() < 1e-15);
        assert!(matches!(
            choose_modes(&[1.0], 1.0, 1.0, 0.5),
            Err(Error::TruncationUnreachable { .. })
        ));
    }

    #[test]
    fn initial_time_reproduces_the_data() {
        let es = dirichlet_laplacian_eigensystem(PI, 32).unwrap();
        let a = project_fn(|x| x * (PI - x), &es, 32).unwrap();
        let o = FractionalOrders::new(vec![0.8, 0.4], vec![1.0, 1.0]).unwrap();
        let s = solve_homogeneous(&a, &o, 1e-3, 1e-2).unwrap();
        assert!(s.retained_modes() < 32);
        let amp = s.modal_amplitudes(0.0).unwrap();
        assert_eq!(amp, &a.values()[..s.retained_modes()]);
        assert_eq!(s.eval(0.0, 0.3).unwrap(), 0.0);
        assert_eq!(s.eval(PI, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn single_mode_half_order_matches_erfc() {
        let es = dirichlet_laplacian_eigensystem(PI, 4).unwrap();
        let a = ModalCoefficients::unit(0, 4, es).unwrap();
        let o = FractionalOrders::single(0.5).unwrap();
        let s = solve_homogeneous(&a, &o, 1e-10, 1e-3).unwrap();
        let expect = libm::erfc(1.0) * std::f64::consts::E * (2.0 / PI).sqrt();
        let got = s.eval(PI / 2.0, 1.0).unwrap();
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
        assert!((expect - 0.341162).abs() < 1e-6, "{expect}");
    }
}
