//! Laplace-density route for the relaxation function
//! u(t) = 1 − λ t^{α₁} E_{α′,1+α₁}(z) and its derivative.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct Node {
    /// h·e^{−ρ} and h·ρ·e^{−ρ} at ρ = e^x.
    w: f64,
    wd: f64,
    qre: f64,
    qim: f64,
}

/// Trapezoidal discretization in x = ln(r t) of the positive density of the
/// relaxation function at a fixed time, shared by every λ ≥ `lambda_min`.
#[derive(Debug, Clone)]
pub struct RelaxationKernel {
    t: f64,
    lambda_min: f64,
    nodes: Vec<Node>,
    /// First- and second-order analytic tail coefficients for x < x_lo.
    tail_u: (f64, f64),
    tail_du: (f64, f64),
}

/// Σ_{n≥0} (−ρ)^n / (n! (γ + n)), i.e. the lower incomplete gamma γ(γ, ρ)/ρ^γ.
fn scaled_lower_gamma(gamma: f64, rho: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0 / gamma;
    for n in 1..200 {
        term *= -rho / n as f64;
        let c = term / (gamma + n as f64);
        sum += c;
        if c.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Relative accuracy target of the quadrature.
const ACCURACY_EXP: f64 = 40.0;
/// |Q(r)| / λ below which the analytic tail takes over.
const TAIL_RATIO: f64 = 1e-8;

impl RelaxationKernel {
    /// Kernel for orders α (decreasing, in (0,1)) with positive weights q at time t > 0.
    pub fn new(alpha: &[f64], q: &[f64], t: f64, lambda_min: f64) -> Result<Self> {
        if alpha.is_empty() || alpha.len() != q.len() {
            return Err(Error::arg(
                "alpha",
                "alpha and q must have equal nonzero length",
            ));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::arg(
                "t",
                format!("must be positive and finite, got {t}"),
            ));
        }
        if !(lambda_min > 0.0) {
            return Err(Error::arg("lambda_min", "must be positive"));
        }
        let a1 = alpha.iter().cloned().fold(0.0, f64::max);
        let am = alpha.iter().cloned().fold(1.0, f64::min);
        let qsum: f64 = q.iter().sum();

        // Nearest zero of Q⁺ + λ off the real x axis, and the growth of e^{−e^x} in the strip.
        let d = (PI * (1.0 - a1) / a1).min(PI / 3.0) * 0.9;
        let h = 2.0 * PI * d / ACCURACY_EXP;
        let ln_t = t.ln();
        let ln_r_lo = ((TAIL_RATIO * lambda_min / qsum).ln() / am).min(0.0);
        let x_lo = (ln_t + ln_r_lo).min((0.01f64).ln());
        let ln_r_lo = x_lo - ln_t;
        let x_hi = 50f64.ln();
        let n = ((x_hi - x_lo) / h).ceil() as usize;

        let mut nodes = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let x = x_lo + i as f64 * h;
            let rho = x.exp();
            let wt = if i == 0 { 0.5 * h } else { h };
            let e = (-rho).exp();
            let ln_r = x - ln_t;
            let (mut qre, mut qim) = (0.0, 0.0);
            for (a, w) in alpha.iter().zip(q) {
                let mag = w * (a * ln_r).exp();
                let (s, c) = (PI * a).sin_cos();
                qre += mag * c;
                qim += mag * s;
            }
            nodes.push(Node {
                w: wt * e,
                wd: wt * rho * e,
                qre,
                qim,
            });
        }

        let rho_lo = x_lo.exp();
        let e_lo = (-rho_lo).exp();
        // Euler–Maclaurin h²/12 correction for the cut at x_lo, from the first-order integrand.
        let em = h * h / 12.0;
        let (mut u1, mut u2, mut d1, mut d2) = (0.0, 0.0, 0.0, 0.0);
        for (a, w) in alpha.iter().zip(q) {
            let s = (PI * a).sin();
            let r_a = (a * ln_r_lo).exp();
            u1 += w * s * r_a * (scaled_lower_gamma(*a, rho_lo) + em * (a - rho_lo) * e_lo);
            d1 += w
                * s
                * r_a
                * (((ln_r_lo).exp() * scaled_lower_gamma(a + 1.0, rho_lo))
                    + em * (1.0 + a - rho_lo) * rho_lo * e_lo / t);
            for (b, v) in alpha.iter().zip(q) {
                let g = a + b;
                let s2 = (PI * g).sin();
                u2 += w * v * s2 * (g * ln_r_lo).exp() * scaled_lower_gamma(g, rho_lo);
                d2 +=
                    w * v * s2 * ((g + 1.0) * ln_r_lo).exp() * scaled_lower_gamma(g + 1.0, rho_lo);
            }
        }
        Ok(RelaxationKernel {
            t,
            lambda_min,
            nodes,
            tail_u: (u1 / PI, u2 / PI),
            tail_du: (t * d1 / PI, t * d2 / PI),
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn check(&self, lambda: f64) {
        debug_assert!(
            lambda >= self.lambda_min * (1.0 - 1e-12),
            "λ = {lambda} below the kernel's lower bound {}",
            self.lambda_min
        );
    }

    /// u(λ, t).
    pub fn factor(&self, lambda: f64) -> f64 {
        self.check(lambda);
        let mut s = 0.0;
        for nd in &self.nodes {
            let re = nd.qre + lambda;
            s += nd.w * nd.qim / (re * re + nd.qim * nd.qim);
        }
        lambda * s / PI + self.tail_u.0 / lambda - self.tail_u.1 / (lambda * lambda)
    }

    /// du/dt (λ, t).
    pub fn derivative(&self, lambda: f64) -> f64 {
        self.check(lambda);
        let mut s = 0.0;
        for nd in &self.nodes {
            let re = nd.qre + lambda;
            s += nd.wd * nd.qim / (re * re + nd.qim * nd.qim);
        }
        -(lambda * s / PI + self.tail_du.0 / lambda - self.tail_du.1 / (lambda * lambda)) / self.t
    }
}
