//! Scalar special functions and small quadrature helpers.

use std::sync::OnceLock;

/// Γ(x) for real x.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// ln|Γ(x)|.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// 1/Γ(x), exact zero at the poles x = 0, −1, −2, …
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x < 171.0 {
        1.0 / libm::tgamma(x)
    } else {
        (-libm::lgamma_r(x).0).exp()
    }
}

/// Beta function B(a, b) for a, b > 0.
pub fn beta(a: f64, b: f64) -> f64 {
    if a + b < 171.0 {
        libm::tgamma(a) * libm::tgamma(b) / libm::tgamma(a + b)
    } else {
        (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
    }
}

/// Neumaier's compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Unrounded pair (sum, correction).
    pub fn parts(&self) -> (f64, f64) {
        (self.sum, self.comp)
    }
}

/// Gauss–Legendre rule on [−1, 1]: (nodes, weights).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            } else {
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            z = 0.0;
            dp = 1.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n == 1 {
        w[0] = 2.0;
    }
    (x, w)
}

/// Node counts offered by [`gauss_rule`].
pub const GAUSS_SIZES: [usize; 5] = [3, 4, 6, 10, 16];

/// Cached Gauss–Legendre rule of one of the sizes in [`GAUSS_SIZES`].
pub fn gauss_rule(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static RULES: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let rules = RULES.get_or_init(|| GAUSS_SIZES.iter().map(|&n| gauss_legendre(n)).collect());
    let idx = GAUSS_SIZES
        .iter()
        .position(|&s| s == n)
        .expect("unsupported Gauss rule size");
    &rules[idx]
}

/// Smallest offered rule that integrates a function analytic in the Bernstein
/// ellipse reaching a singularity `d` panel lengths beyond the panel end to
/// roughly 1e-15 relative accuracy. `None` when `d < 1`.
pub fn gauss_size_for_distance(d: f64) -> Option<usize> {
    if d >= 60.0 {
        Some(3)
    } else if d >= 15.0 {
        Some(4)
    } else if d >= 4.0 {
        Some(6)
    } else if d >= 1.0 {
        Some(10)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_polynomials_exactly() {
        for &n in &GAUSS_SIZES {
            let (x, w) = gauss_rule(n);
            for deg in 0..(2 * n) {
                let s: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!((s - exact).abs() < 1e-14, "n={n} deg={deg} {s} {exact}");
            }
        }
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let mut s = NeumaierSum::new();
        for x in [1.0, 1e100, 1.0, -1e100] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn rgamma_poles_and_values() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
        assert!((rgamma(0.5) - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert!((rgamma(171.5).ln() + ln_gamma(171.5)).abs() < 1e-12);
    }
}
