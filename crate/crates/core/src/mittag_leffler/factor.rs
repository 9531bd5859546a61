//! Modal decay factors u(λ, t) = 1 − λ t^{α₁} E_{α′,1+α₁}(z) and
//! u′(λ, t) = −λ t^{α₁−1} E_{α′,α₁}(z), z = (−λ t^{α₁}, −q₂ t^{α₁−α₂}, …).

use super::series::MlContext;
use super::{ml_eval_with, MlArguments, MlOptions, RelaxationKernel};
use crate::error::{Error, Result};
use crate::fracops::FractionalOrders;
use crate::special::rgamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorRoute {
    /// t = 0.
    Initial,
    /// Direct series summation.
    Series,
    /// Quadrature of the positive Laplace density.
    Laplace,
}

/// u(λ, t) and the derivative split as u′ = t^{du_exponent} · du_cofactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorValue {
    pub u: f64,
    pub du_cofactor: f64,
    /// α₁ − 1.
    pub du_exponent: f64,
    pub route: FactorRoute,
}

impl FactorValue {
    /// u′(t); infinite at t = 0 unless the cofactor vanishes.
    pub fn du(&self, t: f64) -> f64 {
        self.du_cofactor * t.powf(self.du_exponent)
    }
}

fn clamp_factor(raw: f64, tol: f64, lambda: f64, t: f64) -> f64 {
    if !(-tol..=1.0 + tol).contains(&raw) {
        log::warn!(
            "decay factor {raw:e} at λ = {lambda}, t = {t} left [0, 1] beyond tolerance; clamped"
        );
    }
    raw.clamp(0.0, 1.0)
}

fn validate(lambda: f64, t: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::arg(
            "lambda",
            format!("must be positive, got {lambda}"),
        ));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::arg("t", format!("must be nonnegative, got {t}")));
    }
    Ok(())
}

fn initial(lambda: f64, orders: &FractionalOrders) -> FactorValue {
    FactorValue {
        u: 1.0,
        du_cofactor: -lambda * rgamma(orders.alpha1()),
        du_exponent: orders.alpha1() - 1.0,
        route: FactorRoute::Initial,
    }
}

/// Series route is used while the arguments stay small enough that the
/// block sums converge quickly without cancellation.
fn series_is_cheap(z: &[f64], beta: &[f64]) -> bool {
    z.iter().map(|v| v.abs()).sum::<f64>() <= 1.0 && beta.iter().all(|b| *b >= 0.2)
}

/// (u, u′ cofactor) for one eigenvalue at one time.
pub fn solution_factor(
    lambda: f64,
    orders: &FractionalOrders,
    t: f64,
    tol: f64,
) -> Result<FactorValue> {
    solution_factor_with(lambda, orders, t, tol, &mut MlContext::new())
}

pub fn solution_factor_with(
    lambda: f64,
    orders: &FractionalOrders,
    t: f64,
    tol: f64,
    ctx: &mut MlContext,
) -> Result<FactorValue> {
    validate(lambda, t)?;
    if !(tol > 0.0) {
        return Err(Error::arg("tol", "must be positive"));
    }
    if t == 0.0 {
        return Ok(initial(lambda, orders));
    }
    let a1 = orders.alpha1();
    let beta = orders.ml_beta();
    let z = orders.ml_z(lambda, t);
    let (raw_u, cof, route) = if series_is_cheap(&z, &beta) {
        let scale = lambda * t.powf(a1);
        let opts = MlOptions::default();
        let e1 = ml_eval_with(
            &MlArguments::new(1.0 + a1, beta.clone(), z.clone())?,
            tol / scale.max(1.0),
            &opts,
            ctx,
        )?;
        let e0 = ml_eval_with(
            &MlArguments::new(a1, beta, z)?,
            tol / lambda.max(1.0),
            &opts,
            ctx,
        )?;
        (
            1.0 - scale * e1.value,
            -lambda * e0.value,
            FactorRoute::Series,
        )
    } else {
        let k = RelaxationKernel::new(orders.alpha(), orders.q(), t, lambda)?;
        (
            k.factor(lambda),
            k.derivative(lambda) * t.powf(1.0 - a1),
            FactorRoute::Laplace,
        )
    };
    Ok(FactorValue {
        u: clamp_factor(raw_u, tol, lambda, t),
        du_cofactor: cof,
        du_exponent: a1 - 1.0,
        route,
    })
}

/// Decay factors of many modes λ ≥ `lambda_min` at one time, sharing one quadrature.
#[derive(Debug, Clone)]
pub struct ModalFactors {
    orders: FractionalOrders,
    t: f64,
    kernel: Option<RelaxationKernel>,
}

impl ModalFactors {
    pub fn new(orders: &FractionalOrders, t: f64, lambda_min: f64) -> Result<Self> {
        validate(lambda_min, t)?;
        let kernel = if t > 0.0 {
            Some(RelaxationKernel::new(
                orders.alpha(),
                orders.q(),
                t,
                lambda_min,
            )?)
        } else {
            None
        };
        Ok(ModalFactors {
            orders: orders.clone(),
            t,
            kernel,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn u(&self, lambda: f64) -> f64 {
        match &self.kernel {
            None => 1.0,
            Some(k) => clamp_factor(k.factor(lambda), 1e-12, lambda, self.t),
        }
    }

    /// t^{1−α₁} u′(λ, t).
    pub fn du_cofactor(&self, lambda: f64) -> f64 {
        match &self.kernel {
            None => -lambda * rgamma(self.orders.alpha1()),
            Some(k) => k.derivative(lambda) * self.t.powf(1.0 - self.orders.alpha1()),
        }
    }

    pub fn value(&self, lambda: f64) -> FactorValue {
        match &self.kernel {
            None => initial(lambda, &self.orders),
            Some(_) => FactorValue {
                u: self.u(lambda),
                du_cofactor: self.du_cofactor(lambda),
                du_exponent: self.orders.alpha1() - 1.0,
                route: FactorRoute::Laplace,
            },
        }
    }
}

/// Ĉ with u(λ, t) ≤ Ĉ / (1 + λ t_min^{α₁}) for every λ > 0 and t ≥ t_min.
///
/// u decreases in t, so the supremum at t_min bounds all later times. The
/// supremum is taken over a geometric λ grid together with the λ → ∞ limit
/// Σ_j q_j t_min^{α₁−α_j} / Γ(1−α_j), then enlarged by 5%.
pub fn envelope_constant(orders: &FractionalOrders, t_min: f64) -> Result<f64> {
    if !(t_min > 0.0 && t_min.is_finite()) {
        return Err(Error::arg(
            "t_min",
            format!("must be positive, got {t_min}"),
        ));
    }
    let a1 = orders.alpha1();
    let tp = t_min.powf(a1);
    let lo = 1e-6 / tp;
    let k = RelaxationKernel::new(orders.alpha(), orders.q(), t_min, lo)?;
    let points = 400;
    let mut sup: f64 = 1.0;
    for i in 0..=points {
        let lam = lo * 10f64.powf(14.0 * i as f64 / points as f64);
        sup = sup.max(k.factor(lam).clamp(0.0, 1.0) * (1.0 + lam * tp));
    }
    let limit: f64 = orders
        .alpha()
        .iter()
        .zip(orders.q())
        .map(|(a, q)| q * t_min.powf(a1 - a) * rgamma(1.0 - a))
        .sum();
    Ok(1.05 * sup.max(limit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn erfcx(x: f64) -> f64 {
        (x * x).exp() * libm::erfc(x)
    }

    #[test]
    fn initial_time() {
        let o = FractionalOrders::new(vec![0.8, 0.4], vec![1.0, 1.0]).unwrap();
        let f = solution_factor(3.0, &o, 0.0, 1e-12).unwrap();
        assert_eq!(f.u, 1.0);
        assert_eq!(f.route, FactorRoute::Initial);
        assert!((f.du_cofactor + 3.0 * rgamma(0.8)).abs() < 1e-15);
    }

    #[test]
    fn half_order_unit_time() {
        let o = FractionalOrders::single(0.5).unwrap();
        let f = solution_factor(1.0, &o, 1.0, 1e-12).unwrap();
        assert!((f.u - erfcx(1.0)).abs() < 1e-12);
        assert!((f.u - 0.4275835761558070).abs() < 1e-12);
    }

    #[test]
    fn series_and_laplace_routes_agree() {
        let o = FractionalOrders::new(vec![0.8, 0.4], vec![1.0, 1.5]).unwrap();
        let mut ctx = MlContext::new();
        for &(lam, t) in &[(0.3, 0.2), (1.0, 0.05), (0.1, 0.3), (2.0, 0.01)] {
            let s = solution_factor_with(lam, &o, t, 1e-13, &mut ctx).unwrap();
            assert_eq!(s.route, FactorRoute::Series, "{lam} {t}");
            let m = ModalFactors::new(&o, t, lam).unwrap();
            assert!(
                (s.u - m.u(lam)).abs() < 1e-12,
                "u at λ={lam} t={t}: {} vs {}",
                s.u,
                m.u(lam)
            );
            let (a, b) = (s.du_cofactor, m.du_cofactor(lam));
            assert!(
                (a - b).abs() < 1e-10 * (1.0 + a.abs()),
                "u′ at λ={lam} t={t}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn factor_decreases_in_lambda_and_respects_envelope() {
        let o = FractionalOrders::new(vec![0.7, 0.3], vec![1.0, 2.0]).unwrap();
        let t_min = 1e-2;
        let c = envelope_constant(&o, t_min).unwrap();
        for &t in &[t_min, 0.1, 1.0, 10.0] {
            let m = ModalFactors::new(&o, t, 1.0).unwrap();
            let mut last = 1.0;
            for n in 1..200 {
                let lam = (n * n) as f64;
                let u = m.u(lam);
                assert!(u <= last + 1e-15);
                assert!(u <= c / (1.0 + lam * t_min.powf(0.7)));
                last = u;
            }
        }
    }
}
