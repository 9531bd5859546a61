use serde::Serialize;

use super::geometric_grid;
use crate::error::{Error, Result};
use crate::fracops::FractionalOrders;
use crate::solver::{SolutionKind, SpectralSolution};
use crate::special::rgamma;
use crate::spectral::{inverse_elliptic, ModalCoefficients};

/// Exponent of the first correction to the t^{−α_m} law; 2α₁ when m = 1.
pub fn correction_exponent(orders: &FractionalOrders) -> f64 {
    let a = orders.alpha();
    let m = a.len();
    if m == 1 {
        2.0 * a[0]
    } else {
        a[m - 2].min(2.0 * a[m - 1])
    }
}

/// Long-time fit of u(x, t) ≈ A t^{−p} against A = q_m b(x)/Γ(1−α_m), p = α_m.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub fitted_exponent: f64,
    /// exp of the mean of ln(t^{α_m} u) over the window.
    pub fitted_amplitude: f64,
    pub predicted_exponent: f64,
    pub predicted_amplitude: f64,
    pub exponent_deviation: f64,
    pub amplitude_deviation: f64,
    /// RMS residual of the free log-log fit.
    pub fit_residual: f64,
    pub correction_exponent: f64,
    /// Window actually used, after any widening.
    pub window: (f64, f64),
}

const FIT_RESIDUAL_LIMIT: f64 = 1e-2;
const MAX_WIDENINGS: usize = 3;

fn require_homogeneous(sol: &SpectralSolution) -> Result<()> {
    match sol.kind() {
        SolutionKind::Homogeneous { .. } => Ok(()),
        SolutionKind::Duhamel(_) => Err(Error::arg(
            "sol",
            "long-time checks need a homogeneous solution",
        )),
    }
}

fn leading_amplitude(orders: &FractionalOrders, a: &ModalCoefficients, x: f64) -> f64 {
    orders.q_m() * rgamma(1.0 - orders.alpha_m()) * inverse_elliptic(a).eval(x)
}

/// (slope, intercept, RMS residual) of the least-squares line through (xs, ys).
fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - icept - slope * x).powi(2))
        .sum();
    (slope, icept, (rss / n).sqrt())
}

/// Log-log regression of u(x, ·) over the increasing times `window`.
///
/// If the free fit leaves an RMS residual above 10⁻², the window is replaced
/// by a geometric one reaching 10× further, at most three times.
pub fn verify_asymptotics(
    sol: &SpectralSolution,
    a: &ModalCoefficients,
    x: f64,
    window: &[f64],
) -> Result<AsymptoticReport> {
    require_homogeneous(sol)?;
    if window.len() < 2 || window.windows(2).any(|w| !(w[1] > w[0])) || !(window[0] > 0.0) {
        return Err(Error::arg(
            "t_window",
            "needs at least two positive increasing times",
        ));
    }
    let orders = sol.orders();
    let am = orders.alpha_m();
    let mut ts = window.to_vec();
    let mut widenings = 0;
    loop {
        let us: Vec<f64> = sol
            .eval_grid(&[x], &ts)?
            .into_iter()
            .map(|r| r[0])
            .collect();
        if let Some((t, u)) = ts.iter().zip(&us).find(|(_, u)| !(**u > 0.0)) {
            return Err(Error::NonPositiveSample { t: *t, value: *u });
        }
        let lt: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
        let lu: Vec<f64> = us.iter().map(|u| u.ln()).collect();
        let (slope, _, resid) = line_fit(&lt, &lu);
        if resid > FIT_RESIDUAL_LIMIT && widenings < MAX_WIDENINGS {
            widenings += 1;
            let hi = window[window.len() - 1] * 10f64.powi(widenings as i32);
            ts = geometric_grid(window[0], hi, window.len());
            continue;
        }
        let fitted_amplitude =
            (lt.iter().zip(&lu).map(|(l, u)| u + am * l).sum::<f64>() / lt.len() as f64).exp();
        let predicted_amplitude = leading_amplitude(orders, a, x);
        let fitted_exponent = -slope;
        return Ok(AsymptoticReport {
            fitted_exponent,
            fitted_amplitude,
            predicted_exponent: am,
            predicted_amplitude,
            exponent_deviation: (fitted_exponent - am).abs() / am,
            amplitude_deviation: (fitted_amplitude - predicted_amplitude).abs()
                / predicted_amplitude.abs(),
            fit_residual: resid,
            correction_exponent: correction_exponent(orders),
            window: (ts[0], ts[ts.len() - 1]),
        });
    }
}

/// First sampled time after which u(x, ·) stays positive, with the crossing
/// time of the leading term and the fitted first correction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OnsetReport {
    /// None when the window is empty or ends nonpositive.
    pub onset: Option<f64>,
    /// Time after which the predicted leading term exceeds the fitted correction.
    pub predicted: Option<f64>,
    pub leading_amplitude: f64,
    pub correction_amplitude: Option<f64>,
}

pub fn positivity_onset(sol: &SpectralSolution, x: f64, window: &[f64]) -> Result<OnsetReport> {
    require_homogeneous(sol)?;
    let orders = sol.orders();
    let c1 = leading_amplitude(orders, sol.coefficients(), x);
    if window.is_empty() {
        return Ok(OnsetReport {
            onset: None,
            predicted: None,
            leading_amplitude: c1,
            correction_amplitude: None,
        });
    }
    if window.windows(2).any(|w| !(w[1] > w[0])) || !(window[0] > 0.0) {
        return Err(Error::arg(
            "search_window",
            "needs positive increasing times",
        ));
    }
    let us: Vec<f64> = sol
        .eval_grid(&[x], window)?
        .into_iter()
        .map(|r| r[0])
        .collect();
    let onset = match us.iter().rposition(|u| !(*u > 0.0)) {
        None => Some(window[0]),
        Some(i) if i + 1 < window.len() => Some(window[i + 1]),
        Some(_) => None,
    };
    // residual r = u − c1 t^{−α_m} ≈ c2 t^{−γ} over the upper half of the window
    let am = orders.alpha_m();
    let gamma = correction_exponent(orders);
    let half = window.len() / 2;
    let (mut num, mut den) = (0.0, 0.0);
    for (t, u) in window[half..].iter().zip(&us[half..]) {
        let w = t.powf(-gamma);
        num += (u - c1 * t.powf(-am)) * w;
        den += w * w;
    }
    let c2 = if den > 0.0 { Some(num / den) } else { None };
    let predicted = match c2 {
        Some(c2) if c1 > 0.0 && c2 != 0.0 => Some((c2.abs() / c1).powf(1.0 / (gamma - am))),
        _ => None,
    };
    Ok(OnsetReport {
        onset,
        predicted,
        leading_amplitude: c1,
        correction_amplitude: c2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correction_exponent_cases() {
        let one = FractionalOrders::single(0.3).unwrap();
        assert_eq!(correction_exponent(&one), 0.6);
        let two = FractionalOrders::new(vec![0.8, 0.4], vec![1.0, 1.0]).unwrap();
        assert_eq!(correction_exponent(&two), 0.8);
        let three = FractionalOrders::new(vec![0.9, 0.3, 0.2], vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(correction_exponent(&three), 0.3);
    }

    #[test]
    fn line_fit_recovers_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        let (s, c, r) = line_fit(&xs, &ys);
        assert!((s + 0.5).abs() < 1e-15 && (c - 2.0).abs() < 1e-15 && r < 1e-15);
    }
}
