use serde::Serialize;

use super::reconstruct::{reconstruct_parts, ReconstructionOptions};
use super::Observation;
use crate::error::{Error, Result};
use crate::fracops::FractionalOrders;
use crate::properties::DataSign;
use crate::special::rgamma;
use crate::spectral::ModalCoefficients;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessVerdict {
    /// The observation is within `tolerance` of zero and g is declared nonnegative.
    pub applicable: bool,
    pub observation_norm: f64,
    pub tolerance: f64,
    /// ‖ρ_estimate‖_{L¹(0,T)}, trapezoidal.
    pub rho_l1_norm: Option<f64>,
    pub stability_constant: Option<f64>,
    /// ‖ρ_estimate‖_{L¹} ≤ C_stab · tolerance.
    pub holds: bool,
    pub message: String,
}

/// Stability constant of ρ ↦ u(x₀, ·) inverted on the grid:
/// ‖ρ‖_{L¹} ≤ Σ_j q_j T^{1−α_j}/Γ(2−α_j) · T^{α₁}/α₁ · ‖L⁻¹‖_∞ · ‖u‖_∞.
fn stability_constant(orders: &FractionalOrders, horizon: f64, inverse_norm: f64) -> f64 {
    let a1 = orders.alpha1();
    let integral: f64 = orders
        .alpha()
        .iter()
        .zip(orders.q())
        .map(|(a, q)| q * horizon.powf(1.0 - a) * rgamma(2.0 - a))
        .sum();
    integral * horizon.powf(a1) / a1 * inverse_norm
}

/// If the observation vanishes to within `tol`, checks that the reconstructed ρ
/// is bounded by the stability estimate.
pub fn uniqueness_test(
    obs: &Observation,
    g: &ModalCoefficients,
    orders: &FractionalOrders,
    tol: f64,
) -> Result<UniquenessVerdict> {
    let sign = obs
        .g_sign()
        .ok_or(Error::HypothesisMissing("sign of the spatial factor g"))?;
    if !(tol >= 0.0) {
        return Err(Error::arg("tol", format!("must be nonnegative, got {tol}")));
    }
    let norm = obs.sup_norm();
    let verdict = |applicable, message: &str| UniquenessVerdict {
        applicable,
        observation_norm: norm,
        tolerance: tol,
        rho_l1_norm: None,
        stability_constant: None,
        holds: false,
        message: message.into(),
    };
    if sign != DataSign::Nonnegative {
        return Ok(verdict(
            false,
            "g not declared nonnegative; uniqueness test not applicable",
        ));
    }
    if norm > tol {
        return Ok(verdict(
            false,
            "data nonzero; uniqueness test not applicable",
        ));
    }
    let (l, rec) = reconstruct_parts(obs, g, orders, &ReconstructionOptions::default())?;
    let c_stab = stability_constant(orders, obs.grid().horizon(), l.inverse_norm());
    let nodes = obs.grid().nodes();
    let r = rec.rho.cofactors();
    let l1: f64 = (0..nodes.len() - 1)
        .map(|k| 0.5 * (nodes[k + 1] - nodes[k]) * (r[k].abs() + r[k + 1].abs()))
        .sum();
    let holds = l1 <= c_stab * tol;
    let message = if l1 == 0.0 {
        "unique: rho = 0"
    } else if holds {
        "rho within the stability bound"
    } else {
        "rho exceeds the stability bound"
    };
    Ok(UniquenessVerdict {
        applicable: true,
        observation_norm: norm,
        tolerance: tol,
        rho_l1_norm: Some(l1),
        stability_constant: Some(c_stab),
        holds,
        message: message.into(),
    })
}
