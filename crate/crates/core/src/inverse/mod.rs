//! Recovery of the temporal factor ρ of a separable source F = ρ(t) g(x)
//! from the trace u(x₀, ·) at one interior point.
//!
//! The trace is the convolution of μ with v_g(x₀, ·), where v_g solves the
//! homogeneous problem with initial data g and Σ_j q_j J^{1−α_j} μ = ρ.
//! Deconvolution is a lower-triangular solve for the cofactor of μ; ρ then
//! follows by fractional integration.

mod observation;
mod reconstruct;
mod spline;
mod uniqueness;

pub use observation::{synthesize_observation, NoiseModel, Observation};
pub use reconstruct::{
    reconstruct_rho, reconstruct_rho_with, ReconstructionOptions, ReconstructionResult,
    Regularization,
};
pub use spline::HermiteSpline;
pub use uniqueness::{uniqueness_test, UniquenessVerdict};
