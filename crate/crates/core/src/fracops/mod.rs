//! Discrete fractional calculus on graded time grids.
//!
//! Functions are represented as t^p times a piecewise-linear cofactor, with
//! p ∈ (−1, 0]. Riemann–Liouville integrals are computed by product
//! integration of that representation, so power laws are reproduced exactly.

mod abel;
mod grid;
mod ops;
mod orders;
mod sampled;
pub(crate) mod weights;

pub use abel::{solve_abel_system, solve_abel_system_with, AbelOptions, AbelSolution};
pub use grid::TimeGrid;
pub use ops::{caputo_derivative, multi_rl_integral_at, rl_derivative, rl_integral};
pub use orders::FractionalOrders;
pub use sampled::SampledFunction;
