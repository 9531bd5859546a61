//! Multi-term time-fractional diffusion on an interval.
//!
//! Solves Σ_j q_j ∂_t^{α_j} u + A u = F on (0, L) with homogeneous Dirichlet
//! ends, through eigenfunction expansions whose time factors are multinomial
//! Mittag-Leffler functions, and checks the qualitative behaviour of the
//! solutions numerically.

pub mod error;
pub mod fracops;
pub mod inverse;
pub mod mittag_leffler;
pub mod properties;
pub mod solver;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
