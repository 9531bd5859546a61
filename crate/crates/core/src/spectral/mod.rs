//! Eigensystems of the elliptic operator A = −(a u′)′ + c u on (0, L) with
//! Dirichlet ends, modal projection, A⁻¹ and norms in the domains of A^γ.
//!
//! Inner products use the composite trapezoid rule on a uniform grid. For
//! the finite-difference eigensystem this is the grid of the discretisation,
//! so discrete orthonormality holds to rounding.

mod eigen;
mod modal;
mod operator;
mod tridiag;

pub use eigen::{EigenSystem, Quadrature};
pub use modal::{
    fractional_power_norm, inverse_elliptic, project, project_fn, ModalCoefficients, PowerNorm,
};
pub use operator::{Coefficient, OperatorSpec};
pub use tridiag::SymTridiagonal;

use std::sync::Arc;

use crate::error::Result;

/// Closed-form eigensystem of −u″ on (0, L) with `n` modes.
pub fn dirichlet_laplacian_eigensystem(length: f64, n: usize) -> Result<Arc<EigenSystem>> {
    EigenSystem::laplacian(length, n).map(Arc::new)
}

/// Finite-difference eigensystem of `spec` on `m` interior points, `n` ≤ m/4 modes.
pub fn sturm_liouville_eigensystem(
    spec: &OperatorSpec,
    m: usize,
    n: usize,
) -> Result<Arc<EigenSystem>> {
    EigenSystem::sturm_liouville(spec, m, n).map(Arc::new)
}
