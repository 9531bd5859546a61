//! Forward solvers for Σ_j q_j ∂_t^{α_j} u + A u = F with Dirichlet ends.
//!
//! The spectral solvers expand in eigenfunctions of A; the time factors come
//! from the multinomial Mittag-Leffler machinery. The L1 finite-difference
//! solver shares no code path with them and serves as an oracle.

mod duhamel;
mod green;
mod oracle;
mod spectral_solution;

pub use duhamel::{solve_source_duhamel, solve_source_duhamel_with, SourceSpec};
pub use green::{green_function, GreenValue};
pub use oracle::{solve_l1_oracle, GridSolution, SpaceTimeSource};
pub use spectral_solution::{solve_homogeneous, DuhamelHistory, SolutionKind, SpectralSolution};

pub(crate) use duhamel::{bilinear, for_each_panel, reflected_hats};
