//! Wide-stencil monotone scheme for `P+_1(D^2u) = f` with zero Dirichlet data
//! on convex domains, an inverse-power eigenvalue estimator and a discrete
//! lower-bound certifier.

mod banded;
mod directions;
mod eigen;
mod field;
mod grid;
mod operator;
mod solve;

pub use directions::DirectionSet;
pub use eigen::{
    bnv_certify_lower_bound, eigen_inverse_power, eigen_inverse_power_from, EigenConfig,
    EigenEstimate,
};
pub use field::ScalarField;
pub use grid::{Grid, BOUNDARY_MARGIN};
pub use operator::{second_difference, WideStencil};
pub use solve::{solve_dirichlet, DirichletSolution, DirichletSolver, SolveMethod, SolverConfig};
