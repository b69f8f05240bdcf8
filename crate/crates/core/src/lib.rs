//! Truncated Laplacian operators `P-_k` / `P+_k` (partial sums of the ordered
//! Hessian eigenvalues): exact principal eigenpairs on boxes and balls,
//! comparison inequalities between domains, a monotone wide-stencil solver for
//! `P+_1(D^2u) = f` with a principal eigenvalue estimator, and boundary
//! regularity tools.

pub mod closed_form;
pub mod comparisons;
pub mod error;
pub mod geometry;
pub mod matrix_core;
pub mod pde_solver;
pub mod regularity;
pub mod sampling;

pub use closed_form::{
    ball_eigenpair, cube_eigenpair, product_counterexample, rect_eigenpair, residual, BallSpec,
    BoxSpec, CounterexampleCertificate, EigenPair,
};
pub use error::{Error, Result};
pub use geometry::{ConvexDomain, ConvexPolygon};
pub use matrix_core::{pk_minus, pk_plus, spectrum, Frame, Spectrum, SymMatrix};
pub use pde_solver::{
    eigen_inverse_power, solve_dirichlet, DirectionSet, EigenConfig, EigenEstimate, Grid,
    ScalarField, SolverConfig, WideStencil,
};
pub use regularity::{
    barrier, holder_condition_check, holder_exponent_fit, remark_counterexample, BarrierField,
    CubeCover,
};
