//! Shared fixtures for the criterion benches.

use std::f64::consts::FRAC_PI_2;

use trunclap::matrix_core::random_symmetric;
use trunclap::pde_solver::DirectionSet;
use trunclap::sampling::rng;
use trunclap::{ConvexDomain, Grid, SymMatrix, WideStencil};

/// Seeded batch of random symmetric matrices.
pub fn matrices(dim: usize, count: usize) -> Vec<SymMatrix> {
    let mut r = rng(7);
    (0..count).map(|_| random_symmetric(&mut r, dim)).collect()
}

/// Wide stencil on the square `(-pi/2, pi/2)^2` at spacing `pi / cells`.
pub fn square_stencil(cells: usize, order: u32) -> WideStencil {
    let domain = ConvexDomain::cuboid(vec![FRAC_PI_2; 2]).expect("square");
    let grid = Grid::new(domain, std::f64::consts::PI / cells as f64).expect("grid");
    WideStencil::new(grid, DirectionSet::new(2, order).expect("directions")).expect("stencil")
}
