use serde::Serialize;

use crate::error::{param, Result};
use crate::geometry::ConvexDomain;

/// Nodes closer to the boundary than this fraction of `h` are treated as
/// boundary nodes.
pub const BOUNDARY_MARGIN: f64 = 1e-9;

const NOT_INTERIOR: u32 = u32::MAX;

/// Uniform lattice `{ j h : j in Z^d }` restricted to a convex domain.
#[derive(Clone, Debug, Serialize)]
pub struct Grid {
    domain: ConvexDomain,
    h: f64,
    /// Lattice points per axis.
    shape: Vec<usize>,
    /// Lattice index of the coordinate origin per axis.
    offset: Vec<i64>,
    #[serde(skip)]
    interior: Vec<usize>,
    #[serde(skip)]
    lattice_to_interior: Vec<u32>,
}

impl Grid {
    pub fn new(domain: ConvexDomain, h: f64) -> Result<Self> {
        let dim = domain.dim();
        if !(2..=3).contains(&dim) {
            return Err(param(format!(
                "grid solver supports dimension 2 or 3, got {dim}"
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(param(format!("grid spacing must be positive, got {h}")));
        }
        let (lo, hi) = domain.bounding_box();
        let mut offset = Vec::with_capacity(dim);
        let mut shape = Vec::with_capacity(dim);
        for d in 0..dim {
            let m = (lo[d].abs().max(hi[d].abs()) / h).ceil() as i64 + 1;
            offset.push(m);
            shape.push((2 * m + 1) as usize);
        }
        let total: usize = shape.iter().product();
        if total > u32::MAX as usize / 2 {
            return Err(param("grid too large"));
        }
        let mut grid = Self {
            domain,
            h,
            shape,
            offset,
            interior: vec![],
            lattice_to_interior: vec![NOT_INTERIOR; total],
        };
        for lin in 0..total {
            let x = grid.coords(lin);
            if grid.domain.boundary_distance(&x) > BOUNDARY_MARGIN * h {
                grid.lattice_to_interior[lin] = grid.interior.len() as u32;
                grid.interior.push(lin);
            }
        }
        if grid.interior.is_empty() {
            return Err(param("grid has no interior nodes; refine h"));
        }
        Ok(grid)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn lattice_len(&self) -> usize {
        self.lattice_to_interior.len()
    }

    pub fn interior_len(&self) -> usize {
        self.interior.len()
    }

    /// Lattice linear index of each interior node, ascending.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// Coordinates of the lattice corner `(lo)` and far corner `(hi)`.
    pub fn lattice_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let lo = self.offset.iter().map(|m| -(*m as f64) * self.h).collect();
        let hi = self.offset.iter().map(|m| *m as f64 * self.h).collect();
        (lo, hi)
    }

    /// Row-major (last axis fastest) multi-index of a lattice node.
    pub fn multi_index(&self, mut lin: usize) -> Vec<i64> {
        let mut idx = vec![0i64; self.dim()];
        for d in (0..self.dim()).rev() {
            idx[d] = (lin % self.shape[d]) as i64;
            lin /= self.shape[d];
        }
        idx
    }

    pub fn linear_index(&self, idx: &[i64]) -> Option<usize> {
        let mut lin = 0usize;
        for d in 0..self.dim() {
            if idx[d] < 0 || idx[d] >= self.shape[d] as i64 {
                return None;
            }
            lin = lin * self.shape[d] + idx[d] as usize;
        }
        Some(lin)
    }

    pub fn coords(&self, lin: usize) -> Vec<f64> {
        self.multi_index(lin)
            .iter()
            .zip(&self.offset)
            .map(|(j, m)| (j - m) as f64 * self.h)
            .collect()
    }

    /// Interior slot of a lattice node, if it is interior.
    pub fn interior_slot(&self, lin: usize) -> Option<usize> {
        match self.lattice_to_interior[lin] {
            NOT_INTERIOR => None,
            s => Some(s as usize),
        }
    }

    /// Lattice node nearest to `x`.
    pub fn nearest_node(&self, x: &[f64]) -> Option<usize> {
        let idx: Vec<i64> = x
            .iter()
            .zip(&self.offset)
            .map(|(xi, m)| (xi / self.h).round() as i64 + m)
            .collect();
        self.linear_index(&idx)
    }
}
