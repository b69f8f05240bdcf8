use rayon::prelude::*;

use super::directions::DirectionSet;
use super::field::ScalarField;
use super::grid::Grid;
use crate::error::{param, Error, Result};

/// Marks a stencil arm that ends on the boundary (Dirichlet value 0).
pub(crate) const BOUNDARY: u32 = u32::MAX;

/// One directional second difference at one node:
/// `c_plus u(x + h_+ e) + c_minus u(x - h_- e) - c_center u(x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Arm {
    pub plus: u32,
    pub minus: u32,
    pub c_plus: f64,
    pub c_minus: f64,
    pub c_center: f64,
}

impl Arm {
    fn new(plus: u32, minus: u32, h_plus: f64, h_minus: f64) -> Self {
        let s = h_plus + h_minus;
        Self {
            plus,
            minus,
            c_plus: 2.0 / (h_plus * s),
            c_minus: 2.0 / (h_minus * s),
            c_center: 2.0 / (h_plus * h_minus),
        }
    }

    #[inline]
    fn eval(&self, u: &[f64], center: f64) -> f64 {
        let up = if self.plus == BOUNDARY {
            0.0
        } else {
            u[self.plus as usize]
        };
        let um = if self.minus == BOUNDARY {
            0.0
        } else {
            u[self.minus as usize]
        };
        self.c_plus * up + self.c_minus * um - self.c_center * center
    }
}

/// Distance to the next lattice node or to the boundary along `sign * e`,
/// and the interior slot reached (or [`BOUNDARY`]).
fn reach(grid: &Grid, idx: &[i64], x: &[f64], e: &[i32], sign: i64) -> (u32, f64) {
    let len = e.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt();
    let step = len * grid.h();
    let next: Vec<i64> = idx
        .iter()
        .zip(e)
        .map(|(j, &c)| j + sign * c as i64)
        .collect();
    if let Some(slot) = grid
        .linear_index(&next)
        .and_then(|lin| grid.interior_slot(lin))
    {
        return (slot as u32, step);
    }
    let d: Vec<f64> = e.iter().map(|&c| sign as f64 * c as f64 / len).collect();
    (BOUNDARY, grid.domain().ray_exit(x, &d).min(step))
}

/// `<D^2u e, e>/|e|^2` at an interior lattice node, with one-sided spacing
/// where the stencil is cut by the boundary.
pub fn second_difference(grid: &Grid, field: &ScalarField, node: usize, e: &[i32]) -> Result<f64> {
    if e.len() != grid.dim() || e.iter().all(|&c| c == 0) {
        return Err(param(
            "direction must be a nonzero lattice vector of the grid dimension",
        ));
    }
    if !field.matches(grid) {
        return Err(param("field does not belong to this grid"));
    }
    if node >= grid.lattice_len() || grid.interior_slot(node).is_none() {
        return Err(Error::Domain(format!(
            "lattice node {node} is not interior"
        )));
    }
    let idx = grid.multi_index(node);
    let x = grid.coords(node);
    let value_at = |slot: u32| {
        if slot == BOUNDARY {
            0.0
        } else {
            field.values()[grid.interior()[slot as usize]]
        }
    };
    let (p, hp) = reach(grid, &idx, &x, e, 1);
    let (m, hm) = reach(grid, &idx, &x, e, -1);
    let (up, um, u0) = (value_at(p), value_at(m), field.values()[node]);
    Ok((up - (1.0 + hp / hm) * u0 + (hp / hm) * um) * 2.0 / (hp * (hp + hm)))
}

/// Wide-stencil discretisation of `P+_1(D^2u) = max_{|e|=1} <D^2u e, e>`
/// over a [`DirectionSet`], with every arm precomputed.
#[derive(Clone, Debug)]
pub struct WideStencil {
    grid: Grid,
    dirs: DirectionSet,
    arms: Vec<Arm>,
}

impl WideStencil {
    pub fn new(grid: Grid, dirs: DirectionSet) -> Result<Self> {
        if grid.dim() != dirs.dim() {
            return Err(param("direction set and grid dimensions differ"));
        }
        let nd = dirs.len();
        let arms: Vec<Arm> = grid
            .interior()
            .par_iter()
            .flat_map_iter(|&lin| {
                let idx = grid.multi_index(lin);
                let x = grid.coords(lin);
                dirs.directions()
                    .iter()
                    .map(|e| {
                        let (p, hp) = reach(&grid, &idx, &x, e, 1);
                        let (m, hm) = reach(&grid, &idx, &x, e, -1);
                        Arm::new(p, m, hp, hm)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        debug_assert_eq!(arms.len(), grid.interior_len() * nd);
        Ok(Self { grid, dirs, arms })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.dirs
    }

    pub fn len(&self) -> usize {
        self.grid.interior_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub(crate) fn arm(&self, node: usize, dir: usize) -> &Arm {
        &self.arms[node * self.dirs.len() + dir]
    }

    #[inline]
    pub(crate) fn node_arms(&self, node: usize) -> &[Arm] {
        let nd = self.dirs.len();
        &self.arms[node * nd..(node + 1) * nd]
    }

    /// Directional second difference at interior slot `node`.
    pub fn directional(&self, u: &[f64], node: usize, dir: usize) -> f64 {
        self.arm(node, dir).eval(u, u[node])
    }

    /// Value and first maximising direction at one node.
    #[inline]
    pub(crate) fn node_max(&self, u: &[f64], node: usize) -> (f64, usize) {
        let center = u[node];
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for (d, arm) in self.node_arms(node).iter().enumerate() {
            let v = arm.eval(u, center);
            if v > best {
                best = v;
                arg = d;
            }
        }
        (best, arg)
    }

    /// `max_e D_e u` at every interior node (`u` holds interior values).
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.len());
        (0..self.len())
            .into_par_iter()
            .map(|i| self.node_max(u, i).0)
            .collect()
    }

    pub fn apply_field(&self, field: &ScalarField) -> ScalarField {
        let u = field.interior_values(&self.grid);
        ScalarField::from_interior(&self.grid, &self.apply(&u))
    }

    /// Largest centre coefficient `2/(h_+ h_-)` over the arms of a node.
    pub(crate) fn center_bound(&self, node: usize) -> f64 {
        self.node_arms(node)
            .iter()
            .fold(0.0, |m, a| m.max(a.c_center))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexDomain;
    use crate::sampling::rng;
    use rand::Rng;

    fn square(h: f64) -> Grid {
        Grid::new(ConvexDomain::cuboid(vec![1.0, 1.0]).unwrap(), h).unwrap()
    }

    #[test]
    fn quadratic_is_differenced_exactly() {
        let grid = square(0.1);
        let f = ScalarField::sample(&grid, |x| 0.5 * (x[0] * x[0] + x[1] * x[1]));
        let centre = grid.nearest_node(&[0.0, 0.0]).unwrap();
        for e in [[1, 0], [0, 1], [1, 1], [2, -1], [3, 1]] {
            let d = second_difference(&grid, &f, centre, &e).unwrap();
            assert!((d - 1.0).abs() < 1e-12, "{e:?}: {d}");
        }
    }

    #[test]
    fn affine_fields_are_annihilated_away_from_the_boundary() {
        let grid = square(0.1);
        let f = ScalarField::sample(&grid, |x| 3.0 * x[0] - 2.0 * x[1] + 0.5);
        let node = grid.nearest_node(&[0.2, -0.3]).unwrap();
        for e in [[1, 0], [1, 2], [-2, 3]] {
            assert!(second_difference(&grid, &f, node, &e).unwrap().abs() < 1e-11);
        }
    }

    #[test]
    fn cut_stencils_use_boundary_zero() {
        // u = (1 - x^2) vanishes on x = +-1; along e1 the one-sided difference
        // stays exact for this quadratic.
        let grid = square(0.3);
        let f = ScalarField::sample(&grid, |x| 1.0 - x[0] * x[0]);
        let node = grid.nearest_node(&[0.9, 0.0]).unwrap();
        let d = second_difference(&grid, &f, node, &[1, 0]).unwrap();
        assert!((d + 2.0).abs() < 1e-12, "{d}");
    }

    #[test]
    fn boundary_nodes_are_rejected() {
        let grid = square(0.25);
        let f = ScalarField::zeros(&grid);
        let node = grid.nearest_node(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            second_difference(&grid, &f, node, &[1, 0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn precomputed_arms_match_geometry() {
        let grid = Grid::new(ConvexDomain::ball(2, 1.0).unwrap(), 0.13).unwrap();
        let dirs = DirectionSet::new(2, 3).unwrap();
        let op = WideStencil::new(grid.clone(), dirs.clone()).unwrap();
        let f = ScalarField::sample(&grid, |x| (x[0] + 0.3).sin() * (2.0 * x[1]).cos());
        let u = f.interior_values(&grid);
        for slot in (0..op.len()).step_by(7) {
            for (d, e) in dirs.directions().iter().enumerate() {
                let a = op.directional(&u, slot, d);
                let b = second_difference(&grid, &f, grid.interior()[slot], e).unwrap();
                assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn operator_on_simple_quadratics() {
        let grid = square(0.05);
        let op = WideStencil::new(grid.clone(), DirectionSet::new(2, 4).unwrap()).unwrap();
        let concave = ScalarField::sample(&grid, |x| -0.5 * (x[0] * x[0] + x[1] * x[1]));
        let saddle = ScalarField::sample(&grid, |x| 0.5 * x[0] * x[0] - x[1] * x[1]);
        let a = op.apply_field(&concave);
        let b = op.apply_field(&saddle);
        let centre = grid.nearest_node(&[0.0, 0.0]).unwrap();
        assert!((a.values()[centre] + 1.0).abs() < 1e-10);
        assert!((b.values()[centre] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn operator_is_monotone_in_neighbours() {
        let grid = Grid::new(ConvexDomain::ball(2, 1.0).unwrap(), 0.1).unwrap();
        let op = WideStencil::new(grid, DirectionSet::new(2, 3).unwrap()).unwrap();
        let mut r = rng(5);
        let u: Vec<f64> = (0..op.len()).map(|_| r.random_range(-1.0..1.0)).collect();
        let base = op.apply(&u);
        for _ in 0..200 {
            let j = r.random_range(0..op.len());
            let mut v = u.clone();
            v[j] += r.random_range(0.0..1.0);
            let after = op.apply(&v);
            for i in 0..op.len() {
                if i != j {
                    assert!(after[i] >= base[i], "node {i} decreased");
                }
            }
        }
    }
}
