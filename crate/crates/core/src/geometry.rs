//! Convex domains with exact boundary distances and ray exits.

use serde::Serialize;

use crate::error::{param, Result};
use crate::matrix_core::{dot, norm};

/// Convex polygon with counter-clockwise vertices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexPolygon {
    vertices: Vec<[f64; 2]>,
    /// Outward unit normal and offset of each edge: `n . x <= b` inside.
    faces: Vec<([f64; 2], f64)>,
}

impl ConvexPolygon {
    /// Accepts vertices in either orientation; rejects non-convex or
    /// degenerate input.
    pub fn new(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(param("polygon needs at least three vertices"));
        }
        let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
            (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
        };
        let turns: Vec<f64> = (0..n)
            .map(|i| cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]))
            .collect();
        let scale = vertices
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()))
            .max(1.0);
        let eps = 1e-12 * scale * scale;
        let positive = turns.iter().all(|t| *t > eps);
        let negative = turns.iter().all(|t| *t < -eps);
        if !positive && !negative {
            return Err(param("polygon is not strictly convex at every vertex"));
        }
        // Winding number must be one (rules out star polygons).
        let total_angle: f64 = (0..n)
            .map(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let c = vertices[(i + 2) % n];
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - b[0], c[1] - b[1]];
                (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1])
            })
            .sum();
        if (total_angle.abs() - 2.0 * std::f64::consts::PI).abs() > 1e-6 {
            return Err(param("polygon winds more than once"));
        }
        if negative {
            vertices.reverse();
        }
        let faces = (0..n)
            .map(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let len = (dx * dx + dy * dy).sqrt();
                let nrm = [dy / len, -dx / len];
                (nrm, nrm[0] * a[0] + nrm[1] * a[1])
            })
            .collect();
        Ok(Self { vertices, faces })
    }

    /// Regular polygon with `sides` vertices on the circle of radius `radius`.
    pub fn regular(sides: usize, radius: f64) -> Result<Self> {
        let v = (0..sides)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / sides as f64;
                [radius * t.cos(), radius * t.sin()]
            })
            .collect();
        Self::new(v)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// `(outward normal, offset)` per edge.
    pub fn faces(&self) -> &[([f64; 2], f64)] {
        &self.faces
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                d = d.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
            }
        }
        d
    }
}

/// Bounded convex domain used by the grid solver and the regularity layer.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexDomain {
    /// `prod_i (-half_i, half_i)`.
    Box {
        half: Vec<f64>,
    },
    /// Ball of the given radius centred at the origin.
    Ball {
        dim: usize,
        radius: f64,
    },
    Polygon(ConvexPolygon),
}

impl ConvexDomain {
    pub fn cuboid(half: Vec<f64>) -> Result<Self> {
        if half.is_empty() || half.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(param("box half widths must be positive"));
        }
        Ok(Self::Box { half })
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 || !(radius > 0.0 && radius.is_finite()) {
            return Err(param("ball needs a positive dimension and radius"));
        }
        Ok(Self::Ball { dim, radius })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Box { half } => half.len(),
            Self::Ball { dim, .. } => *dim,
            Self::Polygon(_) => 2,
        }
    }

    /// Euclidean distance to the boundary for interior points; nonpositive
    /// outside.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        match self {
            Self::Box { half } => x
                .iter()
                .zip(half)
                .map(|(xi, h)| h - xi.abs())
                .fold(f64::INFINITY, f64::min),
            Self::Ball { radius, .. } => radius - norm(x),
            Self::Polygon(p) => p
                .faces
                .iter()
                .map(|(n, b)| b - (n[0] * x[0] + n[1] * x[1]))
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.boundary_distance(x) > 0.0
    }

    /// Distance from interior `x` to the boundary along unit direction `d`.
    pub fn ray_exit(&self, x: &[f64], d: &[f64]) -> f64 {
        match self {
            Self::Box { half } => x
                .iter()
                .zip(d)
                .zip(half)
                .filter(|((_, di), _)| **di != 0.0)
                .map(|((xi, di), h)| (h * di.signum() - xi) / di)
                .fold(f64::INFINITY, f64::min),
            Self::Ball { radius, .. } => {
                // |x + t d|^2 = r^2, positive root.
                let b = dot(x, d);
                let c = dot(x, x) - radius * radius;
                let disc = (b * b - c).max(0.0).sqrt();
                // c < 0 inside; the stable form avoids cancellation.
                if b >= 0.0 {
                    -c / (b + disc)
                } else {
                    disc - b
                }
            }
            Self::Polygon(p) => p
                .faces
                .iter()
                .filter_map(|(n, b)| {
                    let nd = n[0] * d[0] + n[1] * d[1];
                    (nd > 0.0).then(|| (b - (n[0] * x[0] + n[1] * x[1])) / nd)
                })
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Self::Box { half } => (half.iter().map(|h| -h).collect(), half.clone()),
            Self::Ball { dim, radius } => (vec![-radius; *dim], vec![*radius; *dim]),
            Self::Polygon(p) => {
                let mut lo = vec![f64::INFINITY; 2];
                let mut hi = vec![f64::NEG_INFINITY; 2];
                for v in &p.vertices {
                    for i in 0..2 {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_orientation_and_convexity() {
        let cw = vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        let p = ConvexPolygon::new(cw).unwrap();
        assert_eq!(p.vertices()[1], [1.0, 1.0]);
        let dart = vec![[0.0, 0.0], [2.0, 1.0], [0.0, 2.0], [0.5, 1.0]];
        assert!(ConvexPolygon::new(dart).is_err());
        let star: Vec<[f64; 2]> = (0..5)
            .map(|i| {
                let t = 4.0 * std::f64::consts::PI * i as f64 / 5.0;
                [t.cos(), t.sin()]
            })
            .collect();
        assert!(ConvexPolygon::new(star).is_err());
    }

    #[test]
    fn ray_exits() {
        let b = ConvexDomain::cuboid(vec![1.0, 2.0]).unwrap();
        assert!((b.ray_exit(&[0.0, 0.0], &[1.0, 0.0]) - 1.0).abs() < 1e-15);
        let s = 0.5f64.sqrt();
        assert!((b.ray_exit(&[0.5, 0.0], &[s, s]) - 0.5 / s).abs() < 1e-15);
        let ball = ConvexDomain::ball(2, 1.0).unwrap();
        assert!((ball.ray_exit(&[0.5, 0.0], &[-1.0, 0.0]) - 1.5).abs() < 1e-15);
        assert!((ball.ray_exit(&[0.5, 0.0], &[1.0, 0.0]) - 0.5).abs() < 1e-15);
        let sq = ConvexDomain::Polygon(
            ConvexPolygon::new(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]).unwrap(),
        );
        assert!((sq.ray_exit(&[0.0, 0.5], &[0.0, 1.0]) - 0.5).abs() < 1e-15);
        assert!((sq.boundary_distance(&[0.0, 0.5]) - 0.5).abs() < 1e-15);
    }
}
