use serde::Serialize;

use crate::error::{param, Result};

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Primitive lattice directions with max-norm `<= order`, one per antipodal
/// pair. Ordered by length, then lexicographically, so the axes come first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectionSet {
    dim: usize,
    order: u32,
    directions: Vec<Vec<i32>>,
}

impl DirectionSet {
    pub fn new(dim: usize, order: u32) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(param(format!(
                "direction sets exist for dimension 2 or 3, got {dim}"
            )));
        }
        if order == 0 {
            return Err(param("stencil order must be positive"));
        }
        let r = order as i32;
        let mut directions = Vec::new();
        let mut e = vec![-r; dim];
        loop {
            let g = e.iter().fold(0i64, |g, &c| gcd(g, c as i64));
            let first_nonzero = e.iter().find(|&&c| c != 0).copied().unwrap_or(0);
            if g == 1 && first_nonzero > 0 {
                directions.push(e.clone());
            }
            let mut d = dim;
            loop {
                if d == 0 {
                    directions.sort_by_key(|v| (v.iter().map(|c| c * c).sum::<i32>(), v.clone()));
                    return Ok(Self {
                        dim,
                        order,
                        directions,
                    });
                }
                d -= 1;
                e[d] += 1;
                if e[d] <= r {
                    break;
                }
                e[d] = -r;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Vec<i32>] {
        &self.directions
    }

    pub fn unit(&self, i: usize) -> Vec<f64> {
        let e = &self.directions[i];
        let n = (e.iter().map(|c| (c * c) as f64).sum::<f64>()).sqrt();
        e.iter().map(|&c| c as f64 / n).collect()
    }

    /// Covering radius in radians: the largest angle between a unit vector
    /// and the nearest line spanned by a direction. Exact in 2D, estimated
    /// on a Fibonacci sphere of 4000 points in 3D.
    pub fn angular_resolution(&self) -> f64 {
        let units: Vec<Vec<f64>> = (0..self.len()).map(|i| self.unit(i)).collect();
        if self.dim == 2 {
            let mut angles: Vec<f64> = units
                .iter()
                .map(|u| u[1].atan2(u[0]).rem_euclid(std::f64::consts::PI))
                .collect();
            angles.sort_by(f64::total_cmp);
            let mut gap = angles[0] + std::f64::consts::PI - angles[angles.len() - 1];
            for w in angles.windows(2) {
                gap = gap.max(w[1] - w[0]);
            }
            return gap / 2.0;
        }
        let samples = 4000;
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..samples)
            .map(|i| {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / samples as f64;
                let r = (1.0 - z * z).sqrt();
                let t = golden * i as f64;
                let p = [r * t.cos(), r * t.sin(), z];
                let best = units
                    .iter()
                    .map(|u| (u[0] * p[0] + u[1] * p[1] + u[2] * p[2]).abs())
                    .fold(0.0f64, f64::max);
                best.min(1.0).acos()
            })
            .fold(0.0, f64::max)
    }
}
