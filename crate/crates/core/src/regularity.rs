//! Boundary regularity: covers of convex domains by rotated cubes of side
//! `pi`, the power barrier built from the cube eigenfunction, Hölder exponent
//! measurement and the logarithmic nonnegative supersolution that is not
//! Hölder continuous up to the boundary.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::{unit_cube_eigenpair, EigenPair};
use crate::error::{param, Error, Result};
use crate::geometry::ConvexPolygon;
use crate::matrix_core::{norm, pk_minus, pk_plus, spectrum, SymMatrix};
use crate::pde_solver::{Grid, ScalarField};
use crate::sampling::{rng, unit_vector};

const FIT_TOLERANCE: f64 = 1e-12;

/// Rotated, translated cube `O Q(y) = { O z : z in Q(y) }`, `Q(y)` of side `pi`
/// centred at `y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverCube {
    pub center: Vec<f64>,
    /// Orthogonal matrix, row-major.
    pub rotation: Vec<f64>,
}

impl CoverCube {
    pub fn new(center: Vec<f64>, rotation: Vec<f64>) -> Result<Self> {
        let n = center.len();
        if n == 0 || rotation.len() != n * n {
            return Err(param(
                "rotation must be a square matrix matching the centre",
            ));
        }
        for i in 0..n {
            for j in 0..n {
                let d: f64 = (0..n)
                    .map(|k| rotation[k * n + i] * rotation[k * n + j])
                    .sum();
                let e = if i == j { 1.0 } else { 0.0 };
                if (d - e).abs() > 1e-10 {
                    return Err(param("rotation is not orthogonal"));
                }
            }
        }
        Ok(Self { center, rotation })
    }

    pub fn axis_aligned(center: Vec<f64>) -> Self {
        let n = center.len();
        let mut rotation = vec![0.0; n * n];
        for i in 0..n {
            rotation[i * n + i] = 1.0;
        }
        Self { center, rotation }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Local coordinates `O^T x - y`.
    pub fn local(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|j| (0..n).map(|i| self.rotation[i * n + j] * x[i]).sum::<f64>() - self.center[j])
            .collect()
    }

    /// Signed distance to the cube boundary, positive inside.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        self.local(x)
            .iter()
            .fold(f64::INFINITY, |m, z| m.min(FRAC_PI_2 - z.abs()))
    }

    /// Face planes `(outward normal, offset)` in world coordinates.
    fn faces(&self) -> Vec<(Vec<f64>, f64)> {
        let n = self.dim();
        let mut out = Vec::with_capacity(2 * n);
        for j in 0..n {
            let col: Vec<f64> = (0..n).map(|i| self.rotation[i * n + j]).collect();
            for s in [1.0, -1.0] {
                let nrm: Vec<f64> = col.iter().map(|c| s * c).collect();
                out.push((nrm, s * self.center[j] + FRAC_PI_2));
            }
        }
        out
    }

    fn same_set(&self, other: &Self) -> bool {
        let b = other.faces();
        self.faces().iter().all(|(n, c)| {
            b.iter().any(|(m, d)| {
                (c - d).abs() < 1e-9 && n.iter().zip(m).all(|(x, y)| (x - y).abs() < 1e-9)
            })
        })
    }
}

/// Finite family of cubes whose intersection is the domain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CubeCover {
    cubes: Vec<CoverCube>,
}

impl CubeCover {
    pub fn new(cubes: Vec<CoverCube>) -> Result<Self> {
        let Some(first) = cubes.first() else {
            return Err(param("cover needs at least one cube"));
        };
        let n = first.dim();
        if n < 2 {
            return Err(param("covers are defined for dimension at least two"));
        }
        if cubes.iter().any(|c| c.dim() != n) {
            return Err(param("cubes of a cover must share the dimension"));
        }
        Ok(Self { cubes })
    }

    /// The single cube `(-pi/2, pi/2)^n`.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(vec![CoverCube::axis_aligned(vec![0.0; n])])
    }

    /// One cube per polygon edge, sharing that edge's supporting line, with
    /// coinciding cubes merged. The polygon must fit within width `pi` in the
    /// direction normal to each edge and along it.
    pub fn from_polygon(polygon: &ConvexPolygon) -> Result<Self> {
        let verts = polygon.vertices();
        let mut cubes: Vec<CoverCube> = Vec::new();
        for (nrm, offset) in polygon.faces() {
            let tangent = [-nrm[1], nrm[0]];
            let along: Vec<f64> = verts
                .iter()
                .map(|v| tangent[0] * v[0] + tangent[1] * v[1])
                .collect();
            let across = verts
                .iter()
                .map(|v| offset - (nrm[0] * v[0] + nrm[1] * v[1]))
                .fold(0.0f64, f64::max);
            let lo = along.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = along.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let limit = std::f64::consts::PI * (1.0 + FIT_TOLERANCE);
            if across > limit || hi - lo > limit {
                return Err(Error::Domain(
                    "polygon does not fit in a cube of side pi; rescale it first".into(),
                ));
            }
            // Columns of the rotation are the face normal and its tangent.
            let rotation = vec![nrm[0], tangent[0], nrm[1], tangent[1]];
            let cube = CoverCube {
                center: vec![offset - FRAC_PI_2, 0.5 * (lo + hi)],
                rotation,
            };
            if !cubes.iter().any(|c| c.same_set(&cube)) {
                cubes.push(cube);
            }
        }
        Self::new(cubes)
    }

    /// Cover of the regular polygon with `faces` edges circumscribed about the
    /// disc of the given radius.
    pub fn from_disc(radius: f64, faces: usize) -> Result<Self> {
        if faces < 3 {
            return Err(param("face budget must be at least three"));
        }
        let outer = radius / (std::f64::consts::PI / faces as f64).cos();
        Self::from_polygon(&ConvexPolygon::regular(faces, outer)?)
    }

    pub fn cubes(&self) -> &[CoverCube] {
        &self.cubes
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.cubes[0].dim()
    }

    /// Distance-like margin to the intersection boundary; positive inside.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        self.cubes
            .iter()
            .fold(f64::INFINITY, |m, c| m.min(c.boundary_distance(x)))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.boundary_distance(x) > 0.0
    }

    /// Bounding box of the first cube.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let c = &self.cubes[0];
        let n = c.dim();
        let mid: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| c.rotation[i * n + j] * c.center[j]).sum())
            .collect();
        let ext: Vec<f64> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| c.rotation[i * n + j].abs() * FRAC_PI_2)
                    .sum()
            })
            .collect();
        (
            mid.iter().zip(&ext).map(|(m, e)| m - e).collect(),
            mid.iter().zip(&ext).map(|(m, e)| m + e).collect(),
        )
    }

    /// `count` points of the intersection, by rejection from the bounding box.
    pub fn sample_interior<R: Rng>(&self, rng: &mut R, count: usize) -> Vec<Vec<f64>> {
        let (lo, hi) = self.bounding_box();
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let x: Vec<f64> = lo
                .iter()
                .zip(&hi)
                .map(|(a, b)| rng.random_range(*a..*b))
                .collect();
            if self.contains(&x) {
                out.push(x);
            }
        }
        out
    }
}

/// `(N alpha / beta) * min over the cover of phi_{y,O}^beta`, where
/// `phi(z) = prod_i cos(z_i)^{1/N}` is the eigenfunction of the cube of side `pi`.
#[derive(Clone, Debug)]
pub struct BarrierField {
    cover: CubeCover,
    alpha: f64,
    beta: f64,
    pair: EigenPair,
}

pub fn barrier(cover: &CubeCover, alpha: f64, beta: f64) -> Result<BarrierField> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(param("beta must lie in (0, 1]"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(param("alpha must be positive"));
    }
    Ok(BarrierField {
        cover: cover.clone(),
        alpha,
        beta,
        pair: unit_cube_eigenpair(cover.dim())?,
    })
}

/// Largest violations of the chain of inequalities that makes one cube's
/// barrier a supersolution.
#[derive(Clone, Debug, Serialize)]
pub struct SupersolutionReport {
    pub samples: usize,
    pub cubes: usize,
    /// `max P+_1(D^2 psi) + alpha phi^beta` (must be `<= 0`).
    pub max_residual: f64,
    /// `max P+_1(D^2 psi) - (split bound)` (must be `<= 0`).
    pub max_split_gap: f64,
    /// `max |P-_1(grad phi (x) grad phi)|` (vanishes for `N >= 2`).
    pub max_rank_one_lower: f64,
    /// `max |N alpha phi^{beta-1} P+_1(D^2 phi) + alpha phi^beta|`.
    pub max_eigen_gap: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HolderBoundReport {
    pub exponent: f64,
    pub bound: f64,
    pub max_quotient: f64,
    pub pairs: usize,
    pub holds: bool,
}

impl BarrierField {
    pub fn dim(&self) -> usize {
        self.cover.dim()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn cover(&self) -> &CubeCover {
        &self.cover
    }

    fn scale(&self) -> f64 {
        self.dim() as f64 * self.alpha / self.beta
    }

    /// `phi_{y,O}(x)`, zero outside the cube.
    pub fn cube_eigenfunction(&self, cube: &CoverCube, x: &[f64]) -> f64 {
        self.pair.value(&cube.local(x))
    }

    /// `min over the cover of phi_{y,O}(x)`.
    pub fn inf_eigenfunction(&self, x: &[f64]) -> f64 {
        self.cover
            .cubes
            .iter()
            .fold(f64::INFINITY, |m, c| m.min(self.cube_eigenfunction(c, x)))
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.scale() * self.inf_eigenfunction(x).powf(self.beta)
    }

    /// Hölder exponent `beta / N` of the barrier.
    pub fn holder_exponent(&self) -> f64 {
        self.beta / self.dim() as f64
    }

    /// `(N alpha / beta) N^{beta / 2N}`.
    pub fn holder_bound(&self) -> f64 {
        let n = self.dim() as f64;
        self.scale() * n.powf(self.beta / (2.0 * n))
    }

    /// Checks the per-cube supersolution chain at `points` for every cube,
    /// using exact gradients and Hessians of the cube eigenfunction.
    pub fn supersolution_check(&self, points: &[Vec<f64>]) -> Result<SupersolutionReport> {
        let n = self.dim();
        let (a, b) = (self.alpha, self.beta);
        let na = n as f64 * a;
        let rows: Vec<[f64; 4]> = points
            .par_iter()
            .map(|x| -> Result<[f64; 4]> {
                let mut worst = [f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0f64, 0.0f64];
                for cube in &self.cover.cubes {
                    let z = cube.local(x);
                    let phi = self.pair.value(&z);
                    if !(phi > 0.0) {
                        return Err(Error::Domain(
                            "sample point is not inside every cube".into(),
                        ));
                    }
                    let g_local = self.pair.gradient(&z)?;
                    let grad: Vec<f64> = (0..n)
                        .map(|i| (0..n).map(|j| cube.rotation[i * n + j] * g_local[j]).sum())
                        .collect();
                    let hess = self.pair.hessian(&z)?.conjugate(&cube.rotation);
                    let rank_one = SymMatrix::outer(&grad);
                    let psi_hess = rank_one
                        .scaled(na * (b - 1.0) * phi.powf(b - 2.0))
                        .add(&hess.scaled(na * phi.powf(b - 1.0)));
                    let lhs = pk_plus(&psi_hess, 1)?;
                    let lower = pk_minus(&rank_one, 1)?;
                    let top = pk_plus(&hess, 1)?;
                    let split =
                        na * (b - 1.0) * phi.powf(b - 2.0) * lower + na * phi.powf(b - 1.0) * top;
                    let target = -a * phi.powf(b);
                    let unit = na * phi.powf(b - 1.0) * spectrum(&hess).norm().max(1.0)
                        + na * phi.powf(b - 2.0) * rank_one.max_abs();
                    let tol = 1e-12 * unit.max(1.0);
                    worst[0] = worst[0].max(lhs - target - tol);
                    worst[1] = worst[1].max(lhs - split - tol);
                    worst[2] = worst[2].max(lower.abs());
                    worst[3] =
                        worst[3].max((na * phi.powf(b - 1.0) * top - target).abs() / unit.max(1.0));
                }
                Ok(worst)
            })
            .collect::<Result<Vec<_>>>()?;
        let fold = |k: usize, init: f64| rows.iter().fold(init, |m, r| m.max(r[k]));
        let max_residual = fold(0, f64::NEG_INFINITY);
        let max_split_gap = fold(1, f64::NEG_INFINITY);
        let max_rank_one_lower = fold(2, 0.0);
        let max_eigen_gap = fold(3, 0.0);
        Ok(SupersolutionReport {
            samples: points.len(),
            cubes: self.cover.len(),
            max_residual,
            max_split_gap,
            max_rank_one_lower,
            max_eigen_gap,
            holds: max_residual <= 0.0
                && max_split_gap <= 0.0
                && max_rank_one_lower <= 1e-12
                && max_eigen_gap <= 1e-10,
        })
    }

    /// Largest `|u(x) - u(z)| / |x - z|^{beta/N}` over the given pairs.
    pub fn holder_bound_check(&self, pairs: &[(Vec<f64>, Vec<f64>)]) -> HolderBoundReport {
        let e = self.holder_exponent();
        let max_quotient = pairs
            .par_iter()
            .map(|(x, z)| {
                let d = norm(&x.iter().zip(z).map(|(a, b)| a - b).collect::<Vec<_>>());
                if d == 0.0 {
                    0.0
                } else {
                    (self.value(x) - self.value(z)).abs() / d.powf(e)
                }
            })
            .reduce(|| 0.0, f64::max);
        let bound = self.holder_bound();
        HolderBoundReport {
            exponent: e,
            bound,
            max_quotient,
            pairs: pairs.len(),
            holds: max_quotient <= bound,
        }
    }
}

/// Random pairs in the closure of the cover, mixing far pairs, close pairs
/// and pairs with one point pushed onto the boundary.
pub fn sample_pairs(cover: &CubeCover, count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut r = rng(seed);
    let n = cover.dim();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = cover.sample_interior(&mut r, 1).remove(0);
        let z = match out.len() % 3 {
            0 => cover.sample_interior(&mut r, 1).remove(0),
            1 => {
                let d = unit_vector(&mut r, n);
                let t = 10f64.powf(r.random_range(-8.0..0.0));
                let z: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
                if !cover.contains(&z) {
                    continue;
                }
                z
            }
            _ => {
                // Walk to the boundary along a random ray.
                let d = unit_vector(&mut r, n);
                let (mut lo, mut hi) = (0.0, 2.0 * std::f64::consts::PI);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let p: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + mid * b).collect();
                    if cover.contains(&p) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                x.iter().zip(&d).map(|(a, b)| a + lo * b).collect()
            }
        };
        out.push((x, z));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub samples: usize,
    /// `min f(x) + alpha (inf phi(x))^beta`; the condition holds iff it is `>= 0`.
    pub min_margin: f64,
    pub argmin: Vec<f64>,
    pub holds: bool,
}

/// Tests `f(x) >= -alpha (inf phi(x))^beta` at `points`.
pub fn holder_condition_check(
    f: impl Fn(&[f64]) -> f64 + Sync,
    cover: &CubeCover,
    alpha: f64,
    beta: f64,
    points: &[Vec<f64>],
) -> Result<ConditionReport> {
    let field = barrier(cover, alpha, beta)?;
    if points.is_empty() {
        return Err(param("no sample points"));
    }
    let (min_margin, idx) = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| (f(x) + alpha * field.inf_eigenfunction(x).powf(beta), i))
        .reduce(
            || (f64::INFINITY, usize::MAX),
            |a, b| {
                if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    Ok(ConditionReport {
        samples: points.len(),
        min_margin,
        argmin: points[idx].clone(),
        holds: min_margin >= 0.0,
    })
}

/// Interior samples of a cover together with points approaching the
/// boundary at distances `10^-1 .. 10^-8`.
pub fn condition_samples(cover: &CubeCover, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    let mut pts = cover.sample_interior(&mut r, count);
    for (x, z) in sample_pairs(cover, count.max(3), seed ^ 0x5eed)
        .into_iter()
        .skip(2)
        .step_by(3)
    {
        let dir: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a - b).collect();
        let len = norm(&dir);
        if len == 0.0 {
            continue;
        }
        for k in 1..=8 {
            let t = 10f64.powi(-k);
            if t < len {
                pts.push(z.iter().zip(&dir).map(|(b, d)| b + t * d / len).collect());
            }
        }
    }
    pts
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub samples: usize,
}

/// Least-squares slope of `log u` against `log d` for `(d, u)` samples.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(d, u)| *d > 0.0 && *u > 0.0)
        .map(|(d, u)| (d.ln(), u.ln()))
        .collect();
    if pts.len() < 5 {
        return Err(param(
            "need at least five positive samples for an exponent fit",
        ));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(param("distances must not all coincide"));
    }
    let slope = sxy / sxx;
    Ok(ExponentFit {
        exponent: slope,
        prefactor: (my - slope * mx).exp(),
        samples: pts.len(),
    })
}

/// Exponent of `u` along the inward normal from the face point `base`, using
/// `count` log-spaced distances in `(min_distance, window)`.
pub fn holder_exponent_fit(
    u: impl Fn(&[f64]) -> f64,
    base: &[f64],
    inward: &[f64],
    min_distance: f64,
    window: f64,
    count: usize,
) -> Result<ExponentFit> {
    let len = norm(inward);
    if !(len > 0.0) || inward.len() != base.len() {
        return Err(param(
            "inward normal must be a nonzero vector of the base dimension",
        ));
    }
    if !(min_distance > 0.0 && window > min_distance) {
        return Err(param("window must exceed the minimum distance"));
    }
    if count < 5 {
        return Err(param("need at least five samples in the window"));
    }
    let (a, b) = (min_distance.ln(), window.ln());
    let samples: Vec<(f64, f64)> = (1..=count)
        .map(|i| {
            let d = (a + (b - a) * i as f64 / (count + 1) as f64).exp();
            let x: Vec<f64> = base
                .iter()
                .zip(inward)
                .map(|(p, v)| p + d * v / len)
                .collect();
            (d, u(&x))
        })
        .collect();
    fit_power_law(&samples)
}

/// Grid version: lattice nodes on the axis line through `base` (a boundary
/// point) in direction `axis` (`+-1`), at distances in `(h, window)`.
pub fn holder_exponent_fit_field(
    grid: &Grid,
    field: &ScalarField,
    base: &[f64],
    axis: usize,
    inward_sign: f64,
    window: f64,
) -> Result<ExponentFit> {
    if !field.matches(grid) {
        return Err(param("field does not belong to this grid"));
    }
    if axis >= grid.dim() || inward_sign.abs() != 1.0 {
        return Err(param("axis out of range or sign not +-1"));
    }
    let h = grid.h();
    let mut samples = Vec::new();
    for k in 2.. {
        let d = k as f64 * h;
        if d >= window * (1.0 - 1e-12) {
            break;
        }
        let mut x = base.to_vec();
        x[axis] += inward_sign * d;
        if let Some(lin) = grid.nearest_node(&x) {
            let c = grid.coords(lin);
            if norm(&c.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-9 * h {
                samples.push((d, field.values()[lin]));
            }
        }
    }
    fit_power_law(&samples)
}

/// `u(x) = 1 / (sigma - sum_i log cos x_i)` on `(-pi/2, pi/2)^n`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LogSupersolution {
    pub dim: usize,
    pub sigma: f64,
}

impl LogSupersolution {
    pub fn new(dim: usize, sigma: f64) -> Result<Self> {
        if dim == 0 {
            return Err(param("dimension must be positive"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(param("sigma must be positive"));
        }
        Ok(Self { dim, sigma })
    }

    fn log_sum(x: &[f64]) -> Option<f64> {
        let mut v = 0.0;
        for xi in x {
            let c = xi.cos();
            if !(xi.abs() < FRAC_PI_2 && c > 0.0) {
                return None;
            }
            v += c.ln();
        }
        Some(v)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        Self::log_sum(x).map_or(0.0, |v| 1.0 / (self.sigma - v))
    }

    /// Value at distance `d` from the face `x_1 = pi/2` on the first axis,
    /// computed without cancellation.
    pub fn value_near_face(&self, d: f64) -> f64 {
        1.0 / (self.sigma - d.sin().ln())
    }

    pub fn hessian(&self, x: &[f64]) -> Result<SymMatrix> {
        let v = Self::log_sum(x).ok_or_else(|| Error::Domain("point outside the cube".into()))?;
        let s = self.sigma - v;
        let grad: Vec<f64> = x.iter().map(|xi| -xi.tan()).collect();
        let g2: Vec<f64> = x.iter().map(|xi| -1.0 / xi.cos().powi(2)).collect();
        let s3 = s * s * s;
        Ok(SymMatrix::from_fn(x.len(), |i, j| {
            let diag = if i == j { s * g2[i] } else { 0.0 };
            (2.0 * grad[i] * grad[j] + diag) / s3
        }))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientSeries {
    pub gamma: f64,
    pub distances: Vec<f64>,
    pub quotients: Vec<f64>,
    pub increasing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RemarkReport {
    pub dim: usize,
    pub sigma: f64,
    pub value_at_origin: f64,
    pub samples: usize,
    pub directions: usize,
    /// Largest `<D^2u w, w>` over sampled points and unit directions.
    pub max_form: f64,
    pub argmax: Vec<f64>,
    /// Largest Hessian eigenvalue over the sampled points.
    pub max_eigenvalue: f64,
    pub concave: bool,
    pub quotients: Vec<QuotientSeries>,
}

pub const REMARK_GAMMAS: [f64; 3] = [0.5, 0.25, 0.1];
pub const REMARK_DISTANCES: [f64; 3] = [1e-4, 1e-8, 1e-12];

/// Samples the Hessian form of [`LogSupersolution`] and its Hölder quotients
/// `u(x) / d^gamma` at distance `d` from a face.
pub fn remark_counterexample(
    dim: usize,
    sigma: f64,
    samples: usize,
    directions: usize,
    seed: u64,
) -> Result<RemarkReport> {
    let u = LogSupersolution::new(dim, sigma)?;
    if samples == 0 || directions == 0 {
        return Err(param("need at least one sample and one direction"));
    }
    let mut r = rng(seed);
    let dirs: Vec<Vec<f64>> = (0..directions).map(|_| unit_vector(&mut r, dim)).collect();
    let points: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            (0..dim)
                .map(|_| r.random_range(-FRAC_PI_2..FRAC_PI_2))
                .collect()
        })
        .collect();
    let rows: Vec<(f64, f64)> = points
        .par_iter()
        .map(|x| {
            let hess = u.hessian(x)?;
            let form = dirs
                .iter()
                .map(|w| hess.quadratic_form(w))
                .fold(f64::NEG_INFINITY, f64::max);
            Ok((form, pk_plus(&hess, 1)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut max_form, mut arg) = (f64::NEG_INFINITY, 0);
    for (i, (f, _)) in rows.iter().enumerate() {
        if *f > max_form {
            max_form = *f;
            arg = i;
        }
    }
    let max_eigenvalue = rows.iter().fold(f64::NEG_INFINITY, |m, r| m.max(r.1));
    let quotients = REMARK_GAMMAS
        .iter()
        .map(|&gamma| {
            let q: Vec<f64> = REMARK_DISTANCES
                .iter()
                .map(|&d| u.value_near_face(d) / d.powf(gamma))
                .collect();
            QuotientSeries {
                gamma,
                distances: REMARK_DISTANCES.to_vec(),
                increasing: q.windows(2).all(|w| w[1] > w[0]),
                quotients: q,
            }
        })
        .collect();
    Ok(RemarkReport {
        dim,
        sigma,
        value_at_origin: u.value(&vec![0.0; dim]),
        samples,
        directions,
        max_form,
        argmax: points[arg].clone(),
        max_eigenvalue,
        concave: max_form <= 1e-8,
        quotients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn scaled_polygon(v: Vec<[f64; 2]>, s: f64) -> ConvexPolygon {
        ConvexPolygon::new(v.into_iter().map(|p| [s * p[0], s * p[1]]).collect()).unwrap()
    }

    #[test]
    fn square_cover_is_one_cube() {
        let h = FRAC_PI_2;
        let sq = ConvexPolygon::new(vec![[-h, -h], [h, -h], [h, h], [-h, h]]).unwrap();
        let cover = CubeCover::from_polygon(&sq).unwrap();
        assert_eq!(cover.len(), 1);
        assert!(cover.cubes()[0].same_set(&CoverCube::axis_aligned(vec![0.0, 0.0])));
    }

    #[test]
    fn rectangle_and_hexagon_covers() {
        let rect = scaled_polygon(
            vec![[-1.0, -0.5], [1.0, -0.5], [1.0, 0.5], [-1.0, 0.5]],
            1.4,
        );
        assert_eq!(CubeCover::from_polygon(&rect).unwrap().len(), 4);
        let hex = ConvexPolygon::regular(6, 1.5).unwrap();
        let cover = CubeCover::from_polygon(&hex).unwrap();
        assert_eq!(cover.len(), 6);
        for v in hex.vertices() {
            for c in cover.cubes() {
                assert!(c.boundary_distance(v) > -1e-12);
            }
        }
        let big = ConvexPolygon::regular(6, 2.0).unwrap();
        assert!(matches!(
            CubeCover::from_polygon(&big),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn disc_cover_contains_the_disc() {
        let cover = CubeCover::from_disc(1.2, 16).unwrap();
        assert_eq!(cover.len(), 16);
        for i in 0..360 {
            let t = (i as f64).to_radians();
            assert!(cover.boundary_distance(&[1.2 * t.cos(), 1.2 * t.sin()]) > -1e-12);
        }
        assert!(CubeCover::from_disc(1.2, 2).is_err());
    }

    #[test]
    fn beta_range_is_enforced() {
        let c = CubeCover::unit(2).unwrap();
        assert!(barrier(&c, 1.0, 0.0).is_err());
        assert!(barrier(&c, 1.0, 1.5).is_err());
        assert!(barrier(&c, 1.0, 1.0).is_ok());
    }

    #[test]
    fn linear_barrier_on_unit_cube() {
        let c = CubeCover::unit(2).unwrap();
        let b = barrier(&c, 0.7, 1.0).unwrap();
        let x = [0.3, -0.2];
        let phi = (0.3f64.cos() * 0.2f64.cos()).sqrt();
        assert!((b.value(&x) - 2.0 * 0.7 * phi).abs() < 1e-15);
        let pts = c.sample_interior(&mut rng(1), 1000);
        assert!(b.supersolution_check(&pts).unwrap().holds);
    }

    #[test]
    fn power_law_fit_recovers_exact_exponents() {
        let s: Vec<(f64, f64)> = (1..10)
            .map(|i| (i as f64 * 0.01, 3.0 * (i as f64 * 0.01)))
            .collect();
        let fit = fit_power_law(&s).unwrap();
        assert!((fit.exponent - 1.0).abs() < 1e-12);
        assert!((fit.prefactor - 3.0).abs() < 1e-10);
        assert!(fit_power_law(&s[..4]).is_err());
    }

    #[test]
    fn log_supersolution_basics() {
        for n in 1..=3 {
            let u = LogSupersolution::new(n, 2.0 * n as f64).unwrap();
            assert!((u.value(&vec![0.0; n]) - 0.5 / n as f64).abs() < 1e-15);
            let mut x = vec![0.0; n];
            x[0] = FRAC_PI_2;
            assert_eq!(u.value(&x), 0.0);
        }
        let u = LogSupersolution::new(1, 2.0).unwrap();
        let near = u.value_near_face(1e-6 * PI);
        assert!((near - 1.0 / (2.0 - (1e-6 * PI).sin().ln())).abs() < 1e-15);
    }
}
