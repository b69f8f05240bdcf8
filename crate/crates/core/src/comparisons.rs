//! Domain comparisons for the principal eigenvalue of `P+_1`: rectangles of
//! equal measure against the cube, the ball against the cube, and translated
//! intersections of rectangles.

use std::f64::consts::PI;

use serde::Serialize;

use crate::closed_form::{ball_eigenpair, cube_eigenpair, rect_eigenpair, BoxSpec};
use crate::error::{param, Result};

/// Relative tolerance under which two eigenvalues (or anisotropy entries)
/// count as equal.
pub const EQUALITY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct FkReport {
    pub alpha: Vec<f64>,
    pub half_width: f64,
    pub mu_rect: f64,
    pub mu_cube: f64,
    /// Harmonic and geometric means of the `alpha_i^2`.
    pub harmonic_mean: f64,
    pub geometric_mean: f64,
    pub is_equality: bool,
    /// `mu_rect <= mu_cube`, strict unless the rectangle is the cube.
    pub holds: bool,
}

/// Compares `Rect(alpha)` against the cube of equal measure (`prod alpha_i = 1`).
pub fn fk_check(alpha: &[f64], half_width: f64) -> Result<FkReport> {
    let n = alpha.len();
    if n < 2 {
        return Err(param("need at least two anisotropy entries"));
    }
    let spec = BoxSpec::new(half_width, alpha.to_vec())?;
    let log_prod: f64 = alpha.iter().map(|a| a.ln()).sum();
    if log_prod.abs() > 1e-10 {
        return Err(param(format!(
            "anisotropy must be measure-normalised (prod alpha = 1), got prod = {}",
            log_prod.exp()
        )));
    }
    let mu_rect = rect_eigenpair(&spec)?.mu;
    let mu_cube = cube_eigenpair(n, half_width)?.mu;

    let squares: Vec<f64> = alpha.iter().map(|a| a * a).collect();
    let harmonic_mean = n as f64 / squares.iter().map(|s| 1.0 / s).sum::<f64>();
    let geometric_mean = (squares.iter().map(|s| s.ln()).sum::<f64>() / n as f64).exp();

    let (lo, hi) = alpha.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &a| {
        (lo.min(a), hi.max(a))
    });
    let is_equality = hi - lo <= EQUALITY_TOLERANCE * hi;
    let gap = mu_cube - mu_rect;
    let holds = if is_equality {
        gap.abs() <= EQUALITY_TOLERANCE * mu_cube
    } else {
        gap > EQUALITY_TOLERANCE * mu_cube
    } && harmonic_mean <= geometric_mean * (1.0 + EQUALITY_TOLERANCE);

    Ok(FkReport {
        alpha: alpha.to_vec(),
        half_width,
        mu_rect,
        mu_cube,
        harmonic_mean,
        geometric_mean,
        is_equality,
        holds,
    })
}

/// Rescales positive `alpha` so that `prod alpha_i = 1`.
pub fn normalize_measure(alpha: &[f64]) -> Vec<f64> {
    let mean_log = alpha.iter().map(|a| a.ln()).sum::<f64>() / alpha.len() as f64;
    alpha.iter().map(|a| (a.ln() - mean_log).exp()).collect()
}

/// Volume of the unit ball in `R^n`: `omega_n = (2 pi / n) omega_{n-2}`.
pub fn unit_ball_volume(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(param("unit ball volume needs n >= 1"));
    }
    let (mut even, mut odd) = (1.0, 2.0);
    let mut d = if n % 2 == 0 { 0 } else { 1 };
    while d < n {
        d += 2;
        if d % 2 == 0 {
            even *= 2.0 * PI / d as f64;
        } else {
            odd *= 2.0 * PI / d as f64;
        }
    }
    Ok(if n % 2 == 0 { even } else { odd })
}

#[derive(Clone, Debug, Serialize)]
pub struct Fk2Report {
    pub n: usize,
    pub half_width: f64,
    /// Radius of the ball with the cube's measure, `2R omega_n^{-1/n}`.
    pub rho: f64,
    pub ball_measure: f64,
    pub cube_measure: f64,
    pub mu_ball: f64,
    pub mu_cube: f64,
    /// `n omega_n^{2/n} / 4`.
    pub ratio: f64,
    pub holds: bool,
}

/// Ball against cube of equal measure.
pub fn fk2_check(n: usize, half_width: f64) -> Result<Fk2Report> {
    if n < 2 {
        return Err(param("FK2 comparison needs n >= 2"));
    }
    let omega = unit_ball_volume(n)?;
    let nf = n as f64;
    let rho = 2.0 * half_width * omega.powf(-1.0 / nf);
    let mu_ball = ball_eigenpair(n, 1, rho)?.mu;
    let mu_cube = cube_eigenpair(n, half_width)?.mu;
    let ratio = nf * omega.powf(2.0 / nf) / 4.0;
    Ok(Fk2Report {
        n,
        half_width,
        rho,
        ball_measure: omega * rho.powi(n as i32),
        cube_measure: (2.0 * half_width).powi(n as i32),
        mu_ball,
        mu_cube,
        ratio,
        holds: ratio > 1.0 && mu_ball > mu_cube,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LiebReport {
    pub dim: usize,
    pub alpha: Vec<f64>,
    pub half_width: f64,
    /// `inf_x mu(A cap (B + x))`.
    pub mu_intersection_inf: f64,
    pub mu_a: f64,
    pub mu_b: f64,
    /// Normalised sign quantity of the reversal condition; positive iff reversed.
    pub margin: f64,
    pub reversed: bool,
}

/// Principal eigenvalue of `P+_1` on a box with half side lengths `half`.
pub fn box_eigenvalue(half: &[f64]) -> f64 {
    (PI / 2.0).powi(2) / half.iter().map(|h| h * h).sum::<f64>()
}

/// `A = Rect((a1, a2))`, `B = Rect((a2, a1))` in the plane.
pub fn lieb_reversal_2d(a1: f64, a2: f64, half_width: f64) -> Result<LiebReport> {
    if a1 > a2 {
        return Err(param(format!(
            "expected a1 <= a2, got a1 = {a1}, a2 = {a2}"
        )));
    }
    BoxSpec::new(half_width, vec![a1, a2])?;
    let c2 = (PI / (2.0 * half_width)).powi(2);
    let (s1, s2) = (a1 * a1, a2 * a2);
    let mu_intersection_inf = s2 / 2.0 * c2;
    let mu_a = s1 * s2 / (s1 + s2) * c2;
    let margin = (s2 - 3.0 * s1) / s2;
    Ok(LiebReport {
        dim: 2,
        alpha: vec![a1, a2],
        half_width,
        mu_intersection_inf,
        mu_a,
        mu_b: mu_a,
        margin,
        reversed: margin > EQUALITY_TOLERANCE,
    })
}

/// `A = Rect(alpha)`, `B = Rect(alpha with the first two entries swapped)`,
/// `alpha` ascending, `N >= 3`.
pub fn lieb_reversal_nd(alpha: &[f64], half_width: f64) -> Result<LiebReport> {
    let n = alpha.len();
    if n < 3 {
        return Err(param("higher-dimensional reversal needs N >= 3"));
    }
    if alpha.windows(2).any(|w| w[0] > w[1]) {
        return Err(param("anisotropy must be sorted ascending"));
    }
    let spec = BoxSpec::new(half_width, alpha.to_vec())?;
    let c2 = (PI / (2.0 * half_width)).powi(2);
    let inv = |a: f64| 1.0 / (a * a);
    let tail: f64 = alpha[2..].iter().map(|&a| inv(a)).sum();
    let mu_intersection_inf = c2 / (2.0 * inv(alpha[1]) + tail);
    let mu_a = rect_eigenpair(&spec)?.mu;
    let lhs = inv(alpha[0]);
    let rhs = 3.0 * inv(alpha[1]) + tail;
    let margin = (lhs - rhs) / lhs;
    Ok(LiebReport {
        dim: n,
        alpha: alpha.to_vec(),
        half_width,
        mu_intersection_inf,
        mu_a,
        mu_b: mu_a,
        margin,
        reversed: margin > EQUALITY_TOLERANCE,
    })
}

/// Grid search of `inf_x mu(A cap (B + x))` for centred boxes with half side
/// lengths `half_a`, `half_b`. Each translation coordinate takes `resolution`
/// equispaced values in `[-(a_i + b_i), a_i + b_i]`.
pub fn intersection_inf_search(half_a: &[f64], half_b: &[f64], resolution: usize) -> Result<f64> {
    let n = half_a.len();
    if n == 0 || half_b.len() != n || resolution < 2 {
        return Err(param(
            "boxes must share a positive dimension; resolution >= 2",
        ));
    }
    // The overlap in each coordinate only depends on that coordinate's shift,
    // but the search still enumerates all translations on the grid.
    let axis: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let span = half_a[i] + half_b[i];
            (0..resolution)
                .map(|j| {
                    let x = -span + 2.0 * span * j as f64 / (resolution - 1) as f64;
                    let hi = half_a[i].min(half_b[i] + x);
                    let lo = (-half_a[i]).max(-half_b[i] + x);
                    (hi - lo).max(0.0) / 2.0
                })
                .collect()
        })
        .collect();
    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; n];
    loop {
        let half: Vec<f64> = (0..n).map(|i| axis[i][idx[i]]).collect();
        if half.iter().all(|h| *h > 0.0) {
            best = best.min(box_eigenvalue(&half));
        }
        let mut d = 0;
        loop {
            if d == n {
                return Ok(best);
            }
            idx[d] += 1;
            if idx[d] < resolution {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}
