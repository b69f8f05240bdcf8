//! Closed-form principal eigenpairs of `P+_1` on boxes, of `P+_k` on balls,
//! and the product-form counterexample for `2 <= k <= N-1`.
//!
//! Box eigenfunctions are products of powered cosines
//! `u(x) = prod_i cos(c_i x_i)^{q_i}`. Writing `L_i = d/dx_i log u`, the
//! Hessian is `u (diag(L_i') + L L^T)`, which is how all evaluators below are
//! computed.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::matrix_core::{
    self, frame_sum, gram_schmidt, pk_plus, special_matrix, Frame, SymMatrix,
};

/// Open box `prod_i (-R/alpha_i, R/alpha_i)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxSpec {
    half_width: f64,
    alpha: Vec<f64>,
}

impl BoxSpec {
    pub fn new(half_width: f64, alpha: Vec<f64>) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(param(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        if alpha.is_empty() || alpha.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(param("anisotropy entries must be positive"));
        }
        Ok(Self { half_width, alpha })
    }

    /// The cube `Q_{2R} = (-R, R)^n`.
    pub fn cube(n: usize, half_width: f64) -> Result<Self> {
        Self::new(half_width, vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Half side lengths `R / alpha_i`.
    pub fn half_extents(&self) -> Vec<f64> {
        self.alpha.iter().map(|a| self.half_width / a).collect()
    }

    pub fn measure(&self) -> f64 {
        self.half_extents().iter().map(|h| 2.0 * h).product()
    }
}

/// Open ball of radius `radius` centred at the origin of `R^dim`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallSpec {
    dim: usize,
    radius: f64,
}

impl BallSpec {
    pub fn new(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(param("ball dimension must be positive"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(param(format!("radius must be positive, got {radius}")));
        }
        Ok(Self { dim, radius })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Box(BoxSpec),
    Ball(BallSpec),
}

impl DomainSpec {
    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Box(b) => b.dim(),
            DomainSpec::Ball(b) => b.dim(),
        }
    }

    /// Strict interior test.
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            DomainSpec::Box(b) => x.iter().zip(b.half_extents()).all(|(xi, h)| xi.abs() < h),
            DomainSpec::Ball(b) => matrix_core::norm(x) < b.radius,
        }
    }
}

/// `prod_i cos(freq_i x_i)^{power_i}` with its derivatives.
#[derive(Clone, Debug, PartialEq)]
struct ProductCosine {
    freq: Vec<f64>,
    power: Vec<f64>,
}

impl ProductCosine {
    fn value(&self, x: &[f64]) -> f64 {
        self.freq
            .iter()
            .zip(&self.power)
            .zip(x)
            .map(|((f, q), xi)| (f * xi).cos().powf(*q))
            .product()
    }

    /// `(L_i, L_i')` where `L_i = d/dx_i log u`.
    fn log_derivatives(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut l = Vec::with_capacity(x.len());
        let mut dl = Vec::with_capacity(x.len());
        for ((f, q), xi) in self.freq.iter().zip(&self.power).zip(x) {
            let t = f * xi;
            let c = t.cos();
            l.push(-q * f * t.tan());
            dl.push(-q * f * f / (c * c));
        }
        (l, dl)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let u = self.value(x);
        self.log_derivatives(x)
            .0
            .into_iter()
            .map(|l| u * l)
            .collect()
    }

    fn hessian(&self, x: &[f64]) -> SymMatrix {
        let u = self.value(x);
        let (l, dl) = self.log_derivatives(x);
        SymMatrix::from_fn(x.len(), |i, j| {
            let d = if i == j { dl[i] } else { 0.0 };
            u * (d + l[i] * l[j])
        })
    }
}

/// Number of RK4 steps used for radial profiles.
pub const RADIAL_STEPS: usize = 10_000;

/// Radial profile `v(s)` with `v'(0) = 0`, `v(rho) = 0`.
#[derive(Clone, Debug, PartialEq)]
enum Radial {
    /// `cos(c s)` (the one-dimensional case).
    Cosine { c: f64 },
    /// Tabulated solution of `v'' + (k-1)/s v' + mu v = 0`.
    Table {
        k: usize,
        mu: f64,
        step: f64,
        v: Vec<f64>,
        dv: Vec<f64>,
    },
}

/// Radial ODE right-hand side `v'' = -(k-1)/s v' - mu v` with the `s -> 0` limit.
fn radial_rhs(k: usize, mu: f64, s: f64, v: f64, dv: f64) -> f64 {
    if s == 0.0 {
        -mu * v / k as f64
    } else {
        -(k as f64 - 1.0) / s * dv - mu * v
    }
}

/// Leading Taylor coefficients of the regular radial solution with `v(0) = 1`:
/// `v = sum_m c_m s^{2m}`.
fn series_coefficients(k: usize, mu: f64) -> [f64; 4] {
    let half = k as f64 / 2.0;
    let mut c = [1.0; 4];
    for m in 1..4 {
        c[m] = c[m - 1] * (-mu / 4.0) / (m as f64 * (half + m as f64 - 1.0));
    }
    c
}

/// `(v, v', v'/s, v'')` from the series, valid for small `s`.
fn series_eval(k: usize, mu: f64, s: f64) -> (f64, f64, f64, f64) {
    let c = series_coefficients(k, mu);
    let s2 = s * s;
    let v = c[0] + s2 * (c[1] + s2 * (c[2] + s2 * c[3]));
    let dv_over_s = 2.0 * c[1] + s2 * (4.0 * c[2] + s2 * 6.0 * c[3]);
    let d2v = 2.0 * c[1] + s2 * (12.0 * c[2] + s2 * 30.0 * c[3]);
    (v, dv_over_s * s, dv_over_s, d2v)
}

fn rk4_step(k: usize, mu: f64, s: f64, v: f64, dv: f64, h: f64) -> (f64, f64) {
    let f = |s: f64, v: f64, dv: f64| (dv, radial_rhs(k, mu, s, v, dv));
    let (k1v, k1d) = f(s, v, dv);
    let (k2v, k2d) = f(s + h / 2.0, v + h / 2.0 * k1v, dv + h / 2.0 * k1d);
    let (k3v, k3d) = f(s + h / 2.0, v + h / 2.0 * k2v, dv + h / 2.0 * k2d);
    let (k4v, k4d) = f(s + h, v + h * k3v, dv + h * k3d);
    (
        v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        dv + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d),
    )
}

/// Integrates the radial ODE on `[0, rho]`; returns the node values and
/// whether `v` reached a nonpositive value.
fn shoot(k: usize, mu: f64, rho: f64, steps: usize) -> (Vec<f64>, Vec<f64>, bool) {
    let h = rho / steps as f64;
    let mut v = Vec::with_capacity(steps + 1);
    let mut dv = Vec::with_capacity(steps + 1);
    v.push(1.0);
    dv.push(0.0);
    let (v1, d1, _, _) = series_eval(k, mu, h);
    v.push(v1);
    dv.push(d1);
    let mut crossed = v1 <= 0.0;
    for i in 1..steps {
        let (nv, nd) = rk4_step(k, mu, i as f64 * h, v[i], dv[i], h);
        crossed |= nv <= 0.0;
        v.push(nv);
        dv.push(nd);
    }
    (v, dv, crossed)
}

/// Principal Dirichlet eigenvalue of the `k`-dimensional Laplacian on the
/// radius-`rho` ball by shooting and bisection on `mu`.
fn radial_eigenvalue(k: usize, rho: f64) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let mut lo = 0.0;
    let mut hi = (PI / (2.0 * rho)).powi(2);
    while !shoot(k, hi, rho, RADIAL_STEPS).2 {
        lo = hi;
        hi *= 2.0;
    }
    let mut best = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (v, dv, crossed) = shoot(k, mid, rho, RADIAL_STEPS);
        let end = *v.last().unwrap();
        if end.abs() < 1e-13 || hi - lo <= 4.0 * f64::EPSILON * hi {
            best = Some((mid, v, dv));
            break;
        }
        if crossed {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (mu, v, dv) = best.ok_or_else(|| Error::IterationLimit {
        iterations: 200,
        last: hi - lo,
        history: vec![],
    })?;
    let end = v.last().unwrap().abs();
    if end >= 1e-10 {
        return Err(Error::Invariant(format!(
            "radial shooting ended with |v(rho)| = {end:e}"
        )));
    }
    Ok((mu, v, dv))
}

impl Radial {
    /// `(v, v', v'/s, v'')` at `s in [0, rho]`.
    fn eval(&self, s: f64) -> (f64, f64, f64, f64) {
        match *self {
            Radial::Cosine { c } => {
                let t = c * s;
                let dv = -c * t.sin();
                let dv_over_s = if s < 1e-8 {
                    -c * c * (1.0 - t * t / 6.0)
                } else {
                    dv / s
                };
                (t.cos(), dv, dv_over_s, -c * c * t.cos())
            }
            Radial::Table {
                k,
                mu,
                step,
                ref v,
                ref dv,
            } => {
                if s < step {
                    return series_eval(k, mu, s);
                }
                let i = ((s / step).floor() as usize).min(v.len() - 1);
                let s0 = i as f64 * step;
                let (val, d) = if s - s0 > 0.0 {
                    rk4_step(k, mu, s0, v[i], dv[i], s - s0)
                } else {
                    (v[i], dv[i])
                };
                (val, d, d / s, radial_rhs(k, mu, s, val, d))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Profile {
    Product(ProductCosine),
    Radial(Radial),
}

/// Principal eigenvalue together with exact evaluators of the eigenfunction.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    /// Principal eigenvalue.
    pub mu: f64,
    /// Exponents `p_i` (box pairs only; `u = prod cos(..)^{1/(p_i+1)}`).
    pub exponents: Vec<f64>,
    /// `kappa = sum_i 1/alpha_i^2` for box pairs.
    pub kappa: Option<f64>,
    /// Order of the truncated operator the pair belongs to.
    pub order: usize,
    pub domain: DomainSpec,
    profile: Profile,
}

impl EigenPair {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn check_interior(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(param(format!(
                "point has dimension {}, domain has {}",
                x.len(),
                self.dim()
            )));
        }
        if self.domain.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!("{x:?}")))
        }
    }

    /// `u(x)`; points outside the open domain evaluate to the continuous
    /// extension 0.
    pub fn value(&self, x: &[f64]) -> f64 {
        if !self.domain.contains(x) {
            return 0.0;
        }
        match &self.profile {
            Profile::Product(p) => p.value(x),
            Profile::Radial(r) => r.eval(matrix_core::norm(x)).0,
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_interior(x)?;
        Ok(match &self.profile {
            Profile::Product(p) => p.gradient(x),
            Profile::Radial(r) => {
                let s = matrix_core::norm(x);
                let (_, _, dv_over_s, _) = r.eval(s);
                x.iter().map(|xi| dv_over_s * xi).collect()
            }
        })
    }

    pub fn hessian(&self, x: &[f64]) -> Result<SymMatrix> {
        self.check_interior(x)?;
        Ok(match &self.profile {
            Profile::Product(p) => p.hessian(x),
            Profile::Radial(r) => {
                let s = matrix_core::norm(x);
                let (_, _, dv_over_s, d2v) = r.eval(s);
                if s == 0.0 {
                    SymMatrix::diagonal(&vec![d2v; x.len()])
                } else {
                    // v'' xx^T/s^2 + (v'/s)(I - xx^T/s^2)
                    SymMatrix::from_fn(x.len(), |i, j| {
                        let rr = x[i] * x[j] / (s * s);
                        let id = if i == j { 1.0 } else { 0.0 };
                        d2v * rr + dv_over_s * (id - rr)
                    })
                }
            }
        })
    }

    /// Radial profile `(v, v', v'')` at radius `s` (ball pairs only).
    pub fn radial_profile(&self, s: f64) -> Option<(f64, f64, f64)> {
        match &self.profile {
            Profile::Radial(r) => {
                let (v, dv, _, d2v) = r.eval(s);
                Some((v, dv, d2v))
            }
            Profile::Product(_) => None,
        }
    }

    /// Direction realising `max <D^2u(x) v, v> / |v|^2` for box pairs of
    /// order 1: `v_i = alpha_i^{-2} prod_{j != i} L_j`. Nonzero whenever at
    /// most one coordinate of `x` vanishes.
    pub fn extremal_direction(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_interior(x)?;
        let (Profile::Product(p), DomainSpec::Box(b)) = (&self.profile, &self.domain) else {
            return Err(param("extremal direction is defined for box pairs only"));
        };
        let (l, _) = p.log_derivatives(x);
        Ok((0..x.len())
            .map(|i| {
                let rest: f64 = (0..x.len()).filter(|&j| j != i).map(|j| l[j]).product();
                rest / (b.alpha()[i] * b.alpha()[i])
            })
            .collect())
    }
}

/// Principal eigenpair of `P+_1` in the cube `(-r, r)^n`:
/// `mu = (1/n) (pi / 2r)^2`, `u = prod cos(pi x_i / 2r)^{1/n}`.
pub fn cube_eigenpair(n: usize, r: f64) -> Result<EigenPair> {
    if n < 2 {
        return Err(param(format!("cube eigenpair needs n >= 2, got {n}")));
    }
    rect_eigenpair(&BoxSpec::cube(n, r)?)
}

/// Principal eigenpair of `P+_1` in `Rect(alpha)`:
/// `mu = (pi/2R)^2 / kappa`, `kappa = sum 1/alpha_i^2`, `p_i = kappa alpha_i^2 - 1`.
pub fn rect_eigenpair(spec: &BoxSpec) -> Result<EigenPair> {
    let c = PI / (2.0 * spec.half_width());
    let kappa: f64 = spec.alpha().iter().map(|a| 1.0 / (a * a)).sum();
    let exponents: Vec<f64> = spec.alpha().iter().map(|a| kappa * a * a - 1.0).collect();
    let profile = ProductCosine {
        freq: spec.alpha().iter().map(|a| c * a).collect(),
        power: exponents.iter().map(|p| 1.0 / (p + 1.0)).collect(),
    };
    Ok(EigenPair {
        mu: c * c / kappa,
        exponents,
        kappa: Some(kappa),
        order: 1,
        domain: DomainSpec::Box(spec.clone()),
        profile: Profile::Product(profile),
    })
}

/// Principal eigenpair of `P+_k` on the radius-`rho` ball of `R^n`, built from
/// the radial Dirichlet eigenfunction of the `k`-dimensional Laplacian.
pub fn ball_eigenpair(n: usize, k: usize, rho: f64) -> Result<EigenPair> {
    if k == 0 || k > n {
        return Err(param(format!("order k = {k} must satisfy 1 <= k <= {n}")));
    }
    let ball = BallSpec::new(n, rho)?;
    let (mu, radial) = if k == 1 {
        let c = PI / (2.0 * rho);
        (c * c, Radial::Cosine { c })
    } else {
        let (mu, v, dv) = radial_eigenvalue(k, rho)?;
        (
            mu,
            Radial::Table {
                k,
                mu,
                step: rho / RADIAL_STEPS as f64,
                v,
                dv,
            },
        )
    };
    Ok(EigenPair {
        mu,
        exponents: vec![],
        kappa: None,
        order: k,
        domain: DomainSpec::Ball(ball),
        profile: Profile::Radial(radial),
    })
}

/// `P+_k(D^2u(x)) + mu u(x)`.
pub fn residual(pair: &EigenPair, x: &[f64], k: usize) -> Result<f64> {
    let h = pair.hessian(x)?;
    Ok(pk_plus(&h, k)? + pair.mu * pair.value(x))
}

#[derive(Clone, Debug, Serialize)]
pub struct RadialConvexityReport {
    /// `min_r v''(r) - v'(r)/r` over the samples (the `r -> 0` limit is 0).
    pub min_gap: f64,
    pub argmin: f64,
    pub samples: usize,
}

/// Samples `v''(r) - v'(r)/r` on `(0, rho)`.
pub fn radial_convexity_check(pair: &EigenPair, samples: usize) -> Result<RadialConvexityReport> {
    let DomainSpec::Ball(ball) = &pair.domain else {
        return Err(param("radial convexity check needs a ball pair"));
    };
    let rho = ball.radius();
    let mut report = RadialConvexityReport {
        min_gap: 0.0,
        argmin: 0.0,
        samples,
    };
    let Profile::Radial(r) = &pair.profile else {
        unreachable!("ball pairs carry radial profiles");
    };
    for j in 1..=samples {
        let s = rho * j as f64 / (samples + 1) as f64;
        let (_, _, dv_over_s, d2v) = r.eval(s);
        let gap = d2v - dv_over_s;
        if gap < report.min_gap {
            report.min_gap = gap;
            report.argmin = s;
        }
    }
    Ok(report)
}

/// Product-form candidate `prod cos(pi x_i / 2r)^{k/n}` with
/// `mu = (1/n)(k pi / 2r)^2`; solves the equation on the diagonal only.
pub fn product_candidate(n: usize, k: usize, r: f64) -> Result<EigenPair> {
    if k == 0 || k > n {
        return Err(param(format!("order k = {k} must satisfy 1 <= k <= {n}")));
    }
    let spec = BoxSpec::cube(n, r)?;
    let c = PI / (2.0 * r);
    let q = k as f64 / n as f64;
    Ok(EigenPair {
        mu: (k as f64 * c).powi(2) / n as f64,
        exponents: vec![1.0 / q - 1.0; n],
        kappa: None,
        order: k,
        domain: DomainSpec::Box(spec),
        profile: Profile::Product(ProductCosine {
            freq: vec![c; n],
            power: vec![q; n],
        }),
    })
}

/// Witness that the product-form candidate is not a solution for
/// `2 <= k <= n-1`.
#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleCertificate {
    pub n: usize,
    pub k: usize,
    pub half_width: f64,
    pub point: Vec<f64>,
    pub frame: Frame,
    /// Target log-derivatives `f'/f` at `x_1 = ... = x_{n-1}` and at `x_n`.
    pub a: f64,
    pub b: f64,
    pub gamma_sq: f64,
    pub mu: f64,
    pub u_at_point: f64,
    /// `(n(k-1)/k)(n gamma^2 - a^2) u(x)`.
    pub residual_lower_bound: f64,
    /// `sum_i <D^2u v_i, v_i> + mu u` over the constructed frame.
    pub frame_residual: f64,
    /// `P+_k(D^2u(x)) + mu u(x)` from the spectrum.
    pub pk_residual: f64,
    /// `<M w_1, w_1>` and `sum_{i>=2} <M w_i, w_i>` with `M = M((n-k)/k, -1)`.
    pub w1_form: f64,
    pub rest_form: f64,
    pub holds: bool,
}

/// Solves `f'/f(t) = target` for `f = cos(pi t / 2r)^{k/n}`.
fn invert_log_derivative(target: f64, n: usize, k: usize, r: f64) -> f64 {
    -(2.0 * r / PI) * (2.0 * r * n as f64 * target / (k as f64 * PI)).atan()
}

/// Builds the point, frame and residual lower bound showing that
/// `prod cos(pi x_i/2r)^{k/n}` fails `P+_k(D^2u) + mu u = 0` off the diagonal.
pub fn product_counterexample(
    n: usize,
    k: usize,
    r: f64,
    a: f64,
    b: f64,
) -> Result<CounterexampleCertificate> {
    if k < 2 || k + 1 > n {
        return Err(param(format!("need 2 <= k <= n-1, got n = {n}, k = {k}")));
    }
    if !(a > 0.0) || !(b > a) {
        return Err(param(format!("need b > a > 0, got a = {a}, b = {b}")));
    }
    let pair = product_candidate(n, k, r)?;
    let ta = invert_log_derivative(a, n, k, r);
    let tb = invert_log_derivative(b, n, k, r);
    let mut point = vec![ta; n];
    point[n - 1] = tb;

    let nf = n as f64;
    let kf = k as f64;
    let gamma_sq = (a * b).powi(2) / ((nf - 1.0) * b * b + a * a);
    let gamma = gamma_sq.sqrt();
    let mut v1 = vec![gamma / a; n];
    v1[n - 1] = gamma / b;

    // k-1 orthonormal vectors of {v : v_1 + .. + v_{n-1} = 0, v_n = 0}.
    let raw: Vec<Vec<f64>> = (0..k - 1)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e[i + 1] = -1.0;
            e
        })
        .collect();
    let mut vectors = vec![v1];
    vectors.extend(gram_schmidt(&raw).ok_or_else(|| param("degenerate subspace basis"))?);
    let frame = Frame::new(vectors)?;

    let u = pair.value(&point);
    let hess = pair.hessian(&point)?;
    let frame_residual = frame_sum(&hess, &frame)? + pair.mu * u;
    let pk_residual = pk_plus(&hess, k)? + pair.mu * u;

    let log_d: Vec<f64> = point
        .iter()
        .map(|&t| -(kf * PI / (2.0 * r * nf)) * (PI * t / (2.0 * r)).tan())
        .collect();
    let m = special_matrix((nf - kf) / kf, -1.0, n)?;
    let w_form = |v: &Vec<f64>| {
        let w: Vec<f64> = v.iter().zip(&log_d).map(|(vi, l)| vi * l).collect();
        m.quadratic_form(&w)
    };
    let w1_form = w_form(&frame.vectors()[0]);
    let rest_form = frame.vectors()[1..].iter().map(w_form).sum();

    let residual_lower_bound = (nf * (kf - 1.0) / kf) * (nf * gamma_sq - a * a) * u;
    Ok(CounterexampleCertificate {
        n,
        k,
        half_width: r,
        point,
        a,
        b,
        gamma_sq,
        mu: pair.mu,
        u_at_point: u,
        residual_lower_bound,
        frame_residual,
        pk_residual,
        w1_form,
        rest_form,
        holds: residual_lower_bound > 0.0 && pk_residual >= residual_lower_bound - 1e-10,
        frame,
    })
}

/// The cube of side `pi` used by the regularity layer: `(-pi/2, pi/2)^n`.
pub fn unit_cube_eigenpair(n: usize) -> Result<EigenPair> {
    cube_eigenpair(n, FRAC_PI_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{halton_box, rng, unit_vector};

    #[test]
    fn cube_eigenvalues() {
        assert!((cube_eigenpair(2, PI / 2.0).unwrap().mu - 0.5).abs() < 1e-15);
        assert!((cube_eigenpair(3, PI / 2.0).unwrap().mu - 1.0 / 3.0).abs() < 1e-15);
        for (n, r) in [(2, 0.7), (4, 3.0), (5, 1.0)] {
            let p = cube_eigenpair(n, r).unwrap();
            let origin = vec![0.0; n];
            assert_eq!(p.value(&origin), 1.0);
            assert!(p.gradient(&origin).unwrap().iter().all(|g| *g == 0.0));
            let expected = (PI / (2.0 * r)).powi(2) / n as f64;
            assert!((p.mu - expected).abs() < 1e-14 * expected);
        }
    }

    #[test]
    fn rect_eigenvalues() {
        let p = rect_eigenpair(&BoxSpec::new(PI / 2.0, vec![1.0, 2.0]).unwrap()).unwrap();
        assert!((p.mu - 0.8).abs() < 1e-15);
        assert!((p.kappa.unwrap() - 1.25).abs() < 1e-15);
        assert!((p.exponents[0] - 0.25).abs() < 1e-15);
        assert!((p.exponents[1] - 4.0).abs() < 1e-15);
        let p = rect_eigenpair(&BoxSpec::new(PI / 2.0, vec![1.0, 1.0, 2.0]).unwrap()).unwrap();
        assert!((p.mu - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn rect_with_unit_alpha_is_the_cube() {
        for n in 2..=5 {
            let cube = cube_eigenpair(n, 1.3).unwrap();
            let rect = rect_eigenpair(&BoxSpec::new(1.3, vec![1.0; n]).unwrap()).unwrap();
            assert_eq!(cube, rect);
        }
    }

    #[test]
    fn residual_rejects_exterior_points() {
        let p = cube_eigenpair(2, 1.0).unwrap();
        assert!(matches!(
            residual(&p, &[1.0, 0.0], 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            residual(&p, &[0.0, -1.5], 1),
            Err(Error::Domain(_))
        ));
        assert_eq!(p.value(&[1.0, 0.0]), 0.0);
    }

    #[test]
    fn residual_vanishes_for_box_pairs() {
        let cube = cube_eigenpair(3, 1.0).unwrap();
        let rect = rect_eigenpair(&BoxSpec::new(1.0, vec![1.0, 2.0]).unwrap()).unwrap();
        for pair in [cube, rect] {
            let half = match &pair.domain {
                DomainSpec::Box(b) => b.half_extents(),
                _ => unreachable!(),
            };
            for x in halton_box(&half, 500) {
                let r = residual(&pair, &x, 1).unwrap();
                assert!(r.abs() < 1e-10, "residual {r} at {x:?}");
            }
        }
    }

    #[test]
    fn cube_quadratic_form_is_bounded_and_attained() {
        let pair = cube_eigenpair(3, 1.0).unwrap();
        let mut g = rng(11);
        for x in halton_box(&[1.0; 3], 300) {
            let h = pair.hessian(&x).unwrap();
            let bound = -pair.mu * pair.value(&x);
            for _ in 0..20 {
                let v = unit_vector(&mut g, 3);
                assert!(h.quadratic_form(&v) <= bound + 1e-12 * (1.0 + h.max_abs()));
            }
            let v = pair.extremal_direction(&x).unwrap();
            let n2 = matrix_core::dot(&v, &v);
            let q = h.quadratic_form(&v) / n2;
            assert!(
                (q - bound).abs() < 1e-10 * (1.0 + h.max_abs()),
                "{q} vs {bound}"
            );
        }
        // Exactly one vanishing coordinate still gives a nonzero direction.
        let v = pair.extremal_direction(&[0.0, 0.3, -0.2]).unwrap();
        assert!(matrix_core::norm(&v) > 0.0);
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let pairs = vec![
            cube_eigenpair(3, 1.0).unwrap(),
            rect_eigenpair(&BoxSpec::new(1.2, vec![0.5, 1.0, 2.0]).unwrap()).unwrap(),
            ball_eigenpair(3, 1, 1.0).unwrap(),
            ball_eigenpair(3, 2, 1.0).unwrap(),
        ];
        let step = 1e-5;
        for pair in &pairs {
            let n = pair.dim();
            let half = match &pair.domain {
                DomainSpec::Box(b) => b.half_extents().iter().map(|h| 0.9 * h).collect(),
                DomainSpec::Ball(b) => vec![0.9 * b.radius() / (n as f64).sqrt(); n],
            };
            for x in halton_box(&half, 200) {
                let g = pair.gradient(&x).unwrap();
                let h = pair.hessian(&x).unwrap();
                let scale = 1.0 + h.max_abs();
                for i in 0..n {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += step;
                    xm[i] -= step;
                    let fd = (pair.value(&xp) - pair.value(&xm)) / (2.0 * step);
                    assert!(
                        (fd - g[i]).abs() < 1e-6 * scale,
                        "grad {i}: {fd} vs {}",
                        g[i]
                    );
                    let gp = pair.gradient(&xp).unwrap();
                    let gm = pair.gradient(&xm).unwrap();
                    for j in 0..n {
                        let fd = (gp[j] - gm[j]) / (2.0 * step);
                        assert!(
                            (fd - h.get(i, j)).abs() < 1e-6 * scale,
                            "hess ({i},{j}): {fd} vs {}",
                            h.get(i, j)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn ball_with_k_one_is_a_cosine() {
        let p = ball_eigenpair(2, 1, PI / 2.0).unwrap();
        assert!((p.mu - 1.0).abs() < 1e-15);
        assert!((p.value(&[0.3, 0.4]) - 0.5f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn ball_order_validated() {
        assert!(matches!(
            ball_eigenpair(2, 3, 1.0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            ball_eigenpair(2, 0, 1.0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn three_dimensional_radial_profile_is_sinc() {
        let p = ball_eigenpair(3, 3, 1.0).unwrap();
        assert!((p.mu - PI * PI).abs() < 1e-8);
        for s in [0.0, 1e-5, 0.1, 0.37, 0.9, 0.999] {
            let exact = if s == 0.0 {
                1.0
            } else {
                (PI * s).sin() / (PI * s)
            };
            let (v, _, _) = p.radial_profile(s).unwrap();
            assert!((v - exact).abs() < 1e-9, "s = {s}: {v} vs {exact}");
        }
    }

    #[test]
    fn ball_residual_vanishes() {
        for (n, k) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
            let p = ball_eigenpair(n, k, 1.0).unwrap();
            let half = vec![0.99 / (n as f64).sqrt(); n];
            let mut pts = halton_box(&half, 200);
            pts.push(vec![0.0; n]);
            for x in pts {
                let r = residual(&p, &x, k).unwrap();
                assert!(r.abs() < 1e-9, "n={n} k={k} residual {r}");
            }
        }
    }

    #[test]
    fn radial_convexity() {
        for k in 1..=3 {
            let p = ball_eigenpair(3, k, 1.0).unwrap();
            let rep = radial_convexity_check(&p, 1000).unwrap();
            assert!(rep.min_gap >= -1e-8, "k={k}: {rep:?}");
        }
        let cube = cube_eigenpair(2, 1.0).unwrap();
        assert!(radial_convexity_check(&cube, 10).is_err());
    }

    #[test]
    fn counterexample_three_two() {
        let c = product_counterexample(3, 2, PI / 2.0, 1.0, 2.0).unwrap();
        assert!((c.gamma_sq - 4.0 / 9.0).abs() < 1e-15);
        assert!((c.residual_lower_bound - 0.5 * c.u_at_point).abs() < 1e-14);
        assert!(c.holds);
        // Log-derivatives at the chosen point.
        let pair = product_candidate(3, 2, PI / 2.0).unwrap();
        let g = pair.gradient(&c.point).unwrap();
        assert!((g[0] / c.u_at_point - 1.0).abs() < 1e-12);
        assert!((g[2] / c.u_at_point - 2.0).abs() < 1e-12);
        // <M w1, w1> = -((k-1)/k) N^2 gamma^2.
        assert!((c.w1_form + 0.5 * 9.0 * c.gamma_sq).abs() < 1e-12);
        // sum_{i>=2} <M w_i, w_i> = (N(k-1)/k) a^2.
        assert!((c.rest_form - 1.5).abs() < 1e-12);
        assert!((c.frame_residual - c.residual_lower_bound).abs() < 1e-12);
    }

    #[test]
    fn counterexample_parameter_errors() {
        assert!(matches!(
            product_counterexample(3, 2, 1.0, 2.0, 2.0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            product_counterexample(3, 3, 1.0, 1.0, 2.0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            product_counterexample(3, 1, 1.0, 1.0, 2.0),
            Err(Error::Parameter(_))
        ));
    }
}
