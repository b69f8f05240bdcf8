//! Dense symmetric matrices, ordered spectra and the truncated Laplacian
//! symbols `P-_k` / `P+_k`.
//!
//! Everything here works on small matrices (N up to ~16), so the eigensolver
//! is a plain cyclic Jacobi sweep on a dense copy.

use rand::Rng;
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::sampling::gaussian_vector;

/// Tolerance used to accept a frame as orthonormal.
pub const FRAME_TOLERANCE: f64 = 1e-12;

/// Real symmetric `N x N` matrix stored as its lower triangle (row major).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymMatrix {
    dim: usize,
    packed: Vec<f64>,
}

#[inline]
fn packed_index(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "SymMatrix: dimension must be positive");
        Self {
            dim,
            packed: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds the matrix from `f(i, j)` evaluated on the lower triangle only.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..=i {
                m.packed[packed_index(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from full rows, rejecting input that is not symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(param("matrix rows must form a non-empty square"));
        }
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (rows[i][j], rows[j][i]);
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(param(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    /// `g g^T`.
    pub fn outer(g: &[f64]) -> Self {
        Self::from_fn(g.len(), |i, j| g[i] * g[j])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[packed_index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.packed[packed_index(i, j)] = value;
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            packed: self.packed.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            packed: self
                .packed
                .iter()
                .zip(&other.packed)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-1.0))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `<M v, v>`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            s += self.get(i, i) * v[i] * v[i];
            for j in 0..i {
                s += 2.0 * self.get(i, j) * v[i] * v[j];
            }
        }
        s
    }

    /// `O M O^T` for a row-major `dim x dim` matrix `o`.
    pub fn conjugate(&self, o: &[f64]) -> Self {
        let n = self.dim;
        assert_eq!(o.len(), n * n);
        let mut om = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                om[i * n + j] = (0..n).map(|l| o[i * n + l] * self.get(l, j)).sum();
            }
        }
        Self::from_fn(n, |i, j| (0..n).map(|l| om[i * n + l] * o[j * n + l]).sum())
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.packed.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Eigenvalues in nondecreasing order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    /// Sorts the given values ascending.
    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| a.total_cmp(b));
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the `k` smallest values.
    pub fn lower_sum(&self, k: usize) -> Result<f64> {
        check_order(k, self.0.len())?;
        Ok(self.0[..k].iter().sum())
    }

    /// Sum of the `k` largest values.
    pub fn upper_sum(&self, k: usize) -> Result<f64> {
        check_order(k, self.0.len())?;
        Ok(self.0[self.0.len() - k..].iter().sum())
    }

    /// `max_i |lambda_i|`, the operator norm used in the Lipschitz bound.
    pub fn norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

fn check_order(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        Err(param(format!("order k = {k} must satisfy 1 <= k <= {n}")))
    } else {
        Ok(())
    }
}

/// Eigen-decomposition: ascending eigenvalues and matching unit eigenvectors.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Spectrum,
    /// `vectors[i]` is the eigenvector for `values[i]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi diagonalisation of `m`.
pub fn eigen(m: &SymMatrix) -> Eigen {
    let n = m.dim();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = m.get(i, j);
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let total: f64 = a.iter().map(|x| x * x).sum();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off <= f64::EPSILON * f64::EPSILON * total * 1e-4 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&c| (0..n).map(|r| v[r * n + c]).collect())
        .collect();
    Eigen {
        values: Spectrum(values),
        vectors,
    }
}

/// Ordered eigenvalues `lambda_1 <= ... <= lambda_N`.
pub fn spectrum(m: &SymMatrix) -> Spectrum {
    eigen(m).values
}

/// `P+_k(m)`: sum of the `k` largest eigenvalues.
pub fn pk_plus(m: &SymMatrix, k: usize) -> Result<f64> {
    check_order(k, m.dim())?;
    spectrum(m).upper_sum(k)
}

/// `P-_k(m)`: sum of the `k` smallest eigenvalues.
pub fn pk_minus(m: &SymMatrix, k: usize) -> Result<f64> {
    check_order(k, m.dim())?;
    spectrum(m).lower_sum(k)
}

/// A set of `k` orthonormal vectors in `R^N`.
#[derive(Clone, Debug, Serialize)]
pub struct Frame {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

impl Frame {
    /// Validates orthonormality to [`FRAME_TOLERANCE`].
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vectors.first().map(Vec::len).unwrap_or(0);
        if dim == 0 || vectors.len() > dim || vectors.iter().any(|v| v.len() != dim) {
            return Err(param(
                "frame needs 1..=N vectors of a common positive length",
            ));
        }
        for (i, vi) in vectors.iter().enumerate() {
            for (j, vj) in vectors.iter().enumerate().take(i + 1) {
                let d = dot(vi, vj);
                let target = if i == j { 1.0 } else { 0.0 };
                if (d - target).abs() > FRAME_TOLERANCE {
                    return Err(Error::Invariant(format!(
                        "frame not orthonormal: <v{i}, v{j}> = {d:e}"
                    )));
                }
            }
        }
        Ok(Self { dim, vectors })
    }

    /// Random frame: Gram-Schmidt (applied twice) on Gaussian vectors.
    pub fn random<R: Rng>(rng: &mut R, dim: usize, count: usize) -> Self {
        assert!(count >= 1 && count <= dim);
        loop {
            let raw: Vec<Vec<f64>> = (0..count).map(|_| gaussian_vector(rng, dim)).collect();
            if let Some(vectors) = gram_schmidt(&raw) {
                if let Ok(f) = Self::new(vectors) {
                    return f;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }
}

/// Orthonormalises `raw` with two passes of modified Gram-Schmidt.
/// Returns `None` if the input is numerically rank deficient.
pub fn gram_schmidt(raw: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(raw.len());
    for v in raw {
        let mut w = v.clone();
        let n0 = norm(&w);
        for _pass in 0..2 {
            for q in &out {
                let d = dot(&w, q);
                w.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
            }
        }
        let n = norm(&w);
        if n <= 1e-10 * n0.max(1e-300) {
            return None;
        }
        w.iter_mut().for_each(|a| *a /= n);
        out.push(w);
    }
    Some(out)
}

/// `sum_i <m v_i, v_i>` over the frame.
pub fn frame_sum(m: &SymMatrix, frame: &Frame) -> Result<f64> {
    if frame.dim() != m.dim() {
        return Err(param(format!(
            "frame dimension {} does not match matrix dimension {}",
            frame.dim(),
            m.dim()
        )));
    }
    Ok(frame.vectors.iter().map(|v| m.quadratic_form(v)).sum())
}

/// `M(a, b)`: diagonal `a`, every off-diagonal entry `b`.
pub fn special_matrix(a: f64, b: f64, n: usize) -> Result<SymMatrix> {
    if n < 2 {
        return Err(param(format!("M(a,b) needs n >= 2, got {n}")));
    }
    Ok(SymMatrix::from_fn(n, |i, j| if i == j { a } else { b }))
}

/// Closed-form spectrum of `M(a, b)`: `a - b` with multiplicity `n - 1` and the
/// simple value `a + (n - 1) b`.
pub fn special_spectrum(a: f64, b: f64, n: usize) -> Result<Spectrum> {
    if n < 2 {
        return Err(param(format!("M(a,b) needs n >= 2, got {n}")));
    }
    if b == 0.0 {
        return Ok(Spectrum(vec![a; n]));
    }
    let mut v = vec![a - b; n - 1];
    v.push(a + (n as f64 - 1.0) * b);
    Ok(Spectrum::from_unsorted(v))
}

/// Random symmetric matrix with standard normal entries.
pub fn random_symmetric<R: Rng>(rng: &mut R, dim: usize) -> SymMatrix {
    let g = gaussian_vector(rng, dim * (dim + 1) / 2);
    SymMatrix { dim, packed: g }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn spectrum_of_diagonal_is_sorted() {
        let s = spectrum(&SymMatrix::diagonal(&[3.0, 1.0, 2.0]));
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn spectrum_of_identity() {
        assert_eq!(spectrum(&SymMatrix::identity(4)).values(), &[1.0; 4]);
    }

    #[test]
    fn spectrum_of_special_matrix() {
        let s = spectrum(&special_matrix(2.0, 1.0, 3).unwrap());
        assert!(close(s.values(), &[1.0, 1.0, 4.0], 1e-13));
    }

    #[test]
    fn truncated_sums_on_diagonal() {
        let m = SymMatrix::diagonal(&[1.0, 2.0, 3.0]);
        assert_eq!(pk_plus(&m, 1).unwrap(), 3.0);
        assert_eq!(pk_plus(&m, 3).unwrap(), 6.0);
        assert_eq!(pk_minus(&m, 1).unwrap(), 1.0);
        assert_eq!(pk_minus(&m, 2).unwrap(), 3.0);
    }

    #[test]
    fn truncated_sums_on_special_matrix() {
        let m = special_matrix(0.0, -1.0, 3).unwrap();
        assert!((pk_plus(&m, 2).unwrap() - 2.0).abs() < 1e-13);
        assert!((pk_minus(&m, 1).unwrap() + 2.0).abs() < 1e-13);
    }

    #[test]
    fn order_out_of_range_is_rejected() {
        let m = SymMatrix::identity(3);
        assert!(matches!(pk_plus(&m, 0), Err(Error::Parameter(_))));
        assert!(matches!(pk_minus(&m, 4), Err(Error::Parameter(_))));
    }

    #[test]
    fn eigenvector_frames_attain_the_extremes() {
        let m = SymMatrix::diagonal(&[1.0, 2.0, 3.0]);
        let top = Frame::new(vec![vec![0.0, 0.0, 1.0]]).unwrap();
        let bottom = Frame::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(frame_sum(&m, &top).unwrap(), pk_plus(&m, 1).unwrap());
        assert_eq!(frame_sum(&m, &bottom).unwrap(), pk_minus(&m, 2).unwrap());
    }

    #[test]
    fn non_orthonormal_frame_is_an_invariant_error() {
        let err = Frame::new(vec![vec![1.0, 0.0], vec![1.0, 1e-6]]).unwrap_err();
        assert!(matches!(err, Error::Invariant(_)));
        let err = Frame::new(vec![vec![1.0 + 1e-9, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::Invariant(_)));
    }

    #[test]
    fn special_matrix_examples() {
        assert!(matches!(
            special_matrix(1.0, 1.0, 1),
            Err(Error::Parameter(_))
        ));
        let s = spectrum(&special_matrix(5.0, 0.0, 4).unwrap());
        assert_eq!(s.values(), &[5.0; 4]);
        // a = (N-k)/k, b = -1 with N = 3, k = 2: simple value (1-k)N/k = -3/2.
        let m = special_matrix(0.5, -1.0, 3).unwrap();
        assert!(close(spectrum(&m).values(), &[-1.5, 1.5, 1.5], 1e-13));
        assert!(close(
            special_spectrum(0.5, -1.0, 3).unwrap().values(),
            &[-1.5, 1.5, 1.5],
            1e-15
        ));
        assert_eq!(special_spectrum(5.0, 0.0, 4).unwrap().values(), &[5.0; 4]);
        assert_eq!(
            special_spectrum(2.0, 1.0, 3).unwrap().values(),
            &[1.0, 1.0, 4.0]
        );
    }

    #[test]
    fn eigenvectors_diagonalise() {
        let mut r = rng(3);
        for n in 1..=12 {
            let m = random_symmetric(&mut r, n);
            let e = eigen(&m);
            for (lam, v) in e.values.values().iter().zip(&e.vectors) {
                let mv = m.mul_vec(v);
                let res: f64 = mv
                    .iter()
                    .zip(v)
                    .map(|(a, b)| (a - lam * b).abs())
                    .fold(0.0, f64::max);
                assert!(res < 1e-12 * (1.0 + m.max_abs()), "n={n} residual {res}");
            }
        }
    }

    #[test]
    fn conjugation_by_rotation_preserves_spectrum() {
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let o = [c, -s, s, c];
        let m = SymMatrix::from_fn(2, |i, j| [[1.0, 0.4], [0.4, -2.0]][i][j]);
        let a = spectrum(&m);
        let b = spectrum(&m.conjugate(&o));
        assert!(close(a.values(), b.values(), 1e-14));
    }
}
