use rayon::prelude::*;

/// Band matrix with equal lower and upper bandwidth, stored row by row as
/// `2 * bw + 1` slots centred on the diagonal.
#[derive(Clone, Debug)]
pub(crate) struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

/// Rows below this bandwidth are eliminated sequentially.
const PARALLEL_BAND: usize = 48;

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (2 * bw + 1)],
        }
    }

    #[inline]
    fn width(&self) -> usize {
        2 * self.bw + 1
    }

    /// Adds `v` to entry `(i, j)`; `|i - j|` must not exceed the bandwidth.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i.abs_diff(j) <= self.bw);
        let w = self.width();
        self.data[i * w + j + self.bw - i] += v;
    }

    /// In-place LU factorisation without pivoting. Valid for nonsingular
    /// M-matrices, whose Schur complements stay M-matrices.
    pub fn factor(mut self) -> Option<BandLu> {
        let (n, bw, w) = (self.n, self.bw, self.width());
        for k in 0..n {
            let (head, tail) = self.data.split_at_mut((k + 1) * w);
            let row_k = &head[k * w..];
            let pivot = row_k[bw];
            if !(pivot.abs() > 0.0) || !pivot.is_finite() {
                return None;
            }
            let below = bw.min(n - k - 1);
            let upper = &row_k[bw + 1..bw + 1 + below];
            let eliminate = |(r, row_i): (usize, &mut [f64])| {
                // Row i = k + 1 + r; column k sits at offset bw - (r + 1).
                let col = bw - (r + 1);
                let l = row_i[col];
                if l != 0.0 {
                    let l = l / pivot;
                    row_i[col] = l;
                    for (a, b) in row_i[col + 1..col + 1 + below].iter_mut().zip(upper) {
                        *a -= l * b;
                    }
                }
            };
            let rows = &mut tail[..below * w];
            if bw >= PARALLEL_BAND {
                rows.par_chunks_mut(w).enumerate().for_each(eliminate);
            } else {
                rows.chunks_mut(w).enumerate().for_each(eliminate);
            }
        }
        Some(BandLu { m: self })
    }
}

#[derive(Clone, Debug)]
pub(crate) struct BandLu {
    m: BandMatrix,
}

impl BandLu {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, bw, w) = (self.m.n, self.m.bw, self.m.width());
        let a = &self.m.data;
        let mut x = rhs.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let row = &a[i * w..(i + 1) * w];
            let mut s = x[i];
            for j in lo..i {
                s -= row[j + bw - i] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let row = &a[i * w..(i + 1) * w];
            let mut s = x[i];
            for j in i + 1..=hi {
                s -= row[j + bw - i] * x[j];
            }
            x[i] = s / row[bw];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng;
    use rand::Rng;

    #[test]
    fn solves_diagonally_dominant_band_systems() {
        let mut r = rng(3);
        for &(n, bw) in &[(1usize, 0usize), (7, 2), (60, 5), (200, 60)] {
            let mut m = BandMatrix::zeros(n, bw);
            let mut dense = vec![vec![0.0; n]; n];
            for i in 0..n {
                let mut off = 0.0;
                for j in i.saturating_sub(bw)..(i + bw + 1).min(n) {
                    if j != i && r.random_bool(0.5) {
                        let v = -r.random_range(0.0..1.0);
                        m.add(i, j, v);
                        dense[i][j] += v;
                        off += -v;
                    }
                }
                m.add(i, i, off + 0.1);
                dense[i][i] += off + 0.1;
            }
            let x: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
            let b: Vec<f64> = dense
                .iter()
                .map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum())
                .collect();
            let got = m.factor().unwrap().solve(&b);
            for (g, e) in got.iter().zip(&x) {
                assert!((g - e).abs() < 1e-9, "n={n} bw={bw}: {g} vs {e}");
            }
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let m = BandMatrix::zeros(3, 1);
        assert!(m.factor().is_none());
    }
}
