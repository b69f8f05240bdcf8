use std::io::{self, Read, Write};

use serde::Serialize;

use super::grid::Grid;

/// Nodal values on the full lattice of a [`Grid`]; zero off the interior for
/// Dirichlet data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalarField {
    shape: Vec<usize>,
    h: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        let (lo, hi) = grid.lattice_bounds();
        Self {
            shape: grid.shape().to_vec(),
            h: grid.h(),
            lo,
            hi,
            values: vec![0.0; grid.lattice_len()],
        }
    }

    /// Scatters interior-node values into a field that vanishes elsewhere.
    pub fn from_interior(grid: &Grid, interior: &[f64]) -> Self {
        assert_eq!(interior.len(), grid.interior_len());
        let mut f = Self::zeros(grid);
        for (slot, &lin) in grid.interior().iter().enumerate() {
            f.values[lin] = interior[slot];
        }
        f
    }

    /// Samples `g` at interior nodes; boundary and exterior nodes get 0.
    pub fn sample(grid: &Grid, g: impl Fn(&[f64]) -> f64) -> Self {
        let vals: Vec<f64> = grid
            .interior()
            .iter()
            .map(|&lin| g(&grid.coords(lin)))
            .collect();
        Self::from_interior(grid, &vals)
    }

    pub fn interior_values(&self, grid: &Grid) -> Vec<f64> {
        assert!(self.matches(grid), "field does not belong to this grid");
        grid.interior()
            .iter()
            .map(|&lin| self.values[lin])
            .collect()
    }

    pub fn matches(&self, grid: &Grid) -> bool {
        self.shape == grid.shape() && self.h == grid.h()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn bounds(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn node_coords(&self, mut lin: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.shape.len()];
        for d in (0..self.shape.len()).rev() {
            c[d] = self.lo[d] + (lin % self.shape[d]) as f64 * self.h;
            lin /= self.shape[d];
        }
        c
    }

    /// Little-endian layout: `u64 dim`, `u64 shape[dim]`, `f64 h`,
    /// `f64 lo[dim]`, `f64 hi[dim]`, then the node values in row-major order
    /// (last axis fastest) as `f64`.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(&(self.shape.len() as u64).to_le_bytes())?;
        for &s in &self.shape {
            w.write_all(&(s as u64).to_le_bytes())?;
        }
        w.write_all(&self.h.to_le_bytes())?;
        for v in self.lo.iter().chain(&self.hi).chain(&self.values) {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> io::Result<Self> {
        let mut b8 = [0u8; 8];
        let mut next_u64 = |r: &mut R| -> io::Result<u64> {
            r.read_exact(&mut b8)?;
            Ok(u64::from_le_bytes(b8))
        };
        let dim = next_u64(&mut r)? as usize;
        if dim == 0 || dim > 8 {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "bad dimension"));
        }
        let shape = (0..dim)
            .map(|_| next_u64(&mut r).map(|s| s as usize))
            .collect::<io::Result<Vec<_>>>()?;
        let total = shape
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .filter(|&t| t > 0 && t < (1 << 34))
            .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "bad shape"))?;
        let next_f64 = |r: &mut R| -> io::Result<f64> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            Ok(f64::from_le_bytes(b))
        };
        let h = next_f64(&mut r)?;
        let lo = (0..dim)
            .map(|_| next_f64(&mut r))
            .collect::<io::Result<Vec<_>>>()?;
        let hi = (0..dim)
            .map(|_| next_f64(&mut r))
            .collect::<io::Result<Vec<_>>>()?;
        let values = (0..total)
            .map(|_| next_f64(&mut r))
            .collect::<io::Result<Vec<_>>>()?;
        Ok(Self {
            shape,
            h,
            lo,
            hi,
            values,
        })
    }

    /// CSV with header `x,y[,z],u`, one row per lattice node, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let names = ["x", "y", "z", "w"];
        let header: Vec<&str> = names[..self.shape.len()].to_vec();
        writeln!(w, "{},u", header.join(","))?;
        for (lin, v) in self.values.iter().enumerate() {
            let c = self.node_coords(lin);
            let cols: Vec<String> = c.iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(w, "{},{v:.16e}", cols.join(","))?;
        }
        Ok(())
    }
}
