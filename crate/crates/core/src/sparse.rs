//! Compressed-row sparse matrices.
//!
//! Every assembled bilinear form lives in a [`SparseMatrix`]. Assembly goes
//! through [`CooBuilder`], which accumulates unordered `(row, col, value)`
//! triplets and merges duplicates on conversion, the usual FEM scatter-add
//! pattern.

use std::io::Write;

use crate::error::{Error, Result};

/// Triplet accumulator for matrix assembly.
#[derive(Clone, Debug)]
pub struct CooBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl CooBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::with_capacity(cap),
        }
    }

    /// Accumulate `value` at `(row, col)`. Duplicates are summed in `build`.
    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, value));
    }

    /// Sort, merge duplicates, and produce compressed-row storage.
    pub fn build(mut self) -> SparseMatrix {
        self.entries
            .sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_counts = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values = Vec::with_capacity(self.entries.len());
        let mut last = None;
        for &(r, c, v) in &self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_counts[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..self.nrows {
            row_counts[r + 1] += row_counts[r];
        }
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: row_counts,
            col_idx,
            values,
        }
    }
}

/// Real matrix in compressed-row (CSR) form: sorted column indices within
/// each row, no duplicate entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Build directly from dense row data `(cols, values)` per row; test helper
    /// and small-system constructor. Columns need not be sorted.
    pub fn from_rows(nrows: usize, ncols: usize, rows: &[Vec<(usize, f64)>]) -> Self {
        assert_eq!(rows.len(), nrows);
        let mut coo = CooBuilder::new(nrows, ncols);
        for (r, row) in rows.iter().enumerate() {
            for &(c, v) in row {
                coo.add(r, c, v);
            }
        }
        coo.build()
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    /// Entry lookup; zero if not stored.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                acc += v * x[*c];
            }
            y[r] = acc;
        }
        y
    }

    /// y = A^T x
    pub fn mul_transpose_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![0.0; self.ncols];
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                y[*c] += v * x[r];
            }
        }
        y
    }

    /// Quadratic form x^T A y.
    pub fn quadratic_form(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nrows);
        let mut acc = 0.0;
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            let mut row_acc = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                row_acc += v * y[*c];
            }
            acc += x[r] * row_acc;
        }
        acc
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut coo = CooBuilder::with_capacity(self.ncols, self.nrows, self.nnz());
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                coo.add(*c, r, *v);
            }
        }
        coo.build()
    }

    /// self + scale * other, patterns merged.
    pub fn add_scaled(&self, other: &SparseMatrix, scale: f64) -> SparseMatrix {
        assert_eq!(self.nrows, other.nrows);
        assert_eq!(self.ncols, other.ncols);
        let mut coo = CooBuilder::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                coo.add(r, *c, *v);
            }
            let (cols, vals) = other.row(r);
            for (c, v) in cols.iter().zip(vals) {
                coo.add(r, *c, scale * *v);
            }
        }
        coo.build()
    }

    pub fn scaled(&self, scale: f64) -> SparseMatrix {
        let mut m = self.clone();
        for v in &mut m.values {
            *v *= scale;
        }
        m
    }

    /// Extract the submatrix with the given rows and columns, in the given
    /// order. `col_pos[c]` must give the new index of retained column `c`,
    /// `usize::MAX` for dropped columns.
    pub fn restrict(&self, rows: &[usize], col_pos: &[usize], new_ncols: usize) -> SparseMatrix {
        assert_eq!(col_pos.len(), self.ncols);
        let mut coo = CooBuilder::new(rows.len(), new_ncols);
        for (new_r, &r) in rows.iter().enumerate() {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                let nc = col_pos[*c];
                if nc != usize::MAX {
                    coo.add(new_r, nc, *v);
                }
            }
        }
        coo.build()
    }

    /// max |A_ij - A_ji| over stored entries; symmetry diagnostic.
    pub fn max_asymmetry(&self) -> f64 {
        assert_eq!(self.nrows, self.ncols);
        let mut worst: f64 = 0.0;
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(*c, r)).abs());
            }
        }
        worst
    }

    pub fn infinity_norm_vec(x: &[f64]) -> f64 {
        x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Coordinate text dump, `i j value` per stored entry, 0-based indices.
    pub fn write_coo(&self, w: &mut impl Write) -> std::io::Result<()> {
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                writeln!(w, "{} {} {:.16e}", r, c, v)?;
            }
        }
        Ok(())
    }

    pub(crate) fn raw(&self) -> (&[usize], &[usize], &[f64]) {
        (&self.row_ptr, &self.col_idx, &self.values)
    }
}

/// Dense vector helpers used throughout the stepping code.
pub mod vec_ops {
    /// a*x + b*y, elementwise.
    pub fn lin_comb(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), y.len());
        x.iter().zip(y).map(|(xi, yi)| a * xi + b * yi).collect()
    }

    pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), y.len());
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += alpha * xi;
        }
    }

    pub fn dot(x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), y.len());
        x.iter().zip(y).map(|(a, b)| a * b).sum()
    }

    pub fn norm2(x: &[f64]) -> f64 {
        dot(x, x).sqrt()
    }
}

/// Validate matching dimensions for a matrix-vector product.
pub fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coo_merges_duplicates_and_sorts() {
        let mut coo = CooBuilder::new(2, 3);
        coo.add(1, 2, 1.0);
        coo.add(0, 1, 2.0);
        coo.add(1, 2, 3.0);
        coo.add(1, 0, -1.0);
        let m = coo.build();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 1), 2.0);
        assert_eq!(m.get(1, 2), 4.0);
        assert_eq!(m.get(1, 0), -1.0);
        assert_eq!(m.get(0, 0), 0.0);
        let (cols, _) = m.row(1);
        assert!(cols.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn empty_rows_are_valid() {
        let mut coo = CooBuilder::new(4, 4);
        coo.add(2, 1, 5.0);
        let m = coo.build();
        assert_eq!(m.row(0).0.len(), 0);
        assert_eq!(m.row(1).0.len(), 0);
        assert_eq!(m.row(2).0.len(), 1);
        assert_eq!(m.row(3).0.len(), 0);
        assert_eq!(m.mul_vec(&[0.0, 2.0, 0.0, 0.0]), vec![0.0, 0.0, 10.0, 0.0]);
    }

    #[test]
    fn transpose_matvec_agrees_with_explicit_transpose() {
        let m = SparseMatrix::from_rows(
            2,
            3,
            &[vec![(0, 1.0), (2, 2.0)], vec![(1, -3.0), (2, 0.5)]],
        );
        let x = [1.0, 2.0];
        let yt = m.mul_transpose_vec(&x);
        let y2 = m.transpose().mul_vec(&x);
        assert_eq!(yt, y2);
    }

    #[test]
    fn restrict_extracts_submatrix() {
        let m = SparseMatrix::from_rows(
            3,
            3,
            &[
                vec![(0, 1.0), (1, 2.0), (2, 3.0)],
                vec![(0, 4.0), (1, 5.0)],
                vec![(2, 6.0)],
            ],
        );
        // keep rows [0,2], columns [0,2] -> positions [0,_,1]
        let col_pos = vec![0, usize::MAX, 1];
        let s = m.restrict(&[0, 2], &col_pos, 2);
        assert_eq!(s.get(0, 0), 1.0);
        assert_eq!(s.get(0, 1), 3.0);
        assert_eq!(s.get(1, 1), 6.0);
        assert_eq!(s.nnz(), 3);
    }

    #[test]
    fn add_scaled_merges_patterns() {
        let a = SparseMatrix::from_rows(2, 2, &[vec![(0, 1.0)], vec![(1, 1.0)]]);
        let b = SparseMatrix::from_rows(2, 2, &[vec![(1, 2.0)], vec![(1, 3.0)]]);
        let c = a.add_scaled(&b, 0.5);
        assert_eq!(c.get(0, 0), 1.0);
        assert_eq!(c.get(0, 1), 1.0);
        assert_eq!(c.get(1, 1), 2.5);
    }
}
