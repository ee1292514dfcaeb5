//! Self-contained sparse linear algebra.
//!
//! Storage is **CSR** (row-major: row pointers, sorted column indices,
//! values); for the symmetric matrices this crate factors, CSR of `A` and CSC
//! of `Aᵀ` coincide, so one layout serves both views. Column indices within a
//! row are strictly increasing and duplicate-free; explicit zeros are kept
//! (pattern and values are decoupled on purpose — symbolic analysis must not
//! depend on cancellation).
//!
//! Submodules add the solver stack: [`ordering`] (natural and exact
//! minimum-degree fill-reducing orderings) and [`cholesky`] (elimination-tree
//! up-looking sparse Cholesky with triangular solves).

pub mod cholesky;
pub mod ordering;

pub use cholesky::{OrderingChoice, SparseCholesky};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use std::io::Write;

/// A sparse matrix in CSR format.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        for &(i, j, _) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::InvalidParameter(format!(
                    "triplet ({i},{j}) outside {nrows}x{ncols}"
                )));
            }
        }
        // counting sort by row, then sort each row by column and merge dups
        let mut counts = vec![0usize; nrows + 1];
        for &(i, _, _) in triplets {
            counts[i + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0f64; triplets.len()];
        for &(i, j, v) in triplets {
            let p = next[i];
            cols[p] = j;
            vals[p] = v;
            next[i] += 1;
        }
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut out_cols = Vec::with_capacity(triplets.len());
        let mut out_vals = Vec::with_capacity(triplets.len());
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for i in 0..nrows {
            scratch.clear();
            scratch.extend(
                cols[counts[i]..counts[i + 1]]
                    .iter()
                    .copied()
                    .zip(vals[counts[i]..counts[i + 1]].iter().copied()),
            );
            // Stable so duplicate columns accumulate in insertion order;
            // symmetric builders (sandwich_diag) rely on mirrored entries
            // summing bit-identical values in the same order.
            scratch.sort_by_key(|&(j, _)| j);
            for &(j, v) in scratch.iter() {
                if out_cols.len() > row_ptr[i] && *out_cols.last().unwrap() == j {
                    *out_vals.last_mut().unwrap() += v;
                } else {
                    out_cols.push(j);
                    out_vals.push(v);
                }
            }
            row_ptr[i + 1] = out_cols.len();
        }
        Ok(SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx: out_cols,
            values: out_vals,
        })
    }

    /// Builds directly from CSR arrays (debug-checked invariants).
    pub fn from_csr(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(row_ptr.len(), nrows + 1);
        debug_assert_eq!(*row_ptr.last().unwrap(), col_idx.len());
        debug_assert_eq!(col_idx.len(), values.len());
        debug_assert!((0..nrows).all(|i| {
            let r = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            r.windows(2).all(|w| w[0] < w[1]) && r.iter().all(|&j| j < ncols)
        }));
        SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Diagonal matrix from a vector.
    pub fn from_diag(d: &[f64]) -> Self {
        let n = d.len();
        SparseMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: d.to_vec(),
        }
    }

    /// Converts a dense matrix, keeping entries with `|v| > drop_tol`.
    pub fn from_dense(m: &DenseMatrix, drop_tol: f64) -> Self {
        let mut trips = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v.abs() > drop_tol {
                    trips.push((i, j, v));
                }
            }
        }
        SparseMatrix::from_triplets(m.nrows(), m.ncols(), &trips).expect("indices in range")
    }

    /// Number of rows.
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    /// Number of columns.
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// Entry `(i, j)`, zero if not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    /// Transpose (CSR → CSR, i.e. an explicit index flip).
    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0f64; self.nnz()];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let p = next[j];
                col_idx[p] = i;
                values[p] = v;
                next[j] += 1;
            }
        }
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr: counts,
            col_idx,
            values,
        }
    }

    /// `alpha · self + beta · other` with pattern union.
    pub fn add_scaled(&self, alpha: f64, other: &SparseMatrix, beta: f64) -> Result<SparseMatrix> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::ShapeMismatch {
                op: "sparse add",
                left_rows: self.nrows,
                left_cols: self.ncols,
                right_rows: other.nrows,
                right_cols: other.ncols,
            });
        }
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.nnz() + other.nnz());
        let mut values = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.nrows {
            let (ac, av) = self.row(i);
            let (bc, bv) = other.row(i);
            let (mut p, mut q) = (0usize, 0usize);
            while p < ac.len() || q < bc.len() {
                let ja = if p < ac.len() { ac[p] } else { usize::MAX };
                let jb = if q < bc.len() { bc[q] } else { usize::MAX };
                if ja < jb {
                    col_idx.push(ja);
                    values.push(alpha * av[p]);
                    p += 1;
                } else if jb < ja {
                    col_idx.push(jb);
                    values.push(beta * bv[q]);
                    q += 1;
                } else {
                    col_idx.push(ja);
                    values.push(alpha * av[p] + beta * bv[q]);
                    p += 1;
                    q += 1;
                }
            }
            row_ptr[i + 1] = col_idx.len();
        }
        Ok(SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// `self + other`.
    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.add_scaled(1.0, other, 1.0)
    }

    /// Scales all values in place.
    pub fn scale(&mut self, alpha: f64) {
        for v in &mut self.values {
            *v *= alpha;
        }
    }

    /// Returns a copy scaled by `alpha`.
    pub fn scaled(&self, alpha: f64) -> SparseMatrix {
        let mut m = self.clone();
        m.scale(alpha);
        m
    }

    /// Scales row `i` by `d[i]` in place (left-multiplication by `diag(d)`).
    pub fn scale_rows(&mut self, d: &[f64]) {
        assert_eq!(d.len(), self.nrows, "row scaling length");
        for i in 0..self.nrows {
            let r = self.row_ptr[i]..self.row_ptr[i + 1];
            for v in &mut self.values[r] {
                *v *= d[i];
            }
        }
    }

    /// Scales column `j` by `d[j]` in place (right-multiplication by `diag(d)`).
    pub fn scale_cols(&mut self, d: &[f64]) {
        assert_eq!(d.len(), self.ncols, "column scaling length");
        for (v, &j) in self.values.iter_mut().zip(&self.col_idx) {
            *v *= d[j];
        }
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "matvec dimension");
        let mut y = vec![0.0; self.nrows];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            y[i] = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
        y
    }

    /// `y = Aᵀ x` without forming the transpose.
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows, "transposed matvec dimension");
        let mut y = vec![0.0; self.ncols];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += v * x[i];
            }
        }
        y
    }

    /// Sparse · sparse product (row-wise SpGEMM with a dense accumulator).
    pub fn matmul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::ShapeMismatch {
                op: "sparse matmul",
                left_rows: self.nrows,
                left_cols: self.ncols,
                right_rows: other.nrows,
                right_cols: other.ncols,
            });
        }
        let mut acc = vec![0.0f64; other.ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.nrows {
            touched.clear();
            let (acols, avals) = self.row(i);
            for (&k, &av) in acols.iter().zip(avals) {
                let (bcols, bvals) = other.row(k);
                for (&j, &bv) in bcols.iter().zip(bvals) {
                    if acc[j] == 0.0 && !touched.contains(&j) {
                        touched.push(j);
                    }
                    acc[j] += av * bv;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                col_idx.push(j);
                values.push(acc[j]);
                acc[j] = 0.0;
            }
            row_ptr[i + 1] = col_idx.len();
        }
        Ok(SparseMatrix {
            nrows: self.nrows,
            ncols: other.ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Sparse · dense product.
    pub fn matmul_dense(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.ncols != other.nrows() {
            return Err(Error::ShapeMismatch {
                op: "sparse-dense matmul",
                left_rows: self.nrows,
                left_cols: self.ncols,
                right_rows: other.nrows(),
                right_cols: other.ncols(),
            });
        }
        let mut out = DenseMatrix::zeros(self.nrows, other.ncols());
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&k, &v) in cols.iter().zip(vals) {
                let brow = other.row(k);
                let orow = out.row_mut(i);
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += v * b;
                }
            }
        }
        Ok(out)
    }

    /// `Bᵀ diag(d) B` for `B = self` (m×n) and `d` of length m.
    ///
    /// Each observation row contributes a small outer product; the result is
    /// exactly symmetric because the (j₁,j₂) and (j₂,j₁) contributions are the
    /// same floating-point products accumulated in the same order.
    pub fn sandwich_diag(&self, d: &[f64]) -> Result<SparseMatrix> {
        if d.len() != self.nrows {
            return Err(Error::ShapeMismatch {
                op: "sandwich_diag",
                left_rows: self.nrows,
                left_cols: self.ncols,
                right_rows: d.len(),
                right_cols: 1,
            });
        }
        let mut trips = Vec::new();
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let di = d[i];
            for (&j1, &v1) in cols.iter().zip(vals) {
                for (&j2, &v2) in cols.iter().zip(vals) {
                    // d·(v₁·v₂) so the mirrored entry is the bit-identical
                    // product (multiplication commutes; association does not).
                    trips.push((j1, j2, di * (v1 * v2)));
                }
            }
        }
        SparseMatrix::from_triplets(self.ncols, self.ncols, &trips)
    }

    /// `(self + selfᵀ) / 2` — removes floating-point symmetry drift.
    pub fn symmetrized(&self) -> Result<SparseMatrix> {
        self.add_scaled(0.5, &self.transpose(), 0.5)
    }

    /// Maximum absolute difference `|A - Aᵀ|`; zero for exactly symmetric input.
    pub fn asymmetry(&self) -> f64 {
        let t = self.transpose();
        match self.add_scaled(1.0, &t, -1.0) {
            Ok(d) => d.max_abs(),
            Err(_) => f64::INFINITY,
        }
    }

    /// Symmetric permutation `P A Pᵀ` where `perm[new] = old`.
    pub fn permute_sym(&self, perm: &[usize]) -> SparseMatrix {
        assert_eq!(self.nrows, self.ncols, "symmetric permutation of square matrix");
        assert_eq!(perm.len(), self.nrows);
        let mut iperm = vec![0usize; self.nrows];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for new_i in 0..self.nrows {
            let (cols, vals) = self.row(perm[new_i]);
            scratch.clear();
            scratch.extend(cols.iter().map(|&j| iperm[j]).zip(vals.iter().copied()));
            scratch.sort_unstable_by_key(|&(j, _)| j);
            for &(j, v) in &scratch {
                col_idx.push(j);
                values.push(v);
            }
            row_ptr[new_i + 1] = col_idx.len();
        }
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Lower triangle including the diagonal.
    pub fn lower_triangle(&self) -> SparseMatrix {
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j <= i {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr[i + 1] = col_idx.len();
        }
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Diagonal entries as a vector.
    pub fn diag(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    /// Row sums.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.nrows).map(|i| self.row(i).1.iter().sum()).collect()
    }

    /// Maximum absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Infinity norm (maximum absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0f64, f64::max)
    }

    /// Dense copy (oracle path).
    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Writes the matrix in plain-text coordinate form: a `row col value`
    /// header, then one 0-based entry per line with 17 significant digits.
    pub fn write_coord<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "row col value")?;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                writeln!(w, "{i} {j} {v:.16e}")?;
            }
        }
        Ok(())
    }
}

/// Kronecker product `A ⊗ B`: entry `((i₁·Bm+i₂),(j₁·Bn+j₂)) = A(i₁,j₁)·B(i₂,j₂)`.
pub fn kron(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    let nrows = a
        .nrows
        .checked_mul(b.nrows)
        .ok_or(Error::DimensionOverflow(a.nrows, b.nrows))?;
    let ncols = a
        .ncols
        .checked_mul(b.ncols)
        .ok_or(Error::DimensionOverflow(a.ncols, b.ncols))?;
    let nnz = a
        .nnz()
        .checked_mul(b.nnz())
        .ok_or(Error::DimensionOverflow(a.nnz(), b.nnz()))?;
    let mut row_ptr = Vec::with_capacity(nrows + 1);
    row_ptr.push(0);
    let mut col_idx = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    for i1 in 0..a.nrows {
        let (ac, av) = a.row(i1);
        for i2 in 0..b.nrows {
            let (bc, bv) = b.row(i2);
            for (&j1, &va) in ac.iter().zip(av) {
                for (&j2, &vb) in bc.iter().zip(bv) {
                    col_idx.push(j1 * b.ncols + j2);
                    values.push(va * vb);
                }
            }
            row_ptr.push(col_idx.len());
        }
    }
    debug_assert_eq!(col_idx.len(), nnz);
    Ok(SparseMatrix {
        nrows,
        ncols,
        row_ptr,
        col_idx,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_kron_oracle(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(a.nrows() * b.nrows(), a.ncols() * b.ncols());
        for i1 in 0..a.nrows() {
            for j1 in 0..a.ncols() {
                for i2 in 0..b.nrows() {
                    for j2 in 0..b.ncols() {
                        out[(i1 * b.nrows() + i2, j1 * b.ncols() + j2)] =
                            a[(i1, j1)] * b[(i2, j2)];
                    }
                }
            }
        }
        out
    }

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let m = SparseMatrix::from_triplets(2, 3, &[(1, 2, 1.0), (0, 1, 2.0), (1, 2, 0.5)])
            .unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(1, 2), 1.5);
        assert_eq!(m.get(0, 1), 2.0);
        assert_eq!(m.get(0, 0), 0.0);
    }

    #[test]
    fn triplets_out_of_range_rejected() {
        assert!(SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn transpose_roundtrip() {
        let m = SparseMatrix::from_triplets(2, 3, &[(0, 2, 3.0), (1, 0, -1.0), (1, 1, 4.0)])
            .unwrap();
        let tt = m.transpose().transpose();
        assert_eq!(m, tt);
        assert_eq!(m.transpose().get(2, 0), 3.0);
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = SparseMatrix::identity(2);
        let i3 = SparseMatrix::identity(3);
        let k = kron(&i2, &i3).unwrap();
        assert_eq!(k, SparseMatrix::identity(6));
    }

    #[test]
    fn kron_with_scalar_diag_scales() {
        let d = SparseMatrix::from_diag(&[2.0]);
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, -3.0), (1, 1, 5.0)])
            .unwrap();
        let k = kron(&d, &m).unwrap();
        assert_eq!(k.nrows(), 2);
        assert_eq!(k.get(0, 1), -6.0);
        assert_eq!(k.get(1, 1), 10.0);
    }

    #[test]
    fn add_and_scale_match_dense() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 0, 2.0)]).unwrap();
        let b = SparseMatrix::from_triplets(2, 2, &[(0, 0, -1.0), (0, 1, 4.0)]).unwrap();
        let c = a.add_scaled(2.0, &b, 0.5).unwrap();
        assert_eq!(c.get(0, 0), 1.5);
        assert_eq!(c.get(0, 1), 2.0);
        assert_eq!(c.get(1, 0), 4.0);
    }

    #[test]
    fn sandwich_identity_with_unit_diag_is_identity() {
        let b = SparseMatrix::identity(4);
        let s = b.sandwich_diag(&[1.0; 4]).unwrap();
        assert_eq!(s, SparseMatrix::identity(4));
    }

    #[test]
    fn matvec_and_transpose_agree_with_dense() {
        let m = SparseMatrix::from_triplets(3, 2, &[(0, 0, 1.0), (1, 1, -2.0), (2, 0, 0.5)])
            .unwrap();
        let d = m.to_dense();
        let x = [1.5, -0.5];
        let y = m.matvec(&x);
        let yd = d.matvec(&x);
        assert_eq!(y, yd);
        let z = [1.0, 2.0, 3.0];
        let w = m.matvec_transpose(&z);
        let wd = d.transpose().matvec(&z);
        assert_eq!(w, wd);
    }

    #[test]
    fn permute_sym_is_papt() {
        let a = SparseMatrix::from_triplets(
            3,
            3,
            &[(0, 0, 1.0), (1, 1, 2.0), (2, 2, 3.0), (0, 2, 5.0), (2, 0, 5.0)],
        )
        .unwrap();
        let perm = [2, 0, 1];
        let p = a.permute_sym(&perm);
        for new_i in 0..3 {
            for new_j in 0..3 {
                assert_eq!(p.get(new_i, new_j), a.get(perm[new_i], perm[new_j]));
            }
        }
    }

    #[test]
    fn coord_dump_has_header_and_17_digits() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0 / 3.0)]).unwrap();
        let mut buf = Vec::new();
        m.write_coord(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "row col value");
        let entry = lines.next().unwrap();
        assert!(entry.starts_with("0 1 3.3333333333333331e-1"), "{entry}");
    }

    proptest! {
        #[test]
        fn prop_matmul_matches_dense(seed in 0u64..500) {
            // small random sparse pair with compatible shapes
            let mut s = seed;
            let mut rnd = move || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) as usize };
            let (m, k, n) = (1 + rnd() % 5, 1 + rnd() % 5, 1 + rnd() % 5);
            let mut ta = Vec::new();
            let mut tb = Vec::new();
            for _ in 0..(rnd() % 8) {
                ta.push((rnd() % m, rnd() % k, (rnd() % 9) as f64 - 4.0));
            }
            for _ in 0..(rnd() % 8) {
                tb.push((rnd() % k, rnd() % n, (rnd() % 9) as f64 - 4.0));
            }
            let a = SparseMatrix::from_triplets(m, k, &ta).unwrap();
            let b = SparseMatrix::from_triplets(k, n, &tb).unwrap();
            let c = a.matmul(&b).unwrap();
            let cd = a.to_dense().matmul(&b.to_dense()).unwrap();
            for i in 0..m {
                for j in 0..n {
                    prop_assert!((c.get(i, j) - cd[(i, j)]).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn prop_kron_matches_dense_oracle(seed in 0u64..300) {
            let mut s = seed.wrapping_add(7);
            let mut rnd = move || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) as usize };
            let (ma, na, mb, nb) = (1 + rnd() % 3, 1 + rnd() % 3, 1 + rnd() % 3, 1 + rnd() % 3);
            let mut ta = Vec::new();
            let mut tb = Vec::new();
            for _ in 0..(rnd() % 6) {
                ta.push((rnd() % ma, rnd() % na, (rnd() % 7) as f64 - 3.0));
            }
            for _ in 0..(rnd() % 6) {
                tb.push((rnd() % mb, rnd() % nb, (rnd() % 7) as f64 - 3.0));
            }
            let a = SparseMatrix::from_triplets(ma, na, &ta).unwrap();
            let b = SparseMatrix::from_triplets(mb, nb, &tb).unwrap();
            let k = kron(&a, &b).unwrap();
            let oracle = dense_kron_oracle(&a.to_dense(), &b.to_dense());
            for i in 0..k.nrows() {
                for j in 0..k.ncols() {
                    prop_assert!((k.get(i, j) - oracle[(i, j)]).abs() < 1e-12);
                }
            }
            // nnz bound: counts products of stored entries (explicit zeros kept)
            prop_assert_eq!(k.nnz(), a.nnz() * b.nnz());
        }

        #[test]
        fn prop_sandwich_matches_dense(seed in 0u64..300) {
            let mut s = seed.wrapping_add(99);
            let mut rnd = move || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) as usize };
            let (m, n) = (1 + rnd() % 5, 1 + rnd() % 4);
            let mut tb = Vec::new();
            for _ in 0..(rnd() % 10) {
                tb.push((rnd() % m, rnd() % n, (rnd() % 9) as f64 - 4.0));
            }
            let b = SparseMatrix::from_triplets(m, n, &tb).unwrap();
            let d: Vec<f64> = (0..m).map(|i| 0.25 + (i % 3) as f64).collect();
            let s1 = b.sandwich_diag(&d).unwrap();
            let bd = b.to_dense();
            let mut dd = DenseMatrix::zeros(m, m);
            for i in 0..m { dd[(i, i)] = d[i]; }
            let oracle = bd.transpose().matmul(&dd).unwrap().matmul(&bd).unwrap();
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((s1.get(i, j) - oracle[(i, j)]).abs() < 1e-12);
                }
            }
            prop_assert!(s1.asymmetry() == 0.0);
        }
    }
}
