//! Dense matrices: the oracle path and the exact-method workhorse.
//!
//! Row-major storage. Used for exact kriging (m×m covariance systems), the
//! process-convolution normal equations, dense reference solutions in tests,
//! and the occasional exact `C⁻¹` in the Markov construction. Kept free of
//! external linear-algebra crates so the sparse code can be validated against
//! a genuinely independent implementation.

use crate::error::{Error, Result};

/// Relative pivot tolerance shared by the dense and sparse Cholesky routines:
/// a pivot `<= 1e-12 · max diag(A)` is treated as loss of positive definiteness.
pub const PIVOT_REL_TOL: f64 = 1e-12;

/// A dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseMatrix {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds from a row-major buffer.
    pub fn from_rows(nrows: usize, ncols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), nrows * ncols, "buffer length mismatch");
        DenseMatrix { nrows, ncols, data }
    }

    /// Number of rows.
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    /// Number of columns.
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    /// Mutable row `i`.
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    /// Underlying row-major buffer.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Multiplies every entry by `s` in place.
    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    /// `alpha·self + beta·other`, elementwise.
    pub fn add_scaled(&self, alpha: f64, other: &DenseMatrix, beta: f64) -> Result<DenseMatrix> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::ShapeMismatch {
                op: "dense add_scaled",
                left_rows: self.nrows,
                left_cols: self.ncols,
                right_rows: other.nrows,
                right_cols: other.ncols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| alpha * a + beta * b)
            .collect();
        Ok(DenseMatrix::from_rows(self.nrows, self.ncols, data))
    }

    /// Transpose.
    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `self · other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::ShapeMismatch {
                op: "dense matmul",
                left_rows: self.nrows,
                left_cols: self.ncols,
                right_rows: other.nrows,
                right_cols: other.ncols,
            });
        }
        let mut out = DenseMatrix::zeros(self.nrows, other.ncols);
        // i-k-j loop order: the inner update runs over contiguous rows of
        // `other` and `out`, which vectorizes well.
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let aik = self[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                let brow = other.row(k);
                let orow = &mut out.data[i * other.ncols..(i + 1) * other.ncols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += aik * b;
                }
            }
        }
        Ok(out)
    }

    /// `self · x` for a vector.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "matvec dimension");
        (0..self.nrows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .map(|(&a, &b)| a * b)
                    .sum::<f64>()
            })
            .collect()
    }

    /// Maximum absolute entry of `A - Aᵀ`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            for j in (i + 1)..self.ncols.min(self.nrows) {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
    ///
    /// Row-oriented: each `L[i][j]` is a dot product of two contiguous row
    /// prefixes, so the factorization streams well through cache.
    pub fn cholesky(&self) -> Result<DenseMatrix> {
        assert_eq!(self.nrows, self.ncols, "cholesky needs a square matrix");
        let n = self.nrows;
        let max_diag = (0..n).fold(0.0f64, |m, i| m.max(self[(i, i)].abs()));
        let tol = PIVOT_REL_TOL * max_diag;
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            let lrow_j = &l.data[j * n..j * n + j];
            d -= lrow_j.iter().map(|v| v * v).sum::<f64>();
            if d <= tol {
                return Err(Error::NotPositiveDefinite {
                    index: j,
                    pivot: d,
                    tolerance: tol,
                });
            }
            let ljj = d.sqrt();
            l[(j, j)] = ljj;
            for i in (j + 1)..n {
                let (head, tail) = l.data.split_at(i * n);
                let lrow_j = &head[j * n..j * n + j];
                let lrow_i = &tail[..j];
                let dot: f64 = lrow_i.iter().zip(lrow_j).map(|(a, b)| a * b).sum();
                l.data[i * n + j] = (self[(i, j)] - dot) / ljj;
            }
        }
        Ok(l)
    }

    /// Solves `A x = b` given the Cholesky factor `self = L` (lower triangular).
    pub fn cholesky_solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.nrows;
        assert_eq!(b.len(), n, "rhs length");
        let mut x = b.to_vec();
        // forward: L y = b
        for i in 0..n {
            let dot: f64 = self.row(i)[..i].iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - dot) / self[(i, i)];
        }
        // backward: Lᵀ x = y  (column access on L = row access on Lᵀ)
        for i in (0..n).rev() {
            let mut v = x[i];
            for k in (i + 1)..n {
                v -= self[(k, i)] * x[k];
            }
            x[i] = v / self[(i, i)];
        }
        x
    }

    /// `L · z` for a lower-triangular factor (used to color white noise).
    pub fn lower_tri_mul(&self, z: &[f64]) -> Vec<f64> {
        let n = self.nrows;
        assert_eq!(z.len(), n);
        (0..n)
            .map(|i| {
                self.row(i)[..=i]
                    .iter()
                    .zip(&z[..=i])
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// LU factorization with partial pivoting; returns `(lu, perm)` where the
    /// strictly lower part of `lu` holds `L` (unit diagonal implied) and the
    /// upper part holds `U`. `perm[i]` is the original row now in position `i`.
    pub fn lu(&self) -> Result<(DenseMatrix, Vec<usize>)> {
        assert_eq!(self.nrows, self.ncols, "lu needs a square matrix");
        let n = self.nrows;
        let mut lu = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (pivot_row, pivot_abs) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty pivot search");
            if pivot_abs == 0.0 {
                return Err(Error::NotPositiveDefinite {
                    index: k,
                    pivot: 0.0,
                    tolerance: 0.0,
                });
            }
            if pivot_row != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
                perm.swap(k, pivot_row);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != 0.0 {
                    let (upper, lower) = lu.data.split_at_mut(i * n);
                    let krow = &upper[k * n..(k + 1) * n];
                    let irow = &mut lower[..n];
                    for j in (k + 1)..n {
                        irow[j] -= factor * krow[j];
                    }
                }
            }
        }
        Ok((lu, perm))
    }

    /// Solves `A x = b` through the partial-pivot LU factorization.
    pub fn lu_solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let (lu, perm) = self.lu()?;
        Ok(lu_solve_factored(&lu, &perm, b))
    }

    /// Inverse via LU; oracle-path only (O(n³) with n solves).
    pub fn inverse(&self) -> Result<DenseMatrix> {
        let n = self.nrows;
        let (lu, perm) = self.lu()?;
        let mut inv = DenseMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = lu_solve_factored(&lu, &perm, &e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
            e[j] = 0.0;
        }
        Ok(inv)
    }

    /// Eigenvalues of a symmetric matrix by the cyclic Jacobi method,
    /// ascending. Oracle-path only; O(n³) per sweep, fine for test sizes.
    pub fn sym_eigenvalues(&self) -> Vec<f64> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut a = self.clone();
        let max_sweeps = 64;
        for _ in 0..max_sweeps {
            let mut off = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
            if off.sqrt() < 1e-14 * (1.0 + a.frobenius()) {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        eig.sort_by(|a, b| a.total_cmp(b));
        eig
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Maximum absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.ncols + j]
    }
}

fn lu_solve_factored(lu: &DenseMatrix, perm: &[usize], b: &[f64]) -> Vec<f64> {
    let n = lu.nrows();
    let mut x: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for i in 1..n {
        let dot: f64 = lu.row(i)[..i].iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
        x[i] -= dot;
    }
    for i in (0..n).rev() {
        let mut v = x[i];
        for k in (i + 1)..n {
            v -= lu[(i, k)] * x[k];
        }
        x[i] = v / lu[(i, i)];
    }
    x
}
