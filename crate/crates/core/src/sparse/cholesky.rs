//! Sparse Cholesky factorization `P A Pᵀ = L Lᵀ`.
//!
//! Up-looking simplicial algorithm: the elimination tree of the permuted
//! matrix gives each row's nonzero pattern (`ereach`), a symbolic pass counts
//! column sizes, and the numeric pass fills the factor column by column. The
//! factor is stored as the CSR form of `Lᵀ` (equivalently CSC of `L`), which
//! is exactly the access pattern both triangular solves want.
//!
//! Positive definiteness is enforced through the shared relative pivot
//! tolerance [`crate::dense::PIVOT_REL_TOL`]: a pivot `d ≤ tol · max diag`
//! aborts with [`Error::NotPositiveDefinite`].

use super::ordering::min_degree;
use super::SparseMatrix;
use crate::dense::{DenseMatrix, PIVOT_REL_TOL};
use crate::error::{Error, Result};

/// Row/column ordering used before factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingChoice {
    /// Identity permutation.
    Natural,
    /// Exact minimum-degree (fill-reducing), deterministic tie-breaking.
    MinDegree,
}

/// A factored SPD matrix: permutation plus lower-triangular factor.
#[derive(Debug, Clone)]
pub struct SparseCholesky {
    n: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    /// CSR of `Lᵀ`: row `j` holds column `j` of `L` (diagonal entry first).
    lt: SparseMatrix,
}

const NONE: usize = usize::MAX;

impl SparseCholesky {
    /// Factors a symmetric positive definite matrix.
    ///
    /// Symmetry is verified (structure and values, tolerance
    /// `1e-10 · max|A|`) before any work is done.
    pub fn factor(a: &SparseMatrix, ordering: OrderingChoice) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::ShapeMismatch {
                op: "sparse cholesky",
                left_rows: a.nrows(),
                left_cols: a.ncols(),
                right_rows: a.nrows(),
                right_cols: a.ncols(),
            });
        }
        let asym = a.asymmetry();
        if asym > 1e-10 * a.max_abs().max(1e-300) {
            return Err(Error::AsymmetricInput { max_diff: asym });
        }
        let n = a.nrows();
        let perm = match ordering {
            OrderingChoice::Natural => (0..n).collect::<Vec<_>>(),
            OrderingChoice::MinDegree => min_degree(a),
        };
        let ap = a.permute_sym(&perm);

        let max_diag = ap.diag().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = PIVOT_REL_TOL * max_diag;

        // elimination tree from the strictly-lower pattern (row-by-row climbs
        // with path compression through `ancestor`)
        let mut parent = vec![NONE; n];
        let mut ancestor = vec![NONE; n];
        for k in 0..n {
            let (cols, _) = ap.row(k);
            for &j in cols.iter().take_while(|&&j| j < k) {
                let mut i = j;
                while i != NONE && i < k {
                    let next = ancestor[i];
                    ancestor[i] = k;
                    if next == NONE {
                        parent[i] = k;
                        break;
                    }
                    i = next;
                }
            }
        }

        // symbolic pass: column counts of L via ereach
        let mut mark = vec![0usize; n];
        let mut stamp = 0usize;
        let mut stack = vec![0usize; n];
        let mut pattern = vec![0usize; n];
        let mut counts = vec![1usize; n]; // diagonal
        for k in 0..n {
            stamp += 1;
            let top = ereach(&ap, k, &parent, &mut mark, stamp, &mut stack, &mut pattern);
            for &j in &pattern[top..n] {
                counts[j] += 1;
            }
        }

        // numeric pass
        let mut col_ptr = vec![0usize; n + 1];
        for j in 0..n {
            col_ptr[j + 1] = col_ptr[j] + counts[j];
        }
        let nnz = col_ptr[n];
        let mut rows = vec![0usize; nnz];
        let mut vals = vec![0.0f64; nnz];
        let mut next = col_ptr[..n].to_vec();
        let mut x = vec![0.0f64; n];
        for k in 0..n {
            stamp += 1;
            let top = ereach(&ap, k, &parent, &mut mark, stamp, &mut stack, &mut pattern);
            // scatter row k of the lower triangle of A
            let (cols, avals) = ap.row(k);
            let mut d = 0.0;
            for (&j, &v) in cols.iter().zip(avals) {
                if j < k {
                    x[j] = v;
                } else if j == k {
                    d = v;
                }
            }
            // sparse triangular solve along the etree pattern
            for &j in &pattern[top..n] {
                let ljj = vals[col_ptr[j]];
                let lkj = x[j] / ljj;
                x[j] = 0.0;
                for p in (col_ptr[j] + 1)..next[j] {
                    x[rows[p]] -= vals[p] * lkj;
                }
                d -= lkj * lkj;
                let p = next[j];
                rows[p] = k;
                vals[p] = lkj;
                next[j] += 1;
            }
            if d <= tol {
                return Err(Error::NotPositiveDefinite {
                    index: k,
                    pivot: d,
                    tolerance: tol,
                });
            }
            let p = next[k];
            rows[p] = k;
            vals[p] = d.sqrt();
            next[k] += 1;
        }
        debug_assert!((0..n).all(|j| next[j] == col_ptr[j + 1]));

        let lt = SparseMatrix::from_csr(n, n, col_ptr, rows, vals);
        Ok(SparseCholesky { n, perm, lt })
    }

    /// Dimension of the factored matrix.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The permutation used (`perm[new] = old`).
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Number of stored entries in `L` (including the diagonal).
    pub fn nnz_l(&self) -> usize {
        self.lt.nnz()
    }

    /// The lower-triangular factor `L` as a CSR matrix (rows of `L`).
    pub fn lower(&self) -> SparseMatrix {
        self.lt.transpose()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n, "rhs length");
        let mut x: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        self.solve_permuted_in_place(&mut x);
        let mut out = vec![0.0; self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = x[new];
        }
        out
    }

    /// Solves `A X = B` column by column for a dense right-hand side.
    pub fn solve_matrix(&self, b: &DenseMatrix) -> DenseMatrix {
        assert_eq!(b.nrows(), self.n, "rhs rows");
        let mut out = DenseMatrix::zeros(b.nrows(), b.ncols());
        let mut col = vec![0.0; self.n];
        for j in 0..b.ncols() {
            for i in 0..self.n {
                col[i] = b[(i, j)];
            }
            let x = self.solve(&col);
            for i in 0..self.n {
                out[(i, j)] = x[i];
            }
        }
        out
    }

    /// In-place forward+backward substitution in permuted coordinates.
    fn solve_permuted_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        // forward: L y = x, using columns of L (rows of lt)
        for j in 0..n {
            let (rows, vals) = self.lt.row(j);
            // first entry is the diagonal
            let yj = x[j] / vals[0];
            x[j] = yj;
            for (&i, &v) in rows.iter().zip(vals).skip(1) {
                x[i] -= v * yj;
            }
        }
        // backward: Lᵀ z = y
        for j in (0..n).rev() {
            let (rows, vals) = self.lt.row(j);
            let mut acc = x[j];
            for (&i, &v) in rows.iter().zip(vals).skip(1) {
                acc -= v * x[i];
            }
            x[j] = acc / vals[0];
        }
    }
}

/// Nonzero pattern of row `k` of `L` in elimination-tree topological order.
///
/// Returns `top`; the pattern is `pattern[top..n]`. `mark`/`stamp` implement
/// O(1) set membership without clearing between calls.
fn ereach(
    ap: &SparseMatrix,
    k: usize,
    parent: &[usize],
    mark: &mut [usize],
    stamp: usize,
    stack: &mut [usize],
    pattern: &mut [usize],
) -> usize {
    let n = ap.nrows();
    let mut top = n;
    mark[k] = stamp;
    let (cols, _) = ap.row(k);
    for &j in cols.iter().take_while(|&&j| j < k) {
        let mut i = j;
        let mut len = 0usize;
        while mark[i] != stamp {
            stack[len] = i;
            len += 1;
            mark[i] = stamp;
            i = parent[i];
            if i == NONE {
                break;
            }
        }
        while len > 0 {
            len -= 1;
            top -= 1;
            pattern[top] = stack[len];
        }
    }
    top
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::ordering::test_support::grid_laplacian;
    use proptest::prelude::*;

    #[test]
    fn tridiagonal_pivots_match_hand_elimination() {
        // [-1 2 -1] on n=4: squared pivots 2, 3/2, 4/3, 5/4 (natural order)
        let a = SparseMatrix::from_triplets(
            4,
            4,
            &[
                (0, 0, 2.0),
                (1, 1, 2.0),
                (2, 2, 2.0),
                (3, 3, 2.0),
                (0, 1, -1.0),
                (1, 0, -1.0),
                (1, 2, -1.0),
                (2, 1, -1.0),
                (2, 3, -1.0),
                (3, 2, -1.0),
            ],
        )
        .unwrap();
        let f = SparseCholesky::factor(&a, OrderingChoice::Natural).unwrap();
        let l = f.lower();
        let expected = [2.0, 1.5, 4.0 / 3.0, 1.25];
        for (i, e) in expected.iter().enumerate() {
            let lii = l.get(i, i);
            assert!((lii * lii - e).abs() < 1e-14, "pivot {i}");
        }
    }

    #[test]
    fn factor_reconstructs_permuted_matrix() {
        let a = grid_laplacian(8);
        for ordering in [OrderingChoice::Natural, OrderingChoice::MinDegree] {
            let f = SparseCholesky::factor(&a, ordering).unwrap();
            let l = f.lower();
            let llt = l.matmul(&l.transpose()).unwrap();
            let pap = a.permute_sym(f.perm());
            let diff = llt.add_scaled(1.0, &pap, -1.0).unwrap().max_abs();
            assert!(diff <= 1e-12 * a.inf_norm(), "reconstruction {diff}");
        }
    }

    #[test]
    fn solve_matches_dense_oracle() {
        let a = grid_laplacian(6);
        let n = a.nrows();
        let b: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let dense = a.to_dense();
        let x_oracle = dense.lu_solve(&b).unwrap();
        for ordering in [OrderingChoice::Natural, OrderingChoice::MinDegree] {
            let f = SparseCholesky::factor(&a, ordering).unwrap();
            let x = f.solve(&b);
            for (u, v) in x.iter().zip(&x_oracle) {
                assert!((u - v).abs() < 1e-10, "{u} vs {v}");
            }
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 1, 2.0)])
            .unwrap();
        assert!(matches!(
            SparseCholesky::factor(&a, OrderingChoice::Natural),
            Err(Error::AsymmetricInput { .. })
        ));
    }

    #[test]
    fn rejects_indefinite_with_pivot_index() {
        let a = SparseMatrix::from_triplets(
            2,
            2,
            &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)],
        )
        .unwrap();
        match SparseCholesky::factor(&a, OrderingChoice::Natural) {
            Err(Error::NotPositiveDefinite { index, pivot, .. }) => {
                assert_eq!(index, 1);
                assert!(pivot < 0.0);
            }
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn solve_matrix_handles_multiple_rhs() {
        let a = grid_laplacian(4);
        let n = a.nrows();
        let f = SparseCholesky::factor(&a, OrderingChoice::MinDegree).unwrap();
        let mut b = DenseMatrix::zeros(n, 2);
        for i in 0..n {
            b[(i, 0)] = 1.0;
            b[(i, 1)] = i as f64;
        }
        let x = f.solve_matrix(&b);
        let r0 = a.matvec(&(0..n).map(|i| x[(i, 0)]).collect::<Vec<_>>());
        for v in r0 {
            assert!((v - 1.0).abs() < 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn prop_random_spd_solve_matches_dense(seed in 0u64..10_000) {
            // SPD via M Mᵀ + n·I on a random sparse square M
            let mut s = seed.wrapping_add(1234);
            let mut rnd = move || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 33) as usize
            };
            let n = 2 + rnd() % 20;
            let mut trips = Vec::new();
            for _ in 0..(2 * n) {
                trips.push((rnd() % n, rnd() % n, ((rnd() % 19) as f64 - 9.0) / 3.0));
            }
            let m = SparseMatrix::from_triplets(n, n, &trips).unwrap();
            let a = m
                .matmul(&m.transpose())
                .unwrap()
                .add(&SparseMatrix::from_diag(&vec![n as f64; n]))
                .unwrap();
            let b: Vec<f64> = (0..n).map(|i| ((i * 13 + 5) % 17) as f64 - 8.0).collect();
            let oracle = a.to_dense().lu_solve(&b).unwrap();
            for ordering in [OrderingChoice::Natural, OrderingChoice::MinDegree] {
                let f = SparseCholesky::factor(&a, ordering).unwrap();
                let x = f.solve(&b);
                for (u, v) in x.iter().zip(&oracle) {
                    prop_assert!((u - v).abs() < 1e-9 * (1.0 + v.abs()));
                }
            }
        }
    }
}
