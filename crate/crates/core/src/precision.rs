//! Weight precision matrices for the Markov (SPDE) field approximations.
//!
//! For a basis system with mass matrix `C` and stiffness matrix `G`, the
//! stochastic weights get precision
//!
//! ```text
//! K   = κ² C + G
//! Q₁  = φ⁻² K
//! Q₂  = φ⁻² K C⁻¹ K
//! Q_α = K C⁻¹ Q_{α-2} C⁻¹ K,     α = ν + d/2 ∈ {1, .., 5}
//! ```
//!
//! Replacing `C⁻¹` keeps `Q` sparse: [`CInvMode::Lumped`] uses the inverse of
//! the row-sum diagonal (the Markov-approximated spline method),
//! [`CInvMode::Identity`] uses `I` (DB3, where `C = I` exactly), and
//! [`CInvMode::ExactDense`] keeps the true dense inverse as an oracle path.
//! All products are assembled in palindromic form so `Q` is exactly symmetric
//! and positive definite by construction.

use crate::basis::{BasisFamily, BasisSystem};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::matern::MaternParams;
use crate::points::Points;
use crate::sparse::cholesky::{OrderingChoice, SparseCholesky};
use crate::sparse::SparseMatrix;

/// How the recursion replaces the inverse mass matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CInvMode {
    /// True dense inverse; reference/oracle path, dense cost.
    ExactDense,
    /// Inverse of the mass-lumped diagonal (row sums of `C`).
    Lumped,
    /// Identity; valid only for the orthonormal DB3 family.
    Identity,
}

/// The precision matrix, sparse for the Markov modes, dense for the oracle mode.
#[derive(Clone, Debug)]
pub enum QMatrix {
    Sparse(SparseMatrix),
    Dense(DenseMatrix),
}

impl QMatrix {
    /// Matrix dimension.
    pub fn n(&self) -> usize {
        match self {
            QMatrix::Sparse(q) => q.nrows(),
            QMatrix::Dense(q) => q.nrows(),
        }
    }

    /// The sparse matrix, if this is the sparse variant.
    pub fn as_sparse(&self) -> Option<&SparseMatrix> {
        match self {
            QMatrix::Sparse(q) => Some(q),
            QMatrix::Dense(_) => None,
        }
    }

    /// The dense representation, if this precision was built densely.
    pub fn as_dense(&self) -> Option<&DenseMatrix> {
        match self {
            QMatrix::Sparse(_) => None,
            QMatrix::Dense(q) => Some(q),
        }
    }
}

/// A built weight-precision model.
#[derive(Clone, Debug)]
pub struct PrecisionModel {
    params: MaternParams,
    alpha: u32,
    c_inv_mode: CInvMode,
    q: QMatrix,
}

impl PrecisionModel {
    /// The Matérn parameters the model was built for.
    pub fn params(&self) -> &MaternParams {
        &self.params
    }

    /// The SPDE order `α = ν + d/2`.
    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    /// Which inverse-mass replacement built this model.
    pub fn c_inv_mode(&self) -> CInvMode {
        self.c_inv_mode
    }

    /// The precision matrix.
    pub fn q(&self) -> &QMatrix {
        &self.q
    }
}

/// `α = ν + d/2`, validated to be an integer in `1..=5`.
pub fn alpha_for(nu: f64, dim: usize) -> Result<u32> {
    let alpha = nu + dim as f64 / 2.0;
    let rounded = alpha.round();
    if (alpha - rounded).abs() > 1e-9 {
        return Err(Error::AlphaNotInteger(alpha));
    }
    let as_int = rounded as i64;
    if !(1..=5).contains(&as_int) {
        return Err(Error::AlphaOutOfRange(as_int.max(0) as u32));
    }
    Ok(as_int as u32)
}

/// `K = κ² C + G`.
pub fn build_k(basis: &BasisSystem, kappa: f64) -> Result<SparseMatrix> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kappa = {kappa} must be > 0"
        )));
    }
    basis.c().add_scaled(kappa * kappa, basis.g(), 1.0)
}

/// Builds `Q_α` for the basis and parameters under the chosen `C⁻¹` mode.
pub fn build_q(
    basis: &BasisSystem,
    params: &MaternParams,
    c_inv_mode: CInvMode,
) -> Result<PrecisionModel> {
    if params.dim != basis.spec().dim() {
        return Err(Error::InvalidParameter(format!(
            "parameter dimension {} does not match basis dimension {}",
            params.dim,
            basis.spec().dim()
        )));
    }
    if c_inv_mode == CInvMode::Identity && basis.spec().family() != BasisFamily::Db3 {
        return Err(Error::InvalidParameter(
            "identity C-inverse is only exact for the DB3 family".to_string(),
        ));
    }
    let alpha = alpha_for(params.nu, params.dim)?;
    let k = build_k(basis, params.kappa)?;
    let phi_inv2 = 1.0 / (params.phi * params.phi);
    let q = if alpha == 1 {
        // No C⁻¹ appears at first order; every mode agrees and stays sparse.
        QMatrix::Sparse(k.scaled(phi_inv2))
    } else {
        match c_inv_mode {
            CInvMode::ExactDense => QMatrix::Dense(dense_q(basis, &k, alpha, phi_inv2)?),
            CInvMode::Lumped | CInvMode::Identity => {
                let d_inv = diagonal_inverse(basis, c_inv_mode)?;
                QMatrix::Sparse(sparse_q(&k, &d_inv, alpha, phi_inv2)?)
            }
        }
    };
    Ok(PrecisionModel {
        params: *params,
        alpha,
        c_inv_mode,
        q,
    })
}

/// The diagonal standing in for `C⁻¹`, validated strictly positive.
fn diagonal_inverse(basis: &BasisSystem, mode: CInvMode) -> Result<Vec<f64>> {
    match mode {
        CInvMode::Identity => Ok(vec![1.0; basis.n_basis()]),
        CInvMode::Lumped => basis
            .c_lumped()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v > 0.0 {
                    Ok(1.0 / v)
                } else {
                    Err(Error::InvalidParameter(format!(
                        "lumped mass entry {v} at index {i} is not positive"
                    )))
                }
            })
            .collect(),
        CInvMode::ExactDense => unreachable!("dense mode never lumps"),
    }
}

/// Sparse `Q_α = φ⁻² (K D)^{α-1} K` with diagonal `D`, assembled in
/// palindromic form: even `α` as `Aᵀ D A` with `A = K N^{α/2-1}` and odd `α`
/// as `Wᵀ K W` with `W = N^{(α-1)/2}`, where `N = D K`.
fn sparse_q(k: &SparseMatrix, d_inv: &[f64], alpha: u32, phi_inv2: f64) -> Result<SparseMatrix> {
    let mut n_mat = k.clone();
    n_mat.scale_rows(d_inv);
    let power = |exp: u32| -> Result<SparseMatrix> {
        let mut acc = SparseMatrix::identity(k.nrows());
        for _ in 0..exp {
            acc = acc.matmul(&n_mat)?;
        }
        Ok(acc)
    };
    let q = if alpha % 2 == 0 {
        let a = k.matmul(&power(alpha / 2 - 1)?)?;
        a.sandwich_diag(d_inv)?
    } else {
        let w = power((alpha - 1) / 2)?;
        w.transpose().matmul(&k.matmul(&w)?)?.symmetrized()?
    };
    Ok(q.scaled(phi_inv2))
}

/// Dense oracle recursion with the true `C⁻¹`.
fn dense_q(
    basis: &BasisSystem,
    k: &SparseMatrix,
    alpha: u32,
    phi_inv2: f64,
) -> Result<DenseMatrix> {
    let kd = k.to_dense();
    let c_inv = basis.c().to_dense().inverse()?;
    let n_mat = c_inv.matmul(&kd)?;
    let power = |exp: u32| -> Result<DenseMatrix> {
        let mut acc = DenseMatrix::identity(kd.nrows());
        for _ in 0..exp {
            acc = acc.matmul(&n_mat)?;
        }
        Ok(acc)
    };
    let mut q = if alpha % 2 == 0 {
        let a = kd.matmul(&power(alpha / 2 - 1)?)?;
        a.transpose().matmul(&c_inv.matmul(&a)?)?
    } else {
        let w = power((alpha - 1) / 2)?;
        w.transpose().matmul(&kd.matmul(&w)?)?
    };
    symmetrize_dense(&mut q);
    scale_dense(&mut q, phi_inv2);
    Ok(q)
}

fn symmetrize_dense(m: &mut DenseMatrix) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

fn scale_dense(m: &mut DenseMatrix, s: f64) {
    let n = m.nrows();
    let cols = m.ncols();
    for i in 0..n {
        for j in 0..cols {
            m[(i, j)] *= s;
        }
    }
}

/// Covariance the weight model implies between two location sets:
/// `r̂(A, B) = B_A Q⁻¹ B_Bᵀ`, via one factorization of `Q` and one solve per
/// column of `B_Bᵀ` (pass the smaller set as `locs_b`).
pub fn implied_covariance(
    model: &PrecisionModel,
    basis: &BasisSystem,
    locs_a: &Points,
    locs_b: &Points,
) -> Result<DenseMatrix> {
    if model.q.n() != basis.n_basis() {
        return Err(Error::ShapeMismatch {
            op: "implied_covariance",
            left_rows: model.q.n(),
            left_cols: model.q.n(),
            right_rows: basis.n_basis(),
            right_cols: basis.n_basis(),
        });
    }
    let b_a = basis.evaluate(locs_a)?;
    let b_b = basis.evaluate(locs_b)?;
    let rhs = b_b.to_dense().transpose();
    let solved = match &model.q {
        QMatrix::Sparse(q) => {
            let chol = SparseCholesky::factor(q, OrderingChoice::MinDegree)?;
            chol.solve_matrix(&rhs)
        }
        QMatrix::Dense(q) => {
            let factor = q.cholesky()?;
            let mut out = DenseMatrix::zeros(rhs.nrows(), rhs.ncols());
            let mut col = vec![0.0; rhs.nrows()];
            for j in 0..rhs.ncols() {
                for i in 0..rhs.nrows() {
                    col[i] = rhs[(i, j)];
                }
                let x = factor.cholesky_solve(&col);
                for i in 0..rhs.nrows() {
                    out[(i, j)] = x[i];
                }
            }
            out
        }
    };
    b_a.matmul_dense(&solved)
}
