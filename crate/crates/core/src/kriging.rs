//! Kriging engines: exact dense, low-rank (Markov or convolution), tapered.
//!
//! All engines predict the zero-mean field at new locations from noisy
//! observations `Y = X(s) + ε`, `ε ~ N(0, σ²I)`, and report wall time split
//! into three steps:
//!
//! * step 1 — every matrix assembly except the prediction cross matrix,
//! * step 2 — the method's factorization, right-hand side, and solve,
//! * step 3 — building the cross matrix and multiplying it into predictions.
//!
//! The split matches how the methods differ in practice: low-rank and tapered
//! methods buy their speed in steps 2–3, and charging the cross-matrix build
//! to step 3 keeps the comparison honest for methods whose cross matrix is
//! the expensive part.

use std::time::Instant;

use crate::basis::{BasisSpec, BasisSystem};
use crate::convolution::{basis_matrix, ConvolutionSpec};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::matern::MaternParams;
use crate::points::{dist, Points};
use crate::precision::{build_q, CInvMode, QMatrix};
use crate::sparse::{OrderingChoice, SparseCholesky, SparseMatrix};
use crate::taper::{tapered_cov_matrix, TaperSpec};

/// Dense prediction rows are built and multiplied in blocks of this many rows
/// so the full cross-covariance matrix never has to be stored at once.
pub const DENSE_STEP3_BLOCK: usize = 256;

/// Default cap on the observation count for the dense (optimal) engine.
pub const DEFAULT_DENSE_CAP: usize = 8000;

/// Which approximation (or the exact method) a problem should run.
#[derive(Clone, Debug)]
pub enum MethodSpec {
    /// Exact dense kriging with the true Matérn covariance.
    Optimal,
    /// Basis expansion with a sparse-precision (Markov) weight model.
    Markov { basis: BasisSpec, c_inv: CInvMode },
    /// Process-convolution expansion with independent weights.
    Convolution(ConvolutionSpec),
    /// Tapered covariance with sparse linear algebra throughout.
    Taper(TaperSpec),
}

/// One kriging task: data, noise level, prediction sites, and a method.
#[derive(Clone, Debug)]
pub struct KrigingProblem<'a> {
    pub params: MaternParams,
    pub obs: &'a Points,
    pub y: &'a [f64],
    pub noise_std: f64,
    pub pred: &'a Points,
    pub method: MethodSpec,
    /// Also compute pointwise posterior variances (off for benchmarks).
    pub compute_variance: bool,
    /// Largest observation count the dense engine will accept.
    pub dense_cap: usize,
}

impl<'a> KrigingProblem<'a> {
    /// Validated constructor; variance off and the default dense cap.
    pub fn new(
        params: MaternParams,
        obs: &'a Points,
        y: &'a [f64],
        noise_std: f64,
        pred: &'a Points,
        method: MethodSpec,
    ) -> Result<Self> {
        if obs.len() == 0 {
            return Err(Error::InvalidParameter(
                "kriging needs at least one observation".into(),
            ));
        }
        if y.len() != obs.len() {
            return Err(Error::InvalidParameter(format!(
                "{} observations but {} data values",
                obs.len(),
                y.len()
            )));
        }
        if obs.dim() != pred.dim() {
            return Err(Error::InvalidParameter(format!(
                "observation dim {} != prediction dim {}",
                obs.dim(),
                pred.dim()
            )));
        }
        if !(noise_std > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise std {noise_std} must be > 0"
            )));
        }
        Ok(KrigingProblem {
            params,
            obs,
            y,
            noise_std,
            pred,
            method,
            compute_variance: false,
            dense_cap: DEFAULT_DENSE_CAP,
        })
    }
}

/// Wall-clock seconds per step.
#[derive(Clone, Copy, Debug, Default)]
pub struct StepTimings {
    pub step1: f64,
    pub step2: f64,
    pub step3: f64,
}

impl StepTimings {
    pub fn total(&self) -> f64 {
        self.step1 + self.step2 + self.step3
    }
}

/// Method-specific size facts for reporting.
#[derive(Clone, Copy, Debug, Default)]
pub struct MethodMeta {
    /// Basis functions, for the low-rank methods.
    pub n_basis: Option<usize>,
    /// Taper range, for the tapered method.
    pub theta: Option<f64>,
    /// Nonzeros in the factored system matrix.
    pub factor_nnz: Option<usize>,
}

/// Predictions plus optional variances, timings, and method facts.
#[derive(Clone, Debug)]
pub struct KrigingResult {
    pub predictions: Vec<f64>,
    pub variances: Option<Vec<f64>>,
    pub timings: StepTimings,
    pub meta: MethodMeta,
}

/// Runs whichever engine the problem's method selects.
pub fn krige(problem: &KrigingProblem) -> Result<KrigingResult> {
    match &problem.method {
        MethodSpec::Optimal => krige_optimal(problem),
        MethodSpec::Markov { .. } | MethodSpec::Convolution(_) => krige_lowrank(problem),
        MethodSpec::Taper(_) => krige_tapered(problem),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact dense kriging: `Σ_cross (Σ_obs + σ²I)⁻¹ Y`, cross rows streamed in
/// blocks so the prediction side never materializes a full dense matrix.
pub fn krige_optimal(problem: &KrigingProblem) -> Result<KrigingResult> {
    if !matches!(problem.method, MethodSpec::Optimal) {
        return Err(Error::InvalidParameter(
            "krige_optimal called with a non-optimal method".into(),
        ));
    }
    let m = problem.obs.len();
    if m > problem.dense_cap {
        return Err(Error::CapExceeded {
            size: m,
            cap: problem.dense_cap,
        });
    }
    let p = &problem.params;

    let t0 = Instant::now();
    let mut sigma = crate::matern::dense_cov_matrix_sym(p, problem.obs);
    let noise_var = problem.noise_std * problem.noise_std;
    for i in 0..m {
        sigma[(i, i)] += noise_var;
    }
    let step1 = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let factor = sigma.cholesky()?;
    let u = factor.cholesky_solve(problem.y);
    let step2 = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let m_hat = problem.pred.len();
    let mut predictions = vec![0.0; m_hat];
    let mut variances = problem.compute_variance.then(|| vec![0.0; m_hat]);
    let prior = p.variance();
    let mut row = vec![0.0; m];
    for start in (0..m_hat).step_by(DENSE_STEP3_BLOCK) {
        let end = (start + DENSE_STEP3_BLOCK).min(m_hat);
        for i in start..end {
            let s = problem.pred.get(i);
            for (j, r) in row.iter_mut().enumerate() {
                *r = p.cov(dist(s, problem.obs.get(j)));
            }
            predictions[i] = dot(&row, &u);
            if let Some(v) = variances.as_mut() {
                let z = factor.cholesky_solve(&row);
                v[i] = prior - dot(&row, &z);
            }
        }
    }
    let step3 = t2.elapsed().as_secs_f64();

    Ok(KrigingResult {
        predictions,
        variances,
        timings: StepTimings {
            step1,
            step2,
            step3,
        },
        meta: MethodMeta::default(),
    })
}

/// The information matrix of the weights: `Q + σ⁻² B₁ᵀB₁` (sparse path).
fn information_matrix_sparse(
    q: &SparseMatrix,
    b1: &SparseMatrix,
    noise_std: f64,
) -> Result<SparseMatrix> {
    let btb = b1.transpose().matmul(b1)?;
    q.add_scaled(1.0, &btb, 1.0 / (noise_std * noise_std))
}

/// The information matrix of the weights: `Q + σ⁻² B₁ᵀB₁` (dense path).
fn information_matrix_dense(
    q: &DenseMatrix,
    b1: &DenseMatrix,
    noise_std: f64,
) -> Result<DenseMatrix> {
    let btb = b1.transpose().matmul(b1)?;
    q.add_scaled(1.0, &btb, 1.0 / (noise_std * noise_std))
}

/// Low-rank predictor with everything explicit, used by the Markov engine
/// and directly by equivalence and invariance tests:
/// `B₂ (Q + σ⁻²B₁ᵀB₁)⁻¹ σ⁻² B₁ᵀ Y`.
pub fn markov_predict(
    q: &SparseMatrix,
    b1: &SparseMatrix,
    b2: &SparseMatrix,
    y: &[f64],
    noise_std: f64,
    compute_variance: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>, usize)> {
    let h = information_matrix_sparse(q, b1, noise_std)?;
    let factor = SparseCholesky::factor(&h, OrderingChoice::MinDegree)?;
    let mut rhs = b1.matvec_transpose(y);
    let inv_noise = 1.0 / (noise_std * noise_std);
    for v in &mut rhs {
        *v *= inv_noise;
    }
    let u = factor.solve(&rhs);
    let predictions = b2.matvec(&u);
    let variances = compute_variance.then(|| {
        let n = h.nrows();
        (0..b2.nrows())
            .map(|i| {
                let (cols, vals) = b2.row(i);
                let mut bi = vec![0.0; n];
                for (&c, &v) in cols.iter().zip(vals) {
                    bi[c] = v;
                }
                let z = factor.solve(&bi);
                cols.iter().zip(vals).map(|(&c, &v)| v * z[c]).sum()
            })
            .collect()
    });
    Ok((predictions, variances, factor.nnz_l()))
}

/// Low-rank engine. Markov methods assemble sparse `Q` and factor sparsely;
/// the convolution method (dense global kernels) and the exact-inverse
/// Markov mode run the same formula densely.
pub fn krige_lowrank(problem: &KrigingProblem) -> Result<KrigingResult> {
    match &problem.method {
        MethodSpec::Markov { basis, c_inv } => krige_markov(problem, basis, *c_inv),
        MethodSpec::Convolution(spec) => krige_convolution(problem, spec),
        _ => Err(Error::InvalidParameter(
            "krige_lowrank needs a markov or convolution method".into(),
        )),
    }
}

fn krige_markov(
    problem: &KrigingProblem,
    basis_spec: &BasisSpec,
    c_inv: CInvMode,
) -> Result<KrigingResult> {
    let t0 = Instant::now();
    let basis = BasisSystem::build(basis_spec.clone())?;
    let model = build_q(&basis, &problem.params, c_inv)?;
    let b1 = basis.evaluate(problem.obs)?;
    match model.q() {
        QMatrix::Sparse(q) => {
            let h = information_matrix_sparse(q, &b1, problem.noise_std)?;
            let step1 = t0.elapsed().as_secs_f64();

            let t1 = Instant::now();
            let factor = SparseCholesky::factor(&h, OrderingChoice::MinDegree)?;
            let mut rhs = b1.matvec_transpose(problem.y);
            let inv_noise = 1.0 / (problem.noise_std * problem.noise_std);
            for v in &mut rhs {
                *v *= inv_noise;
            }
            let u = factor.solve(&rhs);
            let step2 = t1.elapsed().as_secs_f64();

            let t2 = Instant::now();
            let b2 = basis.evaluate(problem.pred)?;
            let predictions = b2.matvec(&u);
            let variances = problem.compute_variance.then(|| {
                let n = h.nrows();
                (0..b2.nrows())
                    .map(|i| {
                        let (cols, vals) = b2.row(i);
                        let mut bi = vec![0.0; n];
                        for (&c, &v) in cols.iter().zip(vals) {
                            bi[c] = v;
                        }
                        let z = factor.solve(&bi);
                        cols.iter().zip(vals).map(|(&c, &v)| v * z[c]).sum()
                    })
                    .collect()
            });
            let step3 = t2.elapsed().as_secs_f64();

            Ok(KrigingResult {
                predictions,
                variances,
                timings: StepTimings {
                    step1,
                    step2,
                    step3,
                },
                meta: MethodMeta {
                    n_basis: Some(basis.n_basis()),
                    theta: None,
                    factor_nnz: Some(factor.nnz_l()),
                },
            })
        }
        QMatrix::Dense(q) => {
            let b1d = b1.to_dense();
            let h = information_matrix_dense(q, &b1d, problem.noise_std)?;
            let step1 = t0.elapsed().as_secs_f64();
            let (predictions, variances, step2, step3) = dense_lowrank_steps(
                &h,
                &b1d,
                |pred| Ok(basis.evaluate(pred)?.to_dense()),
                problem,
            )?;
            Ok(KrigingResult {
                predictions,
                variances,
                timings: StepTimings {
                    step1,
                    step2,
                    step3,
                },
                meta: MethodMeta {
                    n_basis: Some(basis.n_basis()),
                    theta: None,
                    factor_nnz: Some(h.nrows() * (h.nrows() + 1) / 2),
                },
            })
        }
    }
}

fn krige_convolution(problem: &KrigingProblem, spec: &ConvolutionSpec) -> Result<KrigingResult> {
    let t0 = Instant::now();
    let b1 = basis_matrix(spec, problem.obs)?;
    let n = spec.n_basis();
    let mut h = b1.transpose().matmul(&b1)?;
    let inv_noise = 1.0 / (problem.noise_std * problem.noise_std);
    h.scale(inv_noise);
    let q_diag = 1.0 / spec.weight_var();
    for i in 0..n {
        h[(i, i)] += q_diag;
    }
    let step1 = t0.elapsed().as_secs_f64();

    let (predictions, variances, step2, step3) =
        dense_lowrank_steps(&h, &b1, |pred| basis_matrix(spec, pred), problem)?;
    Ok(KrigingResult {
        predictions,
        variances,
        timings: StepTimings {
            step1,
            step2,
            step3,
        },
        meta: MethodMeta {
            n_basis: Some(n),
            theta: None,
            factor_nnz: Some(n * (n + 1) / 2),
        },
    })
}

/// Steps 2–3 of the dense low-rank paths, shared between the convolution
/// engine and the dense-precision Markov mode. `build_b2` is charged to
/// step 3 (it is the cross-matrix assembly).
fn dense_lowrank_steps(
    h: &DenseMatrix,
    b1: &DenseMatrix,
    build_b2: impl FnOnce(&Points) -> Result<DenseMatrix>,
    problem: &KrigingProblem,
) -> Result<(Vec<f64>, Option<Vec<f64>>, f64, f64)> {
    let t1 = Instant::now();
    let factor = h.cholesky()?;
    let inv_noise = 1.0 / (problem.noise_std * problem.noise_std);
    let mut rhs = b1.transpose().matvec(problem.y);
    for v in &mut rhs {
        *v *= inv_noise;
    }
    let u = factor.cholesky_solve(&rhs);
    let step2 = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let b2 = build_b2(problem.pred)?;
    let predictions = b2.matvec(&u);
    let variances = problem.compute_variance.then(|| {
        (0..b2.nrows())
            .map(|i| {
                let bi = b2.row(i);
                let z = factor.cholesky_solve(bi);
                dot(bi, &z)
            })
            .collect()
    });
    let step3 = t2.elapsed().as_secs_f64();
    Ok((predictions, variances, step2, step3))
}

/// Tapered kriging: the dense formula with the tapered covariance in place of
/// the true one, so every matrix is sparse. Prediction sites with no
/// observation within the taper range get an exact 0 (their cross row is
/// empty).
pub fn krige_tapered(problem: &KrigingProblem) -> Result<KrigingResult> {
    let MethodSpec::Taper(spec) = &problem.method else {
        return Err(Error::InvalidParameter(
            "krige_tapered needs a taper method".into(),
        ));
    };
    let p = &problem.params;
    let m = problem.obs.len();

    let t0 = Instant::now();
    let gram = tapered_cov_matrix(p, spec, problem.obs, problem.obs)?;
    let noise = SparseMatrix::identity(m).scaled(problem.noise_std * problem.noise_std);
    let system = gram.add_scaled(1.0, &noise, 1.0)?;
    let step1 = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let factor = SparseCholesky::factor(&system, OrderingChoice::MinDegree)?;
    let u = factor.solve(problem.y);
    let step2 = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let cross = tapered_cov_matrix(p, spec, problem.pred, problem.obs)?;
    let predictions = cross.matvec(&u);
    let variances = problem.compute_variance.then(|| {
        let prior = p.variance();
        (0..cross.nrows())
            .map(|i| {
                let (cols, vals) = cross.row(i);
                let mut ri = vec![0.0; m];
                for (&c, &v) in cols.iter().zip(vals) {
                    ri[c] = v;
                }
                let z = factor.solve(&ri);
                prior - dot(&ri, &z)
            })
            .collect()
    });
    let step3 = t2.elapsed().as_secs_f64();

    Ok(KrigingResult {
        predictions,
        variances,
        timings: StepTimings {
            step1,
            step2,
            step3,
        },
        meta: MethodMeta {
            n_basis: None,
            theta: Some(spec.theta),
            factor_nnz: Some(factor.nnz_l()),
        },
    })
}
