//! Equivalence of every kriging engine against a direct dense evaluation of
//! its defining formula, using an independent Gauss–Jordan solver for the
//! oracle-side linear algebra.

use matfield::basis::{BasisFamily, BasisSpec, BasisSystem};
use matfield::convolution::{basis_matrix, make_convolution};
use matfield::dense::DenseMatrix;
use matfield::kriging::{krige, krige_optimal, krige_tapered, KrigingProblem, MethodSpec};
use matfield::matern::{phi_for_unit_variance, MaternParams};
use matfield::points::{dist, BoundingBox, Points};
use matfield::precision::{build_q, CInvMode};
use matfield::taper::{wendland, TaperKind, TaperSpec};

fn lcg(seed: u64) -> impl FnMut() -> f64 {
    let mut s = seed;
    move || {
        s = s
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((s >> 11) as f64) / ((1u64 << 53) as f64)
    }
}

fn uniform_points(n: usize, side: f64, seed: u64) -> Points {
    let mut unit = lcg(seed);
    let mut pts = Points::new(2);
    for _ in 0..n {
        pts.push(&[side * unit(), side * unit()]);
    }
    pts
}

fn synthetic_y(n: usize, seed: u64) -> Vec<f64> {
    let mut unit = lcg(seed);
    (0..n).map(|_| 2.0 * unit() - 1.0).collect()
}

/// Gauss–Jordan with partial pivoting on plain nested Vecs — deliberately
/// not the library's linear algebra.
fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut aug: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs()))
            .unwrap();
        aug.swap(col, pivot);
        let p = aug[col][col];
        assert!(p.abs() > 1e-300, "oracle pivot collapsed");
        for j in col..=n {
            aug[col][j] /= p;
        }
        for i in 0..n {
            if i != col {
                let f = aug[i][col];
                if f != 0.0 {
                    for j in col..=n {
                        aug[i][j] -= f * aug[col][j];
                    }
                }
            }
        }
    }
    aug.into_iter().map(|row| row[n]).collect()
}

fn rel_inf_error(got: &[f64], want: &[f64]) -> f64 {
    let scale = want
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
        .max(1e-300);
    got.iter()
        .zip(want)
        .fold(0.0f64, |acc, (&g, &w)| acc.max((g - w).abs()))
        / scale
}

#[test]
fn optimal_matches_hand_solved_exponential_example() {
    // 1-d exponential field (unit variance): covariance is exactly e^{-|h|}.
    let phi = phi_for_unit_variance(0.5, 1.0, 1);
    let params = MaternParams::new(0.5, 1.0, phi, 1).unwrap();
    let xs = [0.0, 1.0, 2.5, 4.0];
    let y = [1.0, -1.0, 0.5, 2.0];
    let preds = [0.7, 3.0];
    let sigma = 0.5;

    let mut obs = Points::new(1);
    for &x in &xs {
        obs.push(&[x]);
    }
    let mut pred = Points::new(1);
    for &s in &preds {
        pred.push(&[s]);
    }
    let mut problem =
        KrigingProblem::new(params, &obs, &y, sigma, &pred, MethodSpec::Optimal).unwrap();
    problem.compute_variance = true;
    let result = krige_optimal(&problem).unwrap();

    // Oracle: written straight from the formula with exp() covariances.
    let a: Vec<Vec<f64>> = (0..4)
        .map(|i| {
            (0..4)
                .map(|j| {
                    (-(xs[i] - xs[j]).abs()).exp() + if i == j { sigma * sigma } else { 0.0 }
                })
                .collect()
        })
        .collect();
    let u = gauss_solve(&a, &y);
    for (k, &s) in preds.iter().enumerate() {
        let row: Vec<f64> = xs.iter().map(|&x| (-(s - x).abs()).exp()).collect();
        let want: f64 = row.iter().zip(&u).map(|(r, w)| r * w).sum();
        assert!(
            (result.predictions[k] - want).abs() <= 1e-12,
            "prediction at {s}: {} vs {want}",
            result.predictions[k]
        );
        let z = gauss_solve(&a, &row);
        let want_var = 1.0 - row.iter().zip(&z).map(|(r, w)| r * w).sum::<f64>();
        let got_var = result.variances.as_ref().unwrap()[k];
        assert!(
            (got_var - want_var).abs() <= 1e-12,
            "variance at {s}: {got_var} vs {want_var}"
        );
    }
}

/// Shared fixture for the low-rank equivalence tests: 7×7 first-order spline
/// basis (49 functions) on [0,5]², 100 observations, 30 prediction sites.
struct LowrankFixture {
    params: MaternParams,
    obs: Points,
    pred: Points,
    y: Vec<f64>,
    sigma: f64,
}

impl LowrankFixture {
    fn new() -> Self {
        LowrankFixture {
            params: MaternParams::from_range(1.0, 1.5, 2).unwrap(),
            obs: uniform_points(100, 5.0, 201),
            pred: uniform_points(30, 5.0, 202),
            y: synthetic_y(100, 203),
            sigma: 0.3,
        }
    }
}

/// Dense oracle for `B₂ (Q + σ⁻²B₁ᵀB₁)⁻¹ σ⁻²B₁ᵀY` with everything explicit.
fn lowrank_oracle(
    q: &DenseMatrix,
    b1: &DenseMatrix,
    b2: &DenseMatrix,
    y: &[f64],
    sigma: f64,
) -> Vec<f64> {
    let n = q.nrows();
    let inv_noise = 1.0 / (sigma * sigma);
    let btb = b1.transpose().matmul(b1).unwrap();
    let h: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| q[(i, j)] + inv_noise * btb[(i, j)]).collect())
        .collect();
    let mut rhs = b1.transpose().matvec(y);
    for v in &mut rhs {
        *v *= inv_noise;
    }
    let u = gauss_solve(&h, &rhs);
    b2.matvec(&u)
}

/// Dense kriging oracle with an arbitrary implied covariance in place of the
/// Matérn one: `Σ₂₁ (Σ₁₁ + σ²I)⁻¹ Y`.
fn woodbury_oracle(
    cov11: &DenseMatrix,
    cov21: &DenseMatrix,
    y: &[f64],
    sigma: f64,
) -> Vec<f64> {
    let m = cov11.nrows();
    let a: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| cov11[(i, j)] + if i == j { sigma * sigma } else { 0.0 })
                .collect()
        })
        .collect();
    let u = gauss_solve(&a, y);
    cov21.matvec(&u)
}

#[test]
fn markov_predictor_matches_dense_formula_and_woodbury_form() {
    let fx = LowrankFixture::new();
    let domain = BoundingBox::square(0.0, 5.0);
    let spec = BasisSpec::new(BasisFamily::Spline { order: 1 }, domain, &[7, 7]).unwrap();
    let method = MethodSpec::Markov {
        basis: spec.clone(),
        c_inv: CInvMode::Lumped,
    };
    let problem =
        KrigingProblem::new(fx.params.clone(), &fx.obs, &fx.y, fx.sigma, &fx.pred, method)
            .unwrap();
    let result = krige(&problem).unwrap();
    assert_eq!(result.meta.n_basis, Some(49));

    let basis = BasisSystem::build(spec).unwrap();
    let model = build_q(&basis, &fx.params, CInvMode::Lumped).unwrap();
    let q = model.q().as_sparse().unwrap().to_dense();
    let b1 = basis.evaluate(&fx.obs).unwrap().to_dense();
    let b2 = basis.evaluate(&fx.pred).unwrap().to_dense();

    let direct = lowrank_oracle(&q, &b1, &b2, &fx.y, fx.sigma);
    let err = rel_inf_error(&result.predictions, &direct);
    assert!(err <= 1e-9, "markov vs dense low-rank formula: {err:.3e}");

    // Woodbury route: the same predictor through the m×m covariance form
    // with the implied covariance B Q⁻¹ Bᵀ.
    let n = q.nrows();
    let qinv_cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let rows: Vec<Vec<f64>> = (0..n).map(|i| q.row(i).to_vec()).collect();
            gauss_solve(&rows, &e)
        })
        .collect();
    let mut qinv = DenseMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            qinv[(i, j)] = qinv_cols[j][i];
        }
    }
    let cov11 = b1.matmul(&qinv).unwrap().matmul(&b1.transpose()).unwrap();
    let cov21 = b2.matmul(&qinv).unwrap().matmul(&b1.transpose()).unwrap();
    let wdb = woodbury_oracle(&cov11, &cov21, &fx.y, fx.sigma);
    let err = rel_inf_error(&result.predictions, &wdb);
    assert!(err <= 1e-8, "markov vs Woodbury covariance form: {err:.3e}");
}

#[test]
fn convolution_predictor_matches_dense_formula_and_woodbury_form() {
    let fx = LowrankFixture::new();
    let domain = BoundingBox::square(0.0, 5.0);
    let target = MaternParams::from_range(2.0, 1.5, 2).unwrap();
    let spec = make_convolution(&target, &domain, &[7, 7]).unwrap();
    let method = MethodSpec::Convolution(spec.clone());
    let problem =
        KrigingProblem::new(target.clone(), &fx.obs, &fx.y, fx.sigma, &fx.pred, method).unwrap();
    let result = krige(&problem).unwrap();
    assert_eq!(result.meta.n_basis, Some(49));

    let b1 = basis_matrix(&spec, &fx.obs).unwrap();
    let b2 = basis_matrix(&spec, &fx.pred).unwrap();
    let n = spec.n_basis();
    let mut q = DenseMatrix::zeros(n, n);
    for i in 0..n {
        q[(i, i)] = 1.0 / spec.weight_var();
    }
    let direct = lowrank_oracle(&q, &b1, &b2, &fx.y, fx.sigma);
    let err = rel_inf_error(&result.predictions, &direct);
    assert!(err <= 1e-9, "convolution vs dense low-rank formula: {err:.3e}");

    // Woodbury route with the implied covariance w·BBᵀ.
    let mut cov11 = b1.matmul(&b1.transpose()).unwrap();
    cov11.scale(spec.weight_var());
    let mut cov21 = b2.matmul(&b1.transpose()).unwrap();
    cov21.scale(spec.weight_var());
    let wdb = woodbury_oracle(&cov11, &cov21, &fx.y, fx.sigma);
    let err = rel_inf_error(&result.predictions, &wdb);
    assert!(err <= 1e-8, "convolution vs Woodbury covariance form: {err:.3e}");
}

#[test]
fn tapered_predictor_matches_dense_tapered_formula() {
    let params = MaternParams::from_range(1.0, 1.0, 2).unwrap();
    let obs = uniform_points(300, 5.0, 301);
    let pred = uniform_points(40, 5.0, 302);
    let y = synthetic_y(300, 303);
    let sigma = 0.25;
    let spec = TaperSpec::new(TaperKind::Wendland1, 0.8).unwrap();
    let problem = KrigingProblem::new(
        params.clone(),
        &obs,
        &y,
        sigma,
        &pred,
        MethodSpec::Taper(spec),
    )
    .unwrap();
    let result = krige_tapered(&problem).unwrap();

    // Dense oracle: assemble the full tapered system without any sparsity.
    let m = obs.len();
    let a: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let tau = dist(obs.get(i), obs.get(j));
                    wendland(&spec, tau) * params.cov(tau)
                        + if i == j { sigma * sigma } else { 0.0 }
                })
                .collect()
        })
        .collect();
    let u = gauss_solve(&a, &y);
    let want: Vec<f64> = (0..pred.len())
        .map(|i| {
            (0..m)
                .map(|j| {
                    let tau = dist(pred.get(i), obs.get(j));
                    wendland(&spec, tau) * params.cov(tau) * u[j]
                })
                .sum()
        })
        .collect();
    let err = rel_inf_error(&result.predictions, &want);
    assert!(err <= 1e-10, "taper vs dense tapered formula: {err:.3e}");
}

#[test]
fn tapered_with_unit_taper_equals_optimal() {
    let params = MaternParams::from_range(1.5, 1.0, 2).unwrap();
    let obs = uniform_points(100, 5.0, 401);
    let pred = uniform_points(25, 5.0, 402);
    let y = synthetic_y(100, 403);
    // θ so large that the taper is 1 to machine precision over the domain
    // (forced Wendland₁ even though ν = 1.5 is its boundary case).
    let spec = TaperSpec::new(TaperKind::Wendland1, 1e9).unwrap();
    let tapered = krige_tapered(
        &KrigingProblem::new(
            params.clone(),
            &obs,
            &y,
            0.2,
            &pred,
            MethodSpec::Taper(spec),
        )
        .unwrap(),
    )
    .unwrap();
    let optimal = krige_optimal(
        &KrigingProblem::new(params, &obs, &y, 0.2, &pred, MethodSpec::Optimal).unwrap(),
    )
    .unwrap();
    let err = rel_inf_error(&tapered.predictions, &optimal.predictions);
    assert!(err <= 1e-10, "unit taper vs optimal: {err:.3e}");
}

#[test]
fn lowrank_variances_match_dense_information_form() {
    let fx = LowrankFixture::new();
    let domain = BoundingBox::square(0.0, 5.0);
    let spec = BasisSpec::new(BasisFamily::Spline { order: 1 }, domain, &[7, 7]).unwrap();
    let method = MethodSpec::Markov {
        basis: spec.clone(),
        c_inv: CInvMode::Lumped,
    };
    let mut problem =
        KrigingProblem::new(fx.params.clone(), &fx.obs, &fx.y, fx.sigma, &fx.pred, method)
            .unwrap();
    problem.compute_variance = true;
    let result = krige(&problem).unwrap();
    let variances = result.variances.unwrap();

    let basis = BasisSystem::build(spec).unwrap();
    let model = build_q(&basis, &fx.params, CInvMode::Lumped).unwrap();
    let q = model.q().as_sparse().unwrap().to_dense();
    let b1 = basis.evaluate(&fx.obs).unwrap().to_dense();
    let b2 = basis.evaluate(&fx.pred).unwrap().to_dense();
    let n = q.nrows();
    let inv_noise = 1.0 / (fx.sigma * fx.sigma);
    let btb = b1.transpose().matmul(&b1).unwrap();
    let h: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| q[(i, j)] + inv_noise * btb[(i, j)]).collect())
        .collect();
    for i in 0..fx.pred.len() {
        let bi = b2.row(i).to_vec();
        let z = gauss_solve(&h, &bi);
        let want: f64 = bi.iter().zip(&z).map(|(a, b)| a * b).sum();
        assert!(
            (variances[i] - want).abs() <= 1e-9 * want.max(1.0),
            "variance {i}: {} vs {want}",
            variances[i]
        );
    }
}
