//! `selftest`: fast recomputation of the frozen constants and a solver
//! smoke check, printed one line per check.

use matfield::basis::{db3_cg_1d, spline_cg_1d, BasisFamily, BasisSpec, BasisSystem, DB3_LAMBDA};
use matfield::matern::{phi_for_unit_variance, MaternParams};
use matfield::precision::{build_q, CInvMode, QMatrix};
use matfield::sparse::cholesky::{OrderingChoice, SparseCholesky};
use matfield::taper::{wendland, TaperKind, TaperSpec};
use matfield::BoundingBox;

use crate::error::{CliError, Result};

const EXACT: f64 = 1e-15;

fn check(name: &str, ok: bool, detail: String) -> Result<()> {
    if ok {
        println!("selftest: {name} ok");
        Ok(())
    } else {
        Err(CliError::Selftest(format!("{name}: {detail}")))
    }
}

/// Runs all checks; the first failure aborts with a nonzero exit.
pub fn run() -> Result<()> {
    // Daubechies-3 connection coefficients, frozen five-entry band
    let expected = [5.267, -3.390, 0.876, -0.114, -0.00535];
    check(
        "db3 connection coefficients",
        DB3_LAMBDA == expected,
        format!("{DB3_LAMBDA:?} != {expected:?}"),
    )?;

    // DB3 stiffness at unit spacing reproduces the band
    let (c, g) = db3_cg_1d(0, 11).map_err(CliError::Engine)?;
    let row_ok = (c.get(5, 5) - 1.0).abs() <= EXACT
        && (0..5).all(|k| (g.get(5, 5 + k) - DB3_LAMBDA[k]).abs() <= EXACT);
    check(
        "db3 mass identity and stiffness band",
        row_ok,
        "interior row deviates from the frozen band".into(),
    )?;

    // first-order spline mass and stiffness interior rows at unit spacing
    let (c, g) = spline_cg_1d(1, 0, 8).map_err(CliError::Engine)?;
    let c_ok = (c.get(4, 4) - 2.0 / 3.0).abs() <= EXACT
        && (c.get(4, 3) - 1.0 / 6.0).abs() <= EXACT
        && (c.get(4, 5) - 1.0 / 6.0).abs() <= EXACT;
    let g_ok = (g.get(4, 4) - 2.0).abs() <= EXACT
        && (g.get(4, 3) + 1.0).abs() <= EXACT
        && (g.get(4, 5) + 1.0).abs() <= EXACT;
    check(
        "spline mass/stiffness closed forms",
        c_ok && g_ok,
        "interior rows deviate from (1/6, 2/3, 1/6) and (-1, 2, -1)".into(),
    )?;

    // Wendland tapers at the knots 0, theta/2, theta
    let theta = 0.7;
    let w1 = TaperSpec::new(TaperKind::Wendland1, theta).map_err(CliError::Engine)?;
    let w2 = TaperSpec::new(TaperKind::Wendland2, theta).map_err(CliError::Engine)?;
    let w1_mid = 0.1875; // (1/2)^4 * 3
    let w2_mid = 83.0 / 768.0; // (1/2)^6 (1 + 3 + 35/12)
    let wendland_ok = (wendland(&w1, 0.0) - 1.0).abs() <= EXACT
        && (wendland(&w1, 0.5 * theta) - w1_mid).abs() <= EXACT
        && wendland(&w1, theta) == 0.0
        && (wendland(&w2, 0.0) - 1.0).abs() <= EXACT
        && (wendland(&w2, 0.5 * theta) - w2_mid).abs() <= EXACT
        && wendland(&w2, theta) == 0.0;
    check(
        "wendland taper closed forms",
        wendland_ok,
        "knot values deviate from the closed forms".into(),
    )?;

    // half-integer smoothness reduces to the exponential covariance
    let params = MaternParams::new(0.5, 2.0, phi_for_unit_variance(0.5, 2.0, 1), 1)
        .map_err(CliError::Engine)?;
    let expo_ok = [0.1, 0.5, 1.3]
        .iter()
        .all(|&h| (params.cov(h) - (-2.0 * h).exp()).abs() <= 1e-12);
    check(
        "exponential covariance special case",
        expo_ok,
        "nu = 1/2 covariance deviates from exp(-kappa h)".into(),
    )?;

    // sparse factorization solves a small assembled precision system
    let spec = BasisSpec::new(
        BasisFamily::Spline { order: 1 },
        BoundingBox::square(0.0, 1.0),
        &[8, 8],
    )
    .map_err(CliError::Engine)?;
    let system = BasisSystem::build(spec).map_err(CliError::Engine)?;
    let params2 = MaternParams::from_range(1.0, 0.4, 2).map_err(CliError::Engine)?;
    let model = build_q(&system, &params2, CInvMode::Lumped).map_err(CliError::Engine)?;
    let QMatrix::Sparse(q) = model.q() else {
        return Err(CliError::Selftest("expected a sparse precision".into()));
    };
    let chol = SparseCholesky::factor(q, OrderingChoice::MinDegree).map_err(CliError::Engine)?;
    let n = q.nrows();
    let b: Vec<f64> = (0..n).map(|i| ((i * 37 + 11) % 101) as f64 / 101.0).collect();
    let x = chol.solve(&b);
    let residual = q
        .matvec(&x)
        .iter()
        .zip(&b)
        .map(|(ax, bi)| (ax - bi).abs())
        .fold(0.0f64, f64::max);
    check(
        "sparse factorization residual",
        residual <= 1e-9,
        format!("|Qx - b| = {residual:.3e}"),
    )?;

    println!("selftest: all checks passed");
    Ok(())
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        super::run().unwrap();
    }
}
