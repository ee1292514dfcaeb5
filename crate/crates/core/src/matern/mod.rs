//! The stationary Matérn covariance family.
//!
//! Parameterized by smoothness `ν`, inverse scale `κ`, spectral amplitude `φ`
//! and dimension `d`:
//!
//! * covariance
//!   `r(h) = 2^{1−ν} φ² (4π)^{−d/2} Γ(ν+d/2)^{−1} κ^{−2ν} (κ‖h‖)^ν K_ν(κ‖h‖)`,
//! * variance `r(0) = φ² Γ(ν) (4π)^{−d/2} Γ(ν+d/2)^{−1} κ^{−2ν}`,
//! * spectral density `S(ω) = φ² (2π)^{−d} (κ² + ‖ω‖²)^{−(ν+d/2)}`.
//!
//! The *practical range* convention `range = √(8ν)/κ` (correlation ≈ 0.13 at
//! distance `range`) converts between the κ and range parameterizations, and
//! [`phi_for_unit_variance`] picks `φ` so that `r(0) = 1` — derived directly
//! from the variance formula above.

pub mod bessel;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::points::{dist, Points};
use bessel::{bessel_kv, gamma};
use std::f64::consts::PI;

/// Parameters of a Matérn field in `dim` dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaternParams {
    /// Smoothness ν > 0.
    pub nu: f64,
    /// Inverse correlation scale κ > 0.
    pub kappa: f64,
    /// Spectral amplitude φ > 0 (white-noise scaling in the SPDE form).
    pub phi: f64,
    /// Spatial dimension (1, 2 or 3).
    pub dim: usize,
}

impl MaternParams {
    /// Validated constructor.
    pub fn new(nu: f64, kappa: f64, phi: f64, dim: usize) -> Result<Self> {
        if !(nu > 0.0) || !(kappa > 0.0) || !(phi > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Matérn parameters must be positive: nu={nu}, kappa={kappa}, phi={phi}"
            )));
        }
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "dimension {dim} not in 1..=3"
            )));
        }
        Ok(MaternParams {
            nu,
            kappa,
            phi,
            dim,
        })
    }

    /// Unit-variance field with the given smoothness and practical range.
    pub fn from_range(nu: f64, range: f64, dim: usize) -> Result<Self> {
        if !(range > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "range must be positive, got {range}"
            )));
        }
        let kappa = kappa_from_range(nu, range);
        let phi = phi_for_unit_variance(nu, kappa, dim);
        MaternParams::new(nu, kappa, phi, dim)
    }

    /// Practical range √(8ν)/κ.
    pub fn range(&self) -> f64 {
        (8.0 * self.nu).sqrt() / self.kappa
    }

    /// Marginal variance `r(0)`.
    pub fn variance(&self) -> f64 {
        self.phi * self.phi * gamma(self.nu)
            / ((4.0 * PI).powf(self.dim as f64 / 2.0)
                * gamma(self.nu + self.dim as f64 / 2.0)
                * self.kappa.powf(2.0 * self.nu))
    }

    /// Covariance at lag `h ≥ 0`.
    pub fn cov(&self, h: f64) -> f64 {
        debug_assert!(h >= 0.0, "lag must be non-negative");
        if h == 0.0 {
            return self.variance();
        }
        let kh = self.kappa * h;
        let norm = 2.0f64.powf(1.0 - self.nu) * self.phi * self.phi
            / ((4.0 * PI).powf(self.dim as f64 / 2.0)
                * gamma(self.nu + self.dim as f64 / 2.0)
                * self.kappa.powf(2.0 * self.nu));
        norm * kh.powf(self.nu) * bessel_kv(self.nu, kh)
    }

    /// Isotropic spectral density at `‖ω‖ = omega`.
    pub fn spectrum(&self, omega: f64) -> f64 {
        self.phi * self.phi / (2.0 * PI).powi(self.dim as i32)
            * (self.kappa * self.kappa + omega * omega).powf(-(self.nu + self.dim as f64 / 2.0))
    }
}

/// κ from the practical-range convention: κ = √(8ν)/range.
pub fn kappa_from_range(nu: f64, range: f64) -> f64 {
    (8.0 * nu).sqrt() / range
}

/// φ giving unit marginal variance: φ = [(4π)^{d/2} Γ(ν+d/2) κ^{2ν} / Γ(ν)]^{1/2}.
pub fn phi_for_unit_variance(nu: f64, kappa: f64, dim: usize) -> f64 {
    ((4.0 * PI).powf(dim as f64 / 2.0) * gamma(nu + dim as f64 / 2.0)
        * kappa.powf(2.0 * nu)
        / gamma(nu))
    .sqrt()
}

/// Dense covariance matrix between two point sets.
pub fn dense_cov_matrix(params: &MaternParams, a: &Points, b: &Points) -> DenseMatrix {
    assert_eq!(a.dim(), b.dim(), "point sets must share a dimension");
    assert_eq!(a.dim(), params.dim, "points and parameters must share a dimension");
    let mut out = DenseMatrix::zeros(a.len(), b.len());
    for i in 0..a.len() {
        let pa = a.get(i);
        let row = out.row_mut(i);
        for (j, pb) in b.iter().enumerate() {
            row[j] = params.cov(dist(pa, pb));
        }
    }
    out
}

/// Symmetric dense covariance matrix of one point set (half the kernel
/// evaluations of the general routine, exactly symmetric by construction).
pub fn dense_cov_matrix_sym(params: &MaternParams, a: &Points) -> DenseMatrix {
    assert_eq!(a.dim(), params.dim, "points and parameters must share a dimension");
    let n = a.len();
    let mut out = DenseMatrix::zeros(n, n);
    let variance = params.variance();
    for i in 0..n {
        out[(i, i)] = variance;
        for j in (i + 1)..n {
            let v = params.cov(dist(a.get(i), a.get(j)));
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}
