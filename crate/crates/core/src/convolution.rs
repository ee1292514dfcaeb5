//! Process-convolution approximation: Matérn kernel basis on a lattice.
//!
//! A Matérn field with smoothness `ν` can be written as white noise convolved
//! with a Matérn-covariance-shaped kernel whose parameters are
//! `ν_k = ν/2 − d/4`, `φ_k² = φ`, `κ_k = κ`. Discretizing the convolution on a
//! lattice `u₁..u_n` with independent weights gives the low-rank model
//! `X(s) ≈ Σ_j k(s − u_j) w_j`, where each weight variance is the lattice cell
//! area. The kernel has global support, so all matrices here are dense.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::matern::MaternParams;
use crate::points::{dist, BoundingBox, Points};

/// A discretized process-convolution model.
#[derive(Clone, Debug)]
pub struct ConvolutionSpec {
    kernel_params: MaternParams,
    nodes: Points,
    weight_var: f64,
}

impl ConvolutionSpec {
    /// Kernel-shape parameters (`ν_k`, `κ`, `√φ`).
    pub fn kernel_params(&self) -> &MaternParams {
        &self.kernel_params
    }

    /// Lattice nodes `u₁..u_n`.
    pub fn nodes(&self) -> &Points {
        &self.nodes
    }

    /// Variance of each independent weight (lattice cell area).
    pub fn weight_var(&self) -> f64 {
        self.weight_var
    }

    /// Number of kernel basis functions.
    pub fn n_basis(&self) -> usize {
        self.nodes.len()
    }
}

/// Builds the convolution model for `target` on a regular lattice of
/// `counts[ax]` cell centers per axis over `domain`.
pub fn make_convolution(
    target: &MaternParams,
    domain: &BoundingBox,
    counts: &[usize],
) -> Result<ConvolutionSpec> {
    if domain.dim() != target.dim as usize {
        return Err(Error::InvalidParameter(format!(
            "domain dim {} does not match field dim {}",
            domain.dim(),
            target.dim
        )));
    }
    if counts.len() != domain.dim() || counts.iter().any(|&c| c == 0) {
        return Err(Error::InvalidParameter(format!(
            "lattice counts {counts:?} must give one positive count per axis"
        )));
    }
    let nu_k = target.nu / 2.0 - target.dim as f64 / 4.0;
    if nu_k <= 0.0 {
        return Err(Error::KernelSingular(nu_k));
    }
    let kernel_params = MaternParams::new(nu_k, target.kappa, target.phi.sqrt(), target.dim)?;
    let nodes = domain.cell_centers(counts);
    let weight_var = domain.volume() / nodes.len() as f64;
    Ok(ConvolutionSpec {
        kernel_params,
        nodes,
        weight_var,
    })
}

/// Dense basis matrix `B[i, j] = k(‖locs_i − u_j‖)` (kernels never truncate).
pub fn basis_matrix(spec: &ConvolutionSpec, locs: &Points) -> Result<DenseMatrix> {
    if locs.dim() != spec.nodes.dim() {
        return Err(Error::InvalidParameter(format!(
            "location dim {} does not match lattice dim {}",
            locs.dim(),
            spec.nodes.dim()
        )));
    }
    let mut b = DenseMatrix::zeros(locs.len(), spec.nodes.len());
    for (i, s) in locs.iter().enumerate() {
        for (j, u) in spec.nodes.iter().enumerate() {
            b[(i, j)] = spec.kernel_params.cov(dist(s, u));
        }
    }
    Ok(b)
}

/// Implied covariance `r̂(A, B) = B_A · diag(w) · B_Bᵀ`.
pub fn convolution_cov(
    spec: &ConvolutionSpec,
    locs_a: &Points,
    locs_b: &Points,
) -> Result<DenseMatrix> {
    let ba = basis_matrix(spec, locs_a)?;
    let bb = basis_matrix(spec, locs_b)?;
    let mut out = ba.matmul(&bb.transpose())?;
    out.scale(spec.weight_var);
    Ok(out)
}
