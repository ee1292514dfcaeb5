//! Crate-wide error type.
//!
//! One enum covers every module: the failure modes interlock (a kriging engine
//! surfaces factorization and basis errors unchanged), so a single type keeps
//! `?` propagation free of conversion boilerplate.

use thiserror::Error;

/// Errors produced by matrix assembly, factorization and the model layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A Cholesky pivot fell below the tolerance `1e-12 · max diag`.
    #[error("matrix not positive definite: pivot {pivot:.3e} at index {index} (tolerance {tolerance:.3e})")]
    NotPositiveDefinite {
        index: usize,
        pivot: f64,
        tolerance: f64,
    },

    /// A symmetric operation received a structurally or numerically
    /// asymmetric matrix.
    #[error("asymmetric input: |A - A^T| has max entry {max_diff:.3e}")]
    AsymmetricInput { max_diff: f64 },

    /// Operand shapes do not line up.
    #[error("shape mismatch in {op}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    ShapeMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    /// Kronecker (or similar) product dimensions overflow `usize`.
    #[error("index overflow: product dimensions {0} x {1} exceed addressable range")]
    DimensionOverflow(usize, usize),

    /// `alpha = nu + d/2` must be an integer for the Markov construction.
    #[error("alpha = nu + d/2 = {0} is not an integer (within 1e-9); no Markov representation")]
    AlphaNotInteger(f64),

    /// Integer `alpha` outside the supported band `1..=5`.
    #[error("alpha = {0} outside the supported range 1..=5")]
    AlphaOutOfRange(u32),

    /// A model parameter failed validation (non-positive range, bad counts, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A location fell outside the (expanded) computational domain of a basis.
    #[error("location {location:?} outside computational domain on axis {axis}")]
    LocationOutsideDomain { location: Vec<f64>, axis: usize },

    /// No Wendland taper of the supported orders is valid for this smoothness.
    #[error("nu = {0} is not taperable by Wendland-1/2 (valid for nu <= 2.5); pass an explicit override to force a kind")]
    NuNotTaperable(f64),

    /// The process-convolution kernel degenerates (`nu/2 - d/4 <= 0`).
    #[error("convolution kernel singular: nu/2 - d/4 = {0:.6} <= 0, kernel variance diverges")]
    KernelSingular(f64),

    /// A dense-path problem exceeds the configured size cap.
    #[error("dense problem size {size} exceeds cap {cap}")]
    CapExceeded { size: usize, cap: usize },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
