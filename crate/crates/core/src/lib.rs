//! Gaussian Matérn random fields and their computationally cheap relatives.
//!
//! The crate implements four ways of predicting a stationary Matérn field
//! from noisy point observations and the machinery needed to compare them:
//!
//! * **exact kriging** — dense covariance algebra, the accuracy reference;
//! * **Markov (GMRF) approximations** — a basis expansion (B-splines or
//!   Daubechies-3 scaling functions) whose weight *precision* matrix is sparse,
//!   driven by the link between the Matérn family and the SPDE
//!   `(κ² − Δ)^{α/2} X = φ W` for integer `α = ν + d/2`;
//! * **process convolutions** — a moderate number of fixed Matérn-shaped
//!   kernels with independent weights (dense but low-rank);
//! * **covariance tapering** — the exact covariance multiplied by a
//!   compactly supported Wendland correlation, yielding sparse systems.
//!
//! Supporting modules provide self-contained sparse linear algebra
//! ([`sparse`]: CSR storage, Kronecker products, minimum-degree ordering,
//! up-looking Cholesky), dense oracles ([`dense`]), the Matérn model itself
//! with a real-order modified Bessel implementation ([`matern`]), basis
//! construction ([`basis`]), precision assembly ([`precision`]), and a small
//! simulation/metrics layer ([`metrics`]) used by the benchmark harness.
//!
//! Numerical conventions used throughout:
//!
//! * locations are rows of a [`points::Points`] buffer (`dim` ∈ {1,2,3});
//! * sparse matrices are CSR with sorted, duplicate-free column indices;
//! * all randomness flows through explicitly seeded ChaCha8 streams, so every
//!   result is reproducible bit-for-bit from `(seed, replicate)`.

pub mod basis;
pub mod convolution;
pub mod dense;
pub mod error;
pub mod kriging;
pub mod matern;
pub mod metrics;
pub mod points;
pub mod precision;
pub mod sparse;
pub mod taper;

pub use error::{Error, Result};
pub use points::{BoundingBox, Points};
