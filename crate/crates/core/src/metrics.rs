//! Ground-truth simulation and the two benchmark error metrics.
//!
//! * [`simulate_truth`] draws a field realization over observation sites plus
//!   a prediction grid by dense Cholesky, fully determined by
//!   `(seed, replicate)`.
//! * [`covariance_error`] is the standardized L² distance between the true
//!   and a method-implied covariance function, averaged over reference sites.
//! * [`kriging_error`] is the squared distance between an approximate and the
//!   exact predictor on a shared grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::convolution::convolution_cov;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::kriging::{KrigingResult, MethodSpec};
use crate::matern::{dense_cov_matrix, dense_cov_matrix_sym, MaternParams};
use crate::points::{BoundingBox, Points};
use crate::precision::{build_q, implied_covariance};
use crate::taper::tapered_cov_matrix;

/// One benchmark scenario: field, sampling design, and replication plan.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub params: MaternParams,
    pub domain: BoundingBox,
    /// Observation count per replicate.
    pub n_obs: usize,
    /// Measurement noise standard deviation (0 allowed for exact data).
    pub noise_std: f64,
    /// Prediction grid dimensions.
    pub grid_dims: [usize; 2],
    pub replicates: usize,
    pub seed: u64,
    /// Cap on obs + grid for the dense truth factorization.
    pub dense_cap: usize,
}

/// Default cap on the truth-simulation point count (obs + grid).
pub const DEFAULT_TRUTH_CAP: usize = 8000;

impl Experiment {
    pub fn new(
        params: MaternParams,
        domain: BoundingBox,
        n_obs: usize,
        noise_std: f64,
        grid_dims: [usize; 2],
        replicates: usize,
        seed: u64,
    ) -> Result<Self> {
        if params.dim != 2 || domain.dim() != 2 {
            return Err(Error::InvalidParameter(
                "experiments are two-dimensional".into(),
            ));
        }
        if n_obs == 0 || grid_dims.iter().any(|&g| g == 0) || replicates == 0 {
            return Err(Error::InvalidParameter(format!(
                "counts must be positive: n_obs={n_obs}, grid={grid_dims:?}, replicates={replicates}"
            )));
        }
        if !(noise_std >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise std {noise_std} must be >= 0"
            )));
        }
        Ok(Experiment {
            params,
            domain,
            n_obs,
            noise_std,
            grid_dims,
            replicates,
            seed,
            dense_cap: DEFAULT_TRUTH_CAP,
        })
    }

    /// The deterministic prediction grid (endpoints included, last axis
    /// fastest).
    pub fn prediction_grid(&self) -> Points {
        self.domain.grid(&self.grid_dims)
    }
}

/// One simulated ground truth: locations, latent field, and noisy data.
#[derive(Clone, Debug)]
pub struct TruthDraw {
    pub obs: Points,
    pub grid: Points,
    /// Latent field at the observation sites.
    pub x_obs: Vec<f64>,
    /// Latent field at the prediction grid.
    pub x_grid: Vec<f64>,
    /// Noisy data `Y = X_obs + σ z`.
    pub y: Vec<f64>,
}

/// Draws the ground truth for one replicate. The RNG stream is
/// `ChaCha8(seed)` with the replicate index as the stream id, and values are
/// consumed in a fixed order (observation coordinates, then the field vector,
/// then the noise vector), so every output is bit-reproducible.
pub fn simulate_truth(exp: &Experiment, replicate: u64) -> Result<TruthDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(exp.seed);
    rng.set_stream(replicate);

    let mut obs = Points::new(2);
    let mut coord = [0.0f64; 2];
    for _ in 0..exp.n_obs {
        for (ax, c) in coord.iter_mut().enumerate() {
            *c = exp.domain.lo()[ax] + exp.domain.side(ax) * rng.gen::<f64>();
        }
        obs.push(&coord);
    }
    let grid = exp.prediction_grid();
    let all = obs.concat(&grid);
    let total = all.len();
    if total > exp.dense_cap {
        return Err(Error::CapExceeded {
            size: total,
            cap: exp.dense_cap,
        });
    }

    let sigma = dense_cov_matrix_sym(&exp.params, &all);
    let factor = cholesky_with_jitter(sigma, exp.params.variance())?;
    let z: Vec<f64> = (0..total).map(|_| rng.sample(StandardNormal)).collect();
    let x = factor.lower_tri_mul(&z);
    let x_obs = x[..exp.n_obs].to_vec();
    let x_grid = x[exp.n_obs..].to_vec();
    let y: Vec<f64> = x_obs
        .iter()
        .map(|&xi| xi + exp.noise_std * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(TruthDraw {
        obs,
        grid,
        x_obs,
        x_grid,
        y,
    })
}

/// Factors a covariance matrix that is PSD in exact arithmetic but may have
/// tiny negative pivots in floating point (near-duplicate sites). Retries
/// with a diagonal jitter ladder `10⁻¹²·v, 10⁻¹⁰·v, 10⁻⁸·v` (`v` = prior
/// variance) before giving up.
fn cholesky_with_jitter(mut sigma: DenseMatrix, variance: f64) -> Result<DenseMatrix> {
    let mut last = None;
    let mut added = 0.0;
    for jitter in [0.0, 1e-12, 1e-10, 1e-8] {
        let bump = jitter * variance - added;
        if bump > 0.0 {
            for i in 0..sigma.nrows() {
                sigma[(i, i)] += bump;
            }
            added += bump;
        }
        match sigma.cholesky() {
            Ok(f) => return Ok(f),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one factorization attempt"))
}

/// Evaluation grids for the covariance-error functional.
#[derive(Clone, Copy, Debug)]
pub struct EpsilonGrid {
    /// Integration grid for the squared differences, spanning the domain.
    pub u_dims: [usize; 2],
    /// Reference-site lattice over the central quarter of the domain.
    pub s_dims: [usize; 2],
}

impl Default for EpsilonGrid {
    fn default() -> Self {
        EpsilonGrid {
            u_dims: [41, 41],
            s_dims: [5, 5],
        }
    }
}

/// Per-site standardized L² covariance errors
/// `ε(s) = Σ_u (r(s,u) − r̂(s,u))² Δu / Σ_u r(s,u)² Δu`,
/// for an approximate covariance given as a matrix over `(sites, u-grid)`.
pub fn epsilon_at_sites(
    params: &MaternParams,
    sites: &Points,
    u_grid: &Points,
    r_hat: &DenseMatrix,
    cell_area: f64,
) -> Result<Vec<f64>> {
    if r_hat.nrows() != sites.len() || r_hat.ncols() != u_grid.len() {
        return Err(Error::ShapeMismatch {
            op: "epsilon_at_sites",
            left_rows: sites.len(),
            left_cols: u_grid.len(),
            right_rows: r_hat.nrows(),
            right_cols: r_hat.ncols(),
        });
    }
    let exact = dense_cov_matrix(params, sites, u_grid);
    Ok((0..sites.len())
        .map(|i| {
            let mut num = 0.0;
            let mut den = 0.0;
            for j in 0..u_grid.len() {
                let r = exact[(i, j)];
                let d = r - r_hat[(i, j)];
                num += d * d * cell_area;
                den += r * r * cell_area;
            }
            num / den
        })
        .collect())
}

/// Mean covariance error over the default reference lattice. `r_hat` receives
/// `(sites, u_grid)` and must return the implied covariance with one row per
/// site.
pub fn covariance_error<F>(
    params: &MaternParams,
    domain: &BoundingBox,
    grid: &EpsilonGrid,
    r_hat: F,
) -> Result<f64>
where
    F: FnOnce(&Points, &Points) -> Result<DenseMatrix>,
{
    let sites = domain.central_quarter().grid(&grid.s_dims);
    let u_grid = domain.grid(&grid.u_dims);
    let cell_area = domain.volume() / u_grid.len() as f64;
    let approx = r_hat(&sites, &u_grid)?;
    let eps = epsilon_at_sites(params, &sites, &u_grid, &approx, cell_area)?;
    Ok(eps.iter().sum::<f64>() / eps.len() as f64)
}

/// The covariance implied by a method between reference sites and a grid,
/// with one row per site. The optimal method returns the exact covariance.
pub fn method_covariance(
    method: &MethodSpec,
    params: &MaternParams,
    sites: &Points,
    u_grid: &Points,
) -> Result<DenseMatrix> {
    match method {
        MethodSpec::Optimal => Ok(dense_cov_matrix(params, sites, u_grid)),
        MethodSpec::Markov { basis, c_inv } => {
            let system = crate::basis::BasisSystem::build(basis.clone())?;
            let model = build_q(&system, params, *c_inv)?;
            // One sparse solve per site: keep the small set on the right.
            Ok(implied_covariance(&model, &system, u_grid, sites)?.transpose())
        }
        MethodSpec::Convolution(spec) => convolution_cov(spec, sites, u_grid),
        MethodSpec::Taper(spec) => {
            Ok(tapered_cov_matrix(params, spec, sites, u_grid)?.to_dense())
        }
    }
}

/// Squared distance between an approximate and the optimal predictor:
/// `Σ_i (x̂_i − x̂_i^opt)²`.
pub fn kriging_error(approx: &KrigingResult, optimal: &KrigingResult) -> Result<f64> {
    if approx.predictions.len() != optimal.predictions.len() {
        return Err(Error::InvalidParameter(format!(
            "prediction grids differ: {} vs {} sites",
            approx.predictions.len(),
            optimal.predictions.len()
        )));
    }
    Ok(approx
        .predictions
        .iter()
        .zip(&optimal.predictions)
        .map(|(&a, &o)| (a - o) * (a - o))
        .sum())
}
