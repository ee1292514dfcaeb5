//! Benchmark run manifests: a strict TOML schema plus shipped presets.
//!
//! Every command is driven by a [`RunConfig`]. Unknown keys are rejected so a
//! manifest that parses is a manifest that is fully understood; together with
//! the seed this makes every CSV byte-reproducible (timing columns excepted).

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use matfield::matern::MaternParams;
use matfield::metrics::Experiment;
use matfield::BoundingBox;

use crate::error::{CliError, Result};

/// Which benchmark a preset belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    CovError,
    KrigingBench,
    TaperSweep,
    DemoPredict,
}

/// Scale preset selector: small enough for a laptop, or the full study size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Scale {
    #[default]
    Desk,
    Paper,
}

/// A fully described benchmark run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    pub methods: MethodsConfig,
    /// Extra knobs used only by `taper-sweep`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taper_sweep: Option<TaperSweepConfig>,
}

/// Field model, sampling design, and replication plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Smoothness values to sweep.
    pub nus: Vec<f64>,
    /// True correlation ranges to sweep.
    pub ranges: Vec<f64>,
    /// Square observation window `[lo, hi]` on both axes.
    pub domain: [f64; 2],
    /// Observations per replicate.
    pub n_obs: usize,
    /// Measurement noise standard deviation.
    pub noise_std: f64,
    /// Prediction grid dimensions.
    pub grid: [usize; 2],
    /// Independent replicates per (nu, range) combination.
    pub replicates: usize,
    /// Base RNG seed; replicate index selects the stream.
    #[serde(default)]
    pub seed: u64,
    /// Basis/lattice domains are grown by `expansion_factor * range` on every
    /// side (boundary-effect control). Kernel lattices are not expanded.
    #[serde(default = "default_expansion")]
    pub expansion_factor: f64,
    /// Timing repeats per engine call; the reported step times are medians.
    #[serde(default = "default_timing_repeats")]
    pub timing_repeats: usize,
    /// Largest dense system (observations, or observations + grid for the
    /// truth simulation) the dense paths accept.
    #[serde(default = "default_dense_cap")]
    pub dense_cap: usize,
}

fn default_expansion() -> f64 {
    2.0
}

fn default_timing_repeats() -> usize {
    1
}

fn default_dense_cap() -> usize {
    8000
}

/// Which approximations run, and their size knobs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodsConfig {
    /// Methods to run, in output order.
    pub list: Vec<MethodName>,
    /// Per-axis basis-function count for the spline families. The count is
    /// fixed; domain expansion stretches the lattice spacing instead, so the
    /// factorization cost of a method does not depend on the range.
    #[serde(default = "default_s1_nodes")]
    pub spline_nodes: usize,
    /// Per-axis basis-function count for the Daubechies family.
    #[serde(default = "default_db3_nodes")]
    pub db3_nodes: usize,
    /// Kernel lattice per smoothness for the convolution method.
    #[serde(default)]
    pub convolution: Vec<ConvolutionEntry>,
    /// Taper range per smoothness for the taper method.
    #[serde(default)]
    pub taper: Vec<TaperEntry>,
}

fn default_s1_nodes() -> usize {
    50
}

fn default_db3_nodes() -> usize {
    20
}

/// Kernel lattice dimensions for one smoothness value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvolutionEntry {
    pub nu: f64,
    pub lattice: [usize; 2],
}

/// Taper range (and optional forced taper family) for one smoothness value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaperEntry {
    pub nu: f64,
    pub theta: f64,
    /// Force a taper family instead of selecting by smoothness.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<TaperKindName>,
}

/// Serializable name for the Wendland taper families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaperKindName {
    #[serde(rename = "wendland1")]
    Wendland1,
    #[serde(rename = "wendland2")]
    Wendland2,
}

impl TaperKindName {
    pub fn to_kind(self) -> matfield::taper::TaperKind {
        match self {
            TaperKindName::Wendland1 => matfield::taper::TaperKind::Wendland1,
            TaperKindName::Wendland2 => matfield::taper::TaperKind::Wendland2,
        }
    }
}

/// The sweep grid for `taper-sweep`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaperSweepConfig {
    pub theta_start: f64,
    pub theta_stop: f64,
    pub theta_step: f64,
    /// True ranges to repeat the sweep for.
    pub true_ranges: Vec<f64>,
}

impl TaperSweepConfig {
    /// The inclusive theta grid `start, start+step, ..., stop`.
    pub fn thetas(&self) -> Vec<f64> {
        let n = ((self.theta_stop - self.theta_start) / self.theta_step + 0.5).floor() as usize + 1;
        (0..n)
            .map(|i| self.theta_start + i as f64 * self.theta_step)
            .collect()
    }
}

/// Canonical method names as they appear in configs and CSV output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MethodName {
    #[serde(rename = "optimal")]
    Optimal,
    #[serde(rename = "markov-s1")]
    MarkovS1,
    #[serde(rename = "markov-s2")]
    MarkovS2,
    #[serde(rename = "markov-s3")]
    MarkovS3,
    #[serde(rename = "markov-db3")]
    MarkovDb3,
    #[serde(rename = "convolution")]
    Convolution,
    #[serde(rename = "taper")]
    Taper,
}

impl MethodName {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodName::Optimal => "optimal",
            MethodName::MarkovS1 => "markov-s1",
            MethodName::MarkovS2 => "markov-s2",
            MethodName::MarkovS3 => "markov-s3",
            MethodName::MarkovDb3 => "markov-db3",
            MethodName::Convolution => "convolution",
            MethodName::Taper => "taper",
        }
    }
}

impl fmt::Display for MethodName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl RunConfig {
    /// Parses and validates a manifest from TOML text.
    pub fn from_toml_str(text: &str) -> Result<RunConfig> {
        let config: RunConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Parses and validates a manifest file.
    pub fn from_path(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// The shipped preset for a command at a given scale. These are the
    /// files under `configs/`, compiled in so `--desk` / `--paper-scale`
    /// work without the source tree.
    pub fn preset(kind: CommandKind, scale: Scale) -> RunConfig {
        let text = match (kind, scale) {
            (CommandKind::CovError, Scale::Desk) => {
                include_str!("../../../configs/cov_error_desk.toml")
            }
            (CommandKind::CovError, Scale::Paper) => {
                include_str!("../../../configs/cov_error_paper.toml")
            }
            (CommandKind::KrigingBench, Scale::Desk) => {
                include_str!("../../../configs/kriging_desk.toml")
            }
            (CommandKind::KrigingBench, Scale::Paper) => {
                include_str!("../../../configs/kriging_paper.toml")
            }
            (CommandKind::TaperSweep, Scale::Desk) => {
                include_str!("../../../configs/taper_sweep_desk.toml")
            }
            (CommandKind::TaperSweep, Scale::Paper) => {
                include_str!("../../../configs/taper_sweep_paper.toml")
            }
            (CommandKind::DemoPredict, Scale::Desk) => {
                include_str!("../../../configs/demo_desk.toml")
            }
            (CommandKind::DemoPredict, Scale::Paper) => {
                include_str!("../../../configs/demo_paper.toml")
            }
        };
        Self::from_toml_str(text).expect("shipped presets are valid")
    }

    /// Schema-level sanity rules beyond what serde can express.
    pub fn validate(&self) -> Result<()> {
        let e = &self.experiment;
        if !(e.domain[0] < e.domain[1]) {
            return Err(CliError::ConfigInvalid(format!(
                "domain [{}, {}] must satisfy lo < hi",
                e.domain[0], e.domain[1]
            )));
        }
        if let Some(&nu) = e.nus.iter().find(|&&nu| !(nu > 0.0)) {
            return Err(CliError::ConfigInvalid(format!("nu {nu} must be > 0")));
        }
        if let Some(&r) = e.ranges.iter().find(|&&r| !(r > 0.0)) {
            return Err(CliError::ConfigInvalid(format!("range {r} must be > 0")));
        }
        if e.n_obs == 0 || e.replicates == 0 || e.grid.iter().any(|&g| g == 0) {
            return Err(CliError::ConfigInvalid(format!(
                "n_obs ({}), replicates ({}), and grid {:?} must be positive",
                e.n_obs, e.replicates, e.grid
            )));
        }
        if !(e.noise_std > 0.0) {
            return Err(CliError::ConfigInvalid(format!(
                "noise_std {} must be > 0",
                e.noise_std
            )));
        }
        if !(e.expansion_factor >= 0.0) {
            return Err(CliError::ConfigInvalid(format!(
                "expansion_factor {} must be >= 0",
                e.expansion_factor
            )));
        }
        if e.timing_repeats == 0 {
            return Err(CliError::ConfigInvalid(
                "timing_repeats must be >= 1".into(),
            ));
        }
        for c in &self.methods.convolution {
            if c.lattice.iter().any(|&n| n == 0) {
                return Err(CliError::ConfigInvalid(format!(
                    "convolution lattice {:?} for nu={} must be positive",
                    c.lattice, c.nu
                )));
            }
        }
        for t in &self.methods.taper {
            if !(t.theta > 0.0) {
                return Err(CliError::ConfigInvalid(format!(
                    "taper theta {} for nu={} must be > 0",
                    t.theta, t.nu
                )));
            }
        }
        if let Some(sweep) = &self.taper_sweep {
            if !(sweep.theta_start > 0.0)
                || !(sweep.theta_step > 0.0)
                || sweep.theta_stop < sweep.theta_start
            {
                return Err(CliError::ConfigInvalid(format!(
                    "theta sweep [{}, {}] step {} is not a valid grid",
                    sweep.theta_start, sweep.theta_stop, sweep.theta_step
                )));
            }
            if let Some(&r) = sweep.true_ranges.iter().find(|&&r| !(r > 0.0)) {
                return Err(CliError::ConfigInvalid(format!(
                    "sweep true range {r} must be > 0"
                )));
            }
        }
        Ok(())
    }
}

impl ExperimentConfig {
    /// The square observation window.
    pub fn domain_box(&self) -> BoundingBox {
        BoundingBox::square(self.domain[0], self.domain[1])
    }

    /// Unit-variance field parameters for one (nu, range) combination.
    pub fn params(&self, nu: f64, range: f64) -> Result<MaternParams> {
        Ok(MaternParams::from_range(nu, range, 2)?)
    }

    /// The engine-level experiment for one (nu, range) combination.
    pub fn experiment(&self, nu: f64, range: f64) -> Result<Experiment> {
        let mut exp = Experiment::new(
            self.params(nu, range)?,
            self.domain_box(),
            self.n_obs,
            self.noise_std,
            self.grid,
            self.replicates,
            self.seed,
        )?;
        exp.dense_cap = self.dense_cap;
        Ok(exp)
    }

    /// Margin length added to every side of a basis domain at a given range.
    pub fn expansion_margin(&self, range: f64) -> f64 {
        self.expansion_factor * range
    }
}

impl MethodsConfig {
    /// The configured kernel lattice for a smoothness value, if any.
    pub fn convolution_for(&self, nu: f64) -> Option<[usize; 2]> {
        self.convolution
            .iter()
            .find(|c| (c.nu - nu).abs() < 1e-9)
            .map(|c| c.lattice)
    }

    /// The configured taper entry for a smoothness value, if any.
    pub fn taper_for(&self, nu: f64) -> Option<&TaperEntry> {
        self.taper.iter().find(|t| (t.nu - nu).abs() < 1e-9)
    }
}
