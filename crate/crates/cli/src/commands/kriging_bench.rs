//! `kriging-bench`: per-replicate kriging error against the optimal
//! predictor plus three-step timings, with a mean/std aggregate table.

use std::path::{Path, PathBuf};

use matfield::kriging::{KrigingProblem, KrigingResult, MethodSpec};
use matfield::metrics::kriging_error;

use crate::config::{MethodName, RunConfig};
use crate::csvio::{fmt_f64, fmt_opt_f64, fmt_opt_usize, mean_std, Table};
use crate::error::Result;
use crate::methods::{build_method, BuiltMethod};
use crate::runner::{run_timed, sanitize_note, simulate_replicates};

pub const ROWS_HEADER: &[&str] = &[
    "method",
    "nu",
    "range",
    "replicate",
    "kriging_error",
    "t_step1",
    "t_step2",
    "t_step3",
    "n_basis",
    "theta",
    "factor_nnz",
    "note",
];

pub const AGG_HEADER: &[&str] = &[
    "method",
    "nu",
    "range",
    "replicates",
    "kriging_error_mean",
    "kriging_error_std",
    "t_step1_mean",
    "t_step1_std",
    "t_step2_mean",
    "t_step2_std",
    "t_step3_mean",
    "t_step3_std",
    "t_total_mean",
    "t_total_std",
];

/// Per-replicate samples for one (method, nu, range) cell of the aggregate.
#[derive(Default)]
struct Samples {
    error: Vec<f64>,
    step1: Vec<f64>,
    step2: Vec<f64>,
    step3: Vec<f64>,
    total: Vec<f64>,
}

impl Samples {
    fn push(&mut self, error: f64, result: &KrigingResult) {
        self.error.push(error);
        self.step1.push(result.timings.step1);
        self.step2.push(result.timings.step2);
        self.step3.push(result.timings.step3);
        self.total.push(result.timings.total());
    }
}

pub struct BenchPaths {
    pub rows: PathBuf,
    pub aggregate: PathBuf,
}

/// Runs the benchmark and writes `kriging_bench.csv` (replicate rows) and
/// `kriging_bench_aggregate.csv` (mean/std per method and combination).
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<BenchPaths> {
    let exp_cfg = &config.experiment;
    let mut rows = Table::new(ROWS_HEADER);
    let mut agg = Table::new(AGG_HEADER);

    for &nu in &exp_cfg.nus {
        for &range in &exp_cfg.ranges {
            let exp = exp_cfg.experiment(nu, range)?;
            let params = exp.params;
            let grid = exp.prediction_grid();

            // simulation fans out across replicates; all timed engine runs
            // below stay on this thread
            let draws = simulate_replicates(&exp)?;

            let built: Vec<(MethodName, BuiltMethod)> = config
                .methods
                .list
                .iter()
                .map(|&name| {
                    Ok((
                        name,
                        build_method(name, &config.methods, exp_cfg, &params, range)?,
                    ))
                })
                .collect::<Result<_>>()?;

            // a method unavailable for this combination yields one reason row
            for (name, bm) in &built {
                if let BuiltMethod::Skipped { reason } = bm {
                    rows.push(&[
                        name.to_string(),
                        fmt_f64(nu),
                        fmt_f64(range),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        sanitize_note(reason),
                    ]);
                }
            }

            let mut samples: Vec<Samples> = built.iter().map(|_| Samples::default()).collect();

            for (replicate, draw) in draws.iter().enumerate() {
                // the optimal predictor is the accuracy reference; it runs
                // whether or not it is listed
                let mut optimal_problem = KrigingProblem::new(
                    params,
                    &draw.obs,
                    &draw.y,
                    exp.noise_std,
                    &grid,
                    MethodSpec::Optimal,
                )?;
                optimal_problem.dense_cap = exp_cfg.dense_cap;
                let optimal = run_timed(&optimal_problem, exp_cfg.timing_repeats)?;

                for ((name, bm), cell) in built.iter().zip(&mut samples) {
                    let BuiltMethod::Ready(spec) = bm else {
                        continue;
                    };
                    let (result, error) = if *name == MethodName::Optimal {
                        (optimal.clone(), 0.0)
                    } else {
                        let mut problem = KrigingProblem::new(
                            params,
                            &draw.obs,
                            &draw.y,
                            exp.noise_std,
                            &grid,
                            spec.clone(),
                        )?;
                        problem.dense_cap = exp_cfg.dense_cap;
                        let result = run_timed(&problem, exp_cfg.timing_repeats)?;
                        let error = kriging_error(&result, &optimal)?;
                        (result, error)
                    };
                    cell.push(error, &result);
                    rows.push(&[
                        name.to_string(),
                        fmt_f64(nu),
                        fmt_f64(range),
                        replicate.to_string(),
                        fmt_f64(error),
                        fmt_f64(result.timings.step1),
                        fmt_f64(result.timings.step2),
                        fmt_f64(result.timings.step3),
                        fmt_opt_usize(result.meta.n_basis),
                        fmt_opt_f64(result.meta.theta),
                        fmt_opt_usize(result.meta.factor_nnz),
                        String::new(),
                    ]);
                }
            }

            for ((name, bm), cell) in built.iter().zip(&samples) {
                if matches!(bm, BuiltMethod::Skipped { .. }) || cell.error.is_empty() {
                    continue;
                }
                let (e_mean, e_std) = mean_std(&cell.error);
                let (s1_mean, s1_std) = mean_std(&cell.step1);
                let (s2_mean, s2_std) = mean_std(&cell.step2);
                let (s3_mean, s3_std) = mean_std(&cell.step3);
                let (t_mean, t_std) = mean_std(&cell.total);
                agg.push(&[
                    name.to_string(),
                    fmt_f64(nu),
                    fmt_f64(range),
                    cell.error.len().to_string(),
                    fmt_f64(e_mean),
                    fmt_f64(e_std),
                    fmt_f64(s1_mean),
                    fmt_f64(s1_std),
                    fmt_f64(s2_mean),
                    fmt_f64(s2_std),
                    fmt_f64(s3_mean),
                    fmt_f64(s3_std),
                    fmt_f64(t_mean),
                    fmt_f64(t_std),
                ]);
            }
        }
    }

    let paths = BenchPaths {
        rows: out_dir.join("kriging_bench.csv"),
        aggregate: out_dir.join("kriging_bench_aggregate.csv"),
    };
    rows.write(&paths.rows)?;
    agg.write(&paths.aggregate)?;
    Ok(paths)
}
