//! `taper-sweep`: kriging error and solve/predict times as a function of the
//! taper range, against a fixed first-order spline Markov baseline.

use std::path::{Path, PathBuf};

use matfield::kriging::{KrigingProblem, MethodSpec};
use matfield::metrics::kriging_error;
use matfield::taper::{select_taper_kind, TaperSpec};

use crate::config::{MethodName, RunConfig};
use crate::csvio::{fmt_f64, Table};
use crate::error::{CliError, Result};
use crate::methods::{build_method, BuiltMethod};
use crate::runner::{run_timed, simulate_replicates};

pub const HEADER: &[&str] = &[
    "true_range",
    "replicate",
    "theta",
    "kriging_error_taper",
    "t_step2_taper",
    "t_step23_taper",
    "kriging_error_s1",
    "t_step2_s1",
    "t_step23_s1",
];

/// Runs the sweep and writes `taper_sweep.csv`.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<PathBuf> {
    let sweep = config
        .taper_sweep
        .as_ref()
        .ok_or(CliError::MissingSection("taper_sweep"))?;
    let exp_cfg = &config.experiment;
    if exp_cfg.nus.len() != 1 {
        return Err(CliError::ConfigInvalid(format!(
            "taper-sweep uses a single smoothness; config lists {}",
            exp_cfg.nus.len()
        )));
    }
    let nu = exp_cfg.nus[0];
    let kind = select_taper_kind(nu)?;
    let thetas = sweep.thetas();

    let mut table = Table::new(HEADER);
    for &true_range in &sweep.true_ranges {
        let exp = exp_cfg.experiment(nu, true_range)?;
        let params = exp.params;
        let grid = exp.prediction_grid();
        let draws = simulate_replicates(&exp)?;

        let baseline = match build_method(
            MethodName::MarkovS1,
            &config.methods,
            exp_cfg,
            &params,
            true_range,
        )? {
            BuiltMethod::Ready(spec) => spec,
            BuiltMethod::Skipped { reason } => {
                return Err(CliError::ConfigInvalid(format!(
                    "sweep baseline unavailable: {reason}"
                )))
            }
        };

        for (replicate, draw) in draws.iter().enumerate() {
            let mut optimal_problem = KrigingProblem::new(
                params,
                &draw.obs,
                &draw.y,
                exp.noise_std,
                &grid,
                MethodSpec::Optimal,
            )?;
            optimal_problem.dense_cap = exp_cfg.dense_cap;
            let optimal = run_timed(&optimal_problem, 1)?;

            // the baseline does not depend on theta: one run per replicate
            let mut s1_problem = KrigingProblem::new(
                params,
                &draw.obs,
                &draw.y,
                exp.noise_std,
                &grid,
                baseline.clone(),
            )?;
            s1_problem.dense_cap = exp_cfg.dense_cap;
            let s1 = run_timed(&s1_problem, exp_cfg.timing_repeats)?;
            let s1_error = kriging_error(&s1, &optimal)?;

            for &theta in &thetas {
                let spec = MethodSpec::Taper(TaperSpec::new(kind, theta)?);
                let mut problem = KrigingProblem::new(
                    params,
                    &draw.obs,
                    &draw.y,
                    exp.noise_std,
                    &grid,
                    spec,
                )?;
                problem.dense_cap = exp_cfg.dense_cap;
                let taper = run_timed(&problem, exp_cfg.timing_repeats)?;
                let taper_error = kriging_error(&taper, &optimal)?;
                table.push(&[
                    fmt_f64(true_range),
                    replicate.to_string(),
                    fmt_f64(theta),
                    fmt_f64(taper_error),
                    fmt_f64(taper.timings.step2),
                    fmt_f64(taper.timings.step2 + taper.timings.step3),
                    fmt_f64(s1_error),
                    fmt_f64(s1.timings.step2),
                    fmt_f64(s1.timings.step2 + s1.timings.step3),
                ]);
            }
        }
    }

    let path = out_dir.join("taper_sweep.csv");
    table.write(&path)?;
    Ok(path)
}
