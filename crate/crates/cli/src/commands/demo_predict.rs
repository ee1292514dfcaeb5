//! `demo-predict`: one simulated data set, predicted onto a grid by every
//! configured method, written as plain-text matrices for external plotting.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use matfield::kriging::KrigingProblem;
use matfield::metrics::simulate_truth;

use crate::config::RunConfig;
use crate::csvio::{fmt_f64, Table};
use crate::error::{CliError, Result};
use crate::methods::{build_method, BuiltMethod};
use crate::runner::{run_timed, sanitize_note};

pub const MANIFEST_HEADER: &[&str] = &["method", "file", "note"];

/// Runs every configured method on replicate 0 and writes one
/// `demo_<method>.txt` grid per method plus a `demo_manifest.csv` recording
/// files and skip reasons. Returns the manifest path.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<PathBuf> {
    let exp_cfg = &config.experiment;
    if exp_cfg.nus.len() != 1 || exp_cfg.ranges.len() != 1 {
        return Err(CliError::ConfigInvalid(format!(
            "demo-predict uses a single (nu, range) pair; config lists {} x {}",
            exp_cfg.nus.len(),
            exp_cfg.ranges.len()
        )));
    }
    let nu = exp_cfg.nus[0];
    let range = exp_cfg.ranges[0];
    let exp = exp_cfg.experiment(nu, range)?;
    let params = exp.params;
    let draw = simulate_truth(&exp, 0)?;
    let grid = exp.prediction_grid();

    let mut manifest = Table::new(MANIFEST_HEADER);
    for &name in &config.methods.list {
        match build_method(name, &config.methods, exp_cfg, &params, range)? {
            BuiltMethod::Skipped { reason } => {
                manifest.push(&[name.to_string(), String::new(), sanitize_note(&reason)]);
            }
            BuiltMethod::Ready(spec) => {
                let mut problem = KrigingProblem::new(
                    params,
                    &draw.obs,
                    &draw.y,
                    exp.noise_std,
                    &grid,
                    spec,
                )?;
                problem.dense_cap = exp_cfg.dense_cap;
                let result = run_timed(&problem, 1)?;
                let file = format!("demo_{name}.txt");
                let path = out_dir.join(&file);
                write_grid(
                    &path,
                    exp_cfg.grid,
                    exp_cfg.domain,
                    &result.predictions,
                )?;
                manifest.push(&[name.to_string(), file, String::new()]);
            }
        }
    }

    let manifest_path = out_dir.join("demo_manifest.csv");
    manifest.write(&manifest_path)?;
    Ok(manifest_path)
}

/// Plain-text matrix: a dims header, a bounding-box header, then one line per
/// first-axis index with second-axis values separated by single spaces (the
/// grid enumerates the last axis fastest).
fn write_grid(path: &Path, dims: [usize; 2], domain: [f64; 2], values: &[f64]) -> Result<()> {
    assert_eq!(values.len(), dims[0] * dims[1]);
    let mut text = String::new();
    let _ = writeln!(text, "# dims {} {}", dims[0], dims[1]);
    let _ = writeln!(
        text,
        "# bbox {} {} {} {}",
        fmt_f64(domain[0]),
        fmt_f64(domain[1]),
        fmt_f64(domain[0]),
        fmt_f64(domain[1])
    );
    for row in values.chunks(dims[1]) {
        let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        text.push_str(&line.join(" "));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|source| CliError::OutputWrite {
        path: path.to_path_buf(),
        source,
    })
}
