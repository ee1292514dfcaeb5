//! `cov-error`: standardized L² covariance error per (method, nu, range).

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use matfield::metrics::{covariance_error, method_covariance, EpsilonGrid};

use crate::config::RunConfig;
use crate::csvio::{fmt_f64, fmt_opt_usize, Table};
use crate::error::Result;
use crate::methods::{build_method, spec_n_basis, BuiltMethod};
use crate::runner::sanitize_note;

pub const HEADER: &[&str] = &["method", "nu", "range", "n_basis", "epsilon", "note"];

/// Runs the sweep and writes `cov_error.csv`. Returns the file path and the
/// number of (ran, skipped) combinations.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<(PathBuf, usize, usize)> {
    let exp = &config.experiment;
    let domain = exp.domain_box();

    // one work item per (nu, range, method), in output order
    let mut combos = Vec::new();
    for &nu in &exp.nus {
        for &range in &exp.ranges {
            for &name in &config.methods.list {
                combos.push((nu, range, name));
            }
        }
    }

    // the error functional is deterministic, so combos can run in parallel
    // and be emitted in order afterwards
    let rows: Vec<Vec<String>> = combos
        .par_iter()
        .map(|&(nu, range, name)| -> Result<Vec<String>> {
            let params = exp.params(nu, range)?;
            let built = build_method(name, &config.methods, exp, &params, range)?;
            Ok(match built {
                BuiltMethod::Skipped { reason } => vec![
                    name.to_string(),
                    fmt_f64(nu),
                    fmt_f64(range),
                    String::new(),
                    String::new(),
                    sanitize_note(&reason),
                ],
                BuiltMethod::Ready(spec) => {
                    let epsilon =
                        covariance_error(&params, &domain, &EpsilonGrid::default(), |sites, u| {
                            method_covariance(&spec, &params, sites, u)
                        })?;
                    vec![
                        name.to_string(),
                        fmt_f64(nu),
                        fmt_f64(range),
                        fmt_opt_usize(spec_n_basis(&spec)),
                        fmt_f64(epsilon),
                        String::new(),
                    ]
                }
            })
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(HEADER);
    let mut skipped = 0;
    for row in &rows {
        if !row[5].is_empty() {
            skipped += 1;
        }
        table.push(row);
    }
    let path = out_dir.join("cov_error.csv");
    table.write(&path)?;
    Ok((path, rows.len() - skipped, skipped))
}
