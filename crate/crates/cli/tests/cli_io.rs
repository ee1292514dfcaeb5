//! End-to-end contracts of the benchmark harness: output files are
//! byte-deterministic for a fixed manifest and seed (timing columns aside),
//! combinations a method cannot serve surface as note rows instead of
//! vanishing, grid dumps parse back, and the binary fails loudly on bad
//! manifests.

use std::path::Path;
use std::process::Command;

use matfield_bench::commands::{cov_error, demo_predict, kriging_bench, taper_sweep};
use matfield_bench::config::RunConfig;
use matfield_bench::error::CliError;

/// A manifest small enough that every test in this file runs in milliseconds:
/// 80 observations on [0, 3]², a 6×6 prediction grid, two replicates.
const TINY: &str = r#"
[experiment]
nus = [2.0]
ranges = [0.8]
domain = [0.0, 3.0]
n_obs = 80
noise_std = 0.05
grid = [6, 6]
replicates = 2
seed = 42

[methods]
list = ["optimal", "markov-s1", "convolution", "taper"]
spline_nodes = 10
db3_nodes = 8

[[methods.convolution]]
nu = 2.0
lattice = [4, 4]

[[methods.taper]]
nu = 2.0
theta = 0.5
"#;

fn tiny_config() -> RunConfig {
    RunConfig::from_toml_str(TINY).expect("tiny manifest parses")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).expect("output file readable")
}

fn parse_rows(csv: &str, header: &[&str]) -> Vec<Vec<String>> {
    let mut lines = csv.lines();
    let head = lines.next().expect("csv has a header");
    assert_eq!(head, header.join(","));
    lines
        .map(|line| line.split(',').map(str::to_owned).collect())
        .collect()
}

/// Blanks the listed columns in every data row so runs can be compared
/// modulo wall-clock measurements.
fn blank_columns(csv: &str, columns: &[usize]) -> String {
    csv.lines()
        .enumerate()
        .map(|(i, line)| {
            if i == 0 {
                return line.to_owned();
            }
            let mut fields: Vec<&str> = line.split(',').collect();
            for &c in columns {
                fields[c] = "";
            }
            fields.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn cov_error_output_is_byte_deterministic() {
    let config = tiny_config();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let (path_a, ran, skipped) = cov_error::run(&config, dir_a.path()).unwrap();
    let (path_b, _, _) = cov_error::run(&config, dir_b.path()).unwrap();
    assert_eq!(ran, 4);
    assert_eq!(skipped, 0);
    let text_a = read(&path_a);
    assert_eq!(text_a, read(&path_b), "same manifest, same bytes");

    let rows = parse_rows(&text_a, cov_error::HEADER);
    assert_eq!(rows.len(), 4);
    for row in &rows {
        // only the basis methods have a basis size to report
        if row[0] == "markov-s1" || row[0] == "convolution" {
            assert!(row[3].parse::<usize>().unwrap() > 0);
        } else {
            assert!(row[3].is_empty());
        }
        let epsilon: f64 = row[4].parse().unwrap();
        assert!(epsilon.is_finite() && epsilon >= 0.0);
        assert!(row[5].is_empty(), "no skip note on a ready method");
    }
}

#[test]
fn kriging_bench_reruns_match_outside_timing_columns() {
    let config = tiny_config();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let paths_a = kriging_bench::run(&config, dir_a.path()).unwrap();
    let paths_b = kriging_bench::run(&config, dir_b.path()).unwrap();

    // rows: t_step1/2/3 are columns 5..8; aggregate: timing stats are 6..14
    let rows_a = blank_columns(&read(&paths_a.rows), &[5, 6, 7]);
    let rows_b = blank_columns(&read(&paths_b.rows), &[5, 6, 7]);
    assert_eq!(rows_a, rows_b);
    let agg_a = blank_columns(&read(&paths_a.aggregate), &[6, 7, 8, 9, 10, 11, 12, 13]);
    let agg_b = blank_columns(&read(&paths_b.aggregate), &[6, 7, 8, 9, 10, 11, 12, 13]);
    assert_eq!(agg_a, agg_b);

    // 4 ready methods × 2 replicates, no skip rows for this manifest
    let rows = parse_rows(&read(&paths_a.rows), kriging_bench::ROWS_HEADER);
    assert_eq!(rows.len(), 8);
    // the error reference reproduces itself exactly
    for row in rows.iter().filter(|r| r[0] == "optimal") {
        assert_eq!(row[4].parse::<f64>().unwrap(), 0.0);
    }
    let agg = parse_rows(&read(&paths_a.aggregate), kriging_bench::AGG_HEADER);
    assert_eq!(agg.len(), 4);
    for row in &agg {
        assert_eq!(row[3].parse::<usize>().unwrap(), 2);
    }
}

#[test]
fn unservable_combinations_become_note_rows() {
    // nu = 1 in two dimensions: the convolution kernel degenerates, and the
    // tiny manifest has no taper entry for it either.
    let text = TINY
        .replace("nus = [2.0]", "nus = [1.0]")
        .replace("nu = 2.0", "nu = 2.0 # entries left at nu 2");
    let config = RunConfig::from_toml_str(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (path, ran, skipped) = cov_error::run(&config, dir.path()).unwrap();
    assert_eq!(ran, 2, "optimal and markov-s1 still run");
    assert_eq!(skipped, 2);

    let rows = parse_rows(&read(&path), cov_error::HEADER);
    let conv = rows.iter().find(|r| r[0] == "convolution").unwrap();
    assert!(conv[4].is_empty(), "no epsilon for a skipped method");
    assert!(conv[5].contains("kernel singular"), "note: {}", conv[5]);
    let taper = rows.iter().find(|r| r[0] == "taper").unwrap();
    assert!(taper[5].contains("no taper range"), "note: {}", taper[5]);
}

#[test]
fn taper_sweep_rows_cover_the_theta_grid() {
    let text = format!(
        "{TINY}\n[taper_sweep]\ntheta_start = 0.3\ntheta_stop = 0.6\ntheta_step = 0.3\ntrue_ranges = [0.8]\n"
    );
    let text = text.replace(
        "list = [\"optimal\", \"markov-s1\", \"convolution\", \"taper\"]",
        "list = [\"markov-s1\", \"taper\"]",
    );
    let config = RunConfig::from_toml_str(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = taper_sweep::run(&config, dir.path()).unwrap();
    let rows = parse_rows(&read(&path), taper_sweep::HEADER);
    // 1 true range × 2 replicates × 2 thetas
    assert_eq!(rows.len(), 4);
    for row in &rows {
        for field in row {
            assert!(!field.is_empty(), "sweep rows have no optional fields");
        }
        let taper_err: f64 = row[3].parse().unwrap();
        let s1_err: f64 = row[6].parse().unwrap();
        assert!(taper_err.is_finite() && taper_err >= 0.0);
        assert!(s1_err.is_finite() && s1_err >= 0.0);
    }
}

#[test]
fn demo_predict_grids_parse_back() {
    let text = TINY.replace(
        "list = [\"optimal\", \"markov-s1\", \"convolution\", \"taper\"]",
        "list = [\"optimal\", \"taper\"]",
    );
    let config = RunConfig::from_toml_str(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest_path = demo_predict::run(&config, dir.path()).unwrap();
    let manifest = parse_rows(&read(&manifest_path), demo_predict::MANIFEST_HEADER);
    assert_eq!(manifest.len(), 2);

    let mut grids = Vec::new();
    for row in &manifest {
        assert!(row[2].is_empty(), "both demo methods are servable");
        let grid_text = read(&dir.path().join(&row[1]));
        let mut lines = grid_text.lines();
        assert_eq!(lines.next().unwrap(), "# dims 6 6");
        assert!(lines.next().unwrap().starts_with("# bbox "));
        let values: Vec<Vec<f64>> = lines
            .map(|line| {
                line.split(' ')
                    .map(|v| v.parse::<f64>().expect("grid values parse"))
                    .collect()
            })
            .collect();
        assert_eq!(values.len(), 6);
        assert!(values.iter().all(|row| row.len() == 6));
        assert!(values.iter().flatten().all(|v| v.is_finite()));
        grids.push(values);
    }
    // different methods, genuinely different fields
    assert!(grids[0] != grids[1]);
}

#[test]
fn manifest_files_with_unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("typo.toml");
    std::fs::write(&path, TINY.replace("noise_std", "noise_sd")).unwrap();
    match RunConfig::from_path(&path) {
        Err(CliError::ConfigParse(_)) => {}
        other => panic!("expected a parse rejection, got {other:?}"),
    }
}

#[test]
fn selftest_binary_recomputes_every_constant() {
    let output = Command::new(env!("CARGO_BIN_EXE_matfield-bench"))
        .arg("selftest")
        .output()
        .expect("binary runs");
    assert!(output.status.success(), "selftest exits zero");
    let stdout = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert!(lines.len() >= 5, "one line per checked constant group");
    assert!(lines.iter().all(|l| l.starts_with("selftest: ")));
    let (summary, checks) = lines.split_last().unwrap();
    assert!(checks.iter().all(|l| l.ends_with(" ok")));
    assert_eq!(*summary, "selftest: all checks passed");
}

#[test]
fn binary_fails_loudly_on_a_bad_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[experiment]\nnus = [0.0]\n").unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_matfield-bench"))
        .args(["cov-error", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path())
        .output()
        .expect("binary runs");
    assert!(!output.status.success());
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.starts_with("error: "), "stderr: {stderr}");
}
