//! Minimal CSV emission with a frozen numeric format.
//!
//! All floating-point fields are rendered as `{:.16e}` (17 significant
//! digits), which round-trips every finite `f64`. Files are UTF-8 with LF
//! line endings and a fixed header per command, so reruns with the same
//! config and seed are byte-identical except for timing columns.

use std::path::Path;

use crate::error::{CliError, Result};

/// Renders a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders an optional float; absent values become empty fields.
pub fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Renders an optional integer; absent values become empty fields.
pub fn fmt_opt_usize(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// An in-memory CSV table with a fixed header.
#[derive(Debug)]
pub struct Table {
    header: &'static [&'static str],
    lines: Vec<String>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Table {
        Table {
            header,
            lines: Vec::new(),
        }
    }

    /// Appends one row. Panics (programming error) on column-count mismatch
    /// or fields containing separators, so a malformed row can never be
    /// silently written.
    pub fn push(&mut self, fields: &[String]) {
        assert_eq!(
            fields.len(),
            self.header.len(),
            "row width {} != header width {}",
            fields.len(),
            self.header.len()
        );
        for field in fields {
            assert!(
                !field.contains(',') && !field.contains('\n'),
                "field {field:?} would corrupt the CSV"
            );
        }
        self.lines.push(fields.join(","));
    }

    pub fn n_rows(&self) -> usize {
        self.lines.len()
    }

    /// The serialized file contents.
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    /// Writes the table, replacing any existing file.
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|source| CliError::OutputWrite {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Sample mean and standard deviation (n − 1 in the denominator; zero for a
/// single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// The median of an unordered sample (mean of the middle pair when even).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN timings"));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for &x in &[0.0, 1.0, -1.5, 0.1, 1e-300, 123456.789, f64::MIN_POSITIVE] {
            let text = fmt_f64(x);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back, x, "{text}");
        }
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
    }

    #[test]
    fn table_renders_header_and_lf_rows() {
        let mut t = Table::new(&["a", "b"]);
        t.push(&["1".into(), "x".into()]);
        t.push(&["2".into(), String::new()]);
        assert_eq!(t.to_csv(), "a,b\n1,x\n2,\n");
        assert_eq!(t.n_rows(), 2);
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn table_rejects_ragged_rows() {
        let mut t = Table::new(&["a", "b"]);
        t.push(&["only".into()]);
    }

    #[test]
    fn mean_std_and_median_basics() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-15);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let (m1, s1) = mean_std(&[7.0]);
        assert_eq!((m1, s1), (7.0, 0.0));
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
