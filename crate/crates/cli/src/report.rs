//! Bit-stable output: every float is rendered in scientific notation with
//! exactly 12 significant digits, CSV rows are newline-terminated, and JSON
//! comes from fixed-order structs only. Two runs with the same inputs must
//! produce identical bytes, so nothing here may consult the clock, the
//! filesystem layout, or iteration order of any hash-based container.

use anyhow::{Context, Result};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

/// `12` significant digits, `0` spelled plainly, sign of `-0` dropped.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    format!("{v:.11e}")
}

/// A cell that is either a formatted value or empty (optional columns).
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &str) -> Csv {
        let mut buf = String::new();
        buf.push_str(header);
        buf.push('\n');
        Csv {
            buf,
            columns: header.split(',').count(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(
            cells.len(),
            self.columns,
            "row width does not match the header"
        );
        let mut first = true;
        for cell in cells {
            if !first {
                self.buf.push(',');
            }
            first = false;
            self.buf.push_str(cell);
        }
        self.buf.push('\n');
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.buf.as_bytes())
            .with_context(|| format!("cannot write {}", path.display()))
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).context("cannot serialize report to JSON")?;
    text.push('\n');
    std::fs::write(path, text.as_bytes())
        .with_context(|| format!("cannot write {}", path.display()))
}

/// One human-readable status line per check on stdout.
pub fn status_line(name: &str, hard_failures: &[String], flags: &[String]) -> String {
    let mut line = String::new();
    if hard_failures.is_empty() {
        let _ = write!(line, "check {name}: ok");
    } else {
        let _ = write!(line, "check {name}: FAILED ({})", hard_failures.len());
    }
    if !flags.is_empty() {
        let _ = write!(line, " [{} flag(s)]", flags.len());
    }
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_twelve_significant_digits() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(-0.0), "0");
        assert_eq!(fmt_float(1.0), "1.00000000000e0");
        assert_eq!(fmt_float(-0.5), "-5.00000000000e-1");
        assert_eq!(fmt_float(std::f64::consts::PI), "3.14159265359e0");
        assert_eq!(fmt_float(1.0e-9), "1.00000000000e-9");
        assert_eq!(fmt_float(6400.0), "6.40000000000e3");
    }

    #[test]
    fn csv_rows_are_newline_terminated() {
        let mut csv = Csv::new("a,b");
        csv.row(&["1".into(), fmt_float(2.0)]);
        assert_eq!(csv.buf, "a,b\n1,2.00000000000e0\n");
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn csv_rejects_ragged_rows() {
        let mut csv = Csv::new("a,b,c");
        csv.row(&["1".into()]);
    }
}
