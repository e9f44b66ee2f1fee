//! Deterministic CSV output.
//!
//! Every number is printed with 12 significant digits in the style of C's
//! `%.12g`, so identical inputs always give identical bytes.

use std::fs;
use std::path::Path;

use lke_core::Grid2D;

use crate::error::CliError;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `%.12g`: shortest of fixed or exponent form, trailing zeros removed.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let p = SIGNIFICANT_DIGITS;
    let sci = format!("{:.*e}", p - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -4 || exp >= p as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp) as usize;
        trim_fraction(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Renders `header` and `rows` into CSV text.
pub fn render(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| format_number(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Writes rows under `header`; an empty table is refused before the file is
/// touched.
pub fn write_rows(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    if rows.is_empty() {
        return Err(CliError::Usage(format!(
            "{}: refusing to write an empty table",
            path.display()
        )));
    }
    if let Some(bad) = rows.iter().flatten().find(|v| !v.is_finite()) {
        return Err(CliError::Numerical(format!(
            "{}: non-finite value {bad} in output",
            path.display()
        )));
    }
    fs::write(path, render(header, rows)).map_err(|e| CliError::io(path, e))
}

/// `x,y,psi` rows in ascending `x`, then `y`.
pub fn write_grid_csv(grid: &Grid2D, path: &Path) -> Result<(), CliError> {
    let rows: Vec<Vec<f64>> = grid.iter().map(|(x, y, v)| vec![x, y, v]).collect();
    write_rows(path, &["x", "y", "psi"], &rows)
}

/// `x,d` rows.
pub fn write_distribution_csv(samples: &[(f64, f64)], path: &Path) -> Result<(), CliError> {
    let rows: Vec<Vec<f64>> = samples.iter().map(|&(x, d)| vec![x, d]).collect();
    write_rows(path, &["x", "d"], &rows)
}

/// `xx1,xx2,d` rows.
pub fn write_distribution3_csv(samples: &[(f64, f64, f64)], path: &Path) -> Result<(), CliError> {
    let rows: Vec<Vec<f64>> = samples.iter().map(|&(a, b, d)| vec![a, b, d]).collect();
    write_rows(path, &["xx1", "xx2", "d"], &rows)
}

/// `E_m,W` rows.
pub fn write_broadening_csv(curve: &[(f64, f64)], path: &Path) -> Result<(), CliError> {
    let rows: Vec<Vec<f64>> = curve.iter().map(|&(em, w)| vec![em, w]).collect();
    write_rows(path, &["E_m", "W"], &rows)
}
