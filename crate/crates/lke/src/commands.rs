//! Command execution.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use lke_core::lke_kernel::{psi_grid, trace_out_y, trace_out_y3};
use lke_core::measurement::{broadening_curve, post_measurement_slice, SliceSpec};
use lke_core::spin_algebra::{
    correlated_form, search_correlated_form, xz_state, xze_state, Outcome, Spin, SpinAxis, SpinState,
};
use lke_core::qsqrt2::Rational;
use lke_core::QSqrt2;

use crate::config::{Command, RunConfig};
use crate::csv::{
    write_broadening_csv, write_distribution3_csv, write_distribution_csv, write_grid_csv, write_rows,
};
use crate::error::CliError;
use crate::parallel::Pool;
use crate::verify::run_suite;

/// Ratio of boundary to peak squared kernel above which a trace-out warns
/// that the `y` range is too short.
pub const EDGE_WARNING: f64 = 0.1;

/// What a command produced, before anything is printed.
#[derive(Debug, Default)]
pub struct Report {
    pub stdout: String,
    pub warnings: Vec<String>,
    pub written: Vec<PathBuf>,
    /// Names of failed verification checks.
    pub failed: Vec<&'static str>,
}

/// Runs `config`, printing the report and a one-line diagnostic on failure,
/// and returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    match execute(config) {
        Ok(report) => {
            print!("{}", report.stdout);
            let _ = std::io::stdout().flush();
            for w in &report.warnings {
                eprintln!("lke: warning: {w}");
            }
            if report.failed.is_empty() {
                0
            } else {
                let e = CliError::Verification(report.failed.join(", "));
                eprintln!("lke: {e}");
                e.exit_code()
            }
        }
        Err(e) => {
            eprintln!("lke: {}", one_line(&e.to_string()));
            e.exit_code()
        }
    }
}

pub fn one_line(s: &str) -> String {
    s.lines().map(str::trim).filter(|l| !l.is_empty()).collect::<Vec<_>>().join("; ")
}

pub fn execute(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    let pool = Pool::new(config.threads).map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let mut report = Report::default();
    match config.command {
        Command::Fig1 => fig1(config, &pool, &mut report)?,
        Command::Fig2 => fig2(config, &pool, &mut report)?,
        Command::Fig3 => fig3(config, &pool, &mut report)?,
        Command::Nonlocal => nonlocal(config, &mut report)?,
        Command::Spin => report.stdout = spin_text()?,
        Command::Verify => {
            let suite = run_suite(&pool);
            report.stdout = suite.table();
            report.failed = suite.failures();
        }
    }
    Ok(report)
}

fn wrote(report: &mut Report, path: &Path, what: String) {
    let _ = writeln!(report.stdout, "wrote {} ({what})", path.display());
    report.written.push(path.to_path_buf());
}

fn edge_check(report: &mut Report, edge_ratio: f64) {
    if edge_ratio > EDGE_WARNING {
        report.warnings.push(format!(
            "squared kernel on the y boundary is {edge_ratio:.3} of its peak; widen --y-min/--y-max"
        ));
    }
}

fn fig1(c: &RunConfig, pool: &Pool, report: &mut Report) -> Result<(), CliError> {
    let p = c.kernel_params()?;
    let grid = psi_grid(&p, c.x.axis("x")?, c.y.axis("y")?, c.tol, pool)?;
    write_grid_csv(&grid, &c.out)?;
    let what = format!("{}x{} samples", grid.x_axis().count(), grid.y_axis().count());
    wrote(report, &c.out, what);
    Ok(())
}

fn fig2(c: &RunConfig, pool: &Pool, report: &mut Report) -> Result<(), CliError> {
    let p = c.kernel_params()?;
    let t = trace_out_y(&p, c.x.axis("x")?, c.y.axis("y")?, c.tol, pool)?;
    edge_check(report, t.edge_ratio);
    write_distribution_csv(&t.samples, &c.out)?;
    wrote(report, &c.out, format!("{} samples", t.samples.len()));
    Ok(())
}

fn fig3(c: &RunConfig, pool: &Pool, report: &mut Report) -> Result<(), CliError> {
    let p = c.kernel_params()?;
    let t = trace_out_y3(&p, c.x.axis("xx1")?, c.xx2.axis("xx2")?, c.y.axis("y")?, c.tol, pool)?;
    edge_check(report, t.edge_ratio);
    write_distribution3_csv(&t.samples, &c.out)?;
    let what = format!("{} samples, {} evaluated", t.samples.len(), t.evaluated_points);
    wrote(report, &c.out, what);
    Ok(())
}

/// Path of the density-slice table written next to the broadening curve.
pub fn slices_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}_slices.{}", ext.to_string_lossy()),
        None => format!("{stem}_slices"),
    };
    out.with_file_name(name)
}

fn nonlocal(c: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let p = c.kernel_params()?;
    let slice = SliceSpec {
        xx1_axis: c.x.axis("xx1")?,
        shell_count: c.shell_count,
    };
    let curve = broadening_curve(&c.measured, &p, &slice)?;
    let mut rows = Vec::new();
    for &em in &c.measured {
        let density = post_measurement_slice(em, &p, &slice)?;
        rows.extend(density.samples().iter().map(|&(x, d)| vec![em, x, d]));
    }
    write_broadening_csv(&curve, &c.out)?;
    let slices = slices_path(&c.out);
    write_rows(&slices, &["E_m", "xx1", "d"], &rows)?;

    let _ = writeln!(report.stdout, "E_m W");
    for (em, w) in &curve {
        let _ = writeln!(report.stdout, "{em} {w}");
    }
    wrote(report, &c.out, format!("{} points", curve.len()));
    wrote(report, &slices, format!("{} samples", rows.len()));
    Ok(())
}

fn label(outcome: &Outcome, axis: SpinAxis) -> String {
    outcome.iter().map(|s| s.symbol(axis)).collect()
}

fn probabilities(report: &mut String, state: &SpinState, sites: &[usize], axis: SpinAxis) -> Result<(), CliError> {
    let probs = state.outcome_probabilities(sites)?;
    let cells: Vec<String> = probs.iter().map(|(o, p)| format!("{} {p}", label(o, axis))).collect();
    let _ = writeln!(report, "  P(sites 1,2): {}", cells.join(", "));
    Ok(())
}

fn spin_text() -> Result<String, CliError> {
    let mut out = String::new();
    let xz = xz_state();
    let _ = writeln!(out, "XZ  = {xz}");
    let _ = writeln!(out, "    = {}", xz.in_basis(SpinAxis::X));
    probabilities(&mut out, &xz.in_basis(SpinAxis::X), &[0, 1], SpinAxis::X)?;

    let xze = xze_state();
    let xze_x = xze.in_basis(SpinAxis::X);
    let _ = writeln!(out, "XZE = {xze}");
    let _ = writeln!(out, "    = {xze_x}");
    probabilities(&mut out, &xze_x, &[0, 1], SpinAxis::X)?;

    let m = xze.project(2, SpinAxis::Z, Spin::Minus)?;
    let _ = writeln!(out, "site 3 measured {}:", Spin::Minus.symbol(SpinAxis::Z));
    let _ = writeln!(out, "M   = {m}");
    let m_x = m.in_basis(SpinAxis::X);
    let _ = writeln!(out, "    = {m_x}");
    probabilities(&mut out, &m_x, &[0, 1], SpinAxis::X)?;

    let form = correlated_form(&SpinState::right(), &SpinState::left())?;
    let _ = writeln!(out, "correlated form with s = →, t = ←: {form}");
    probabilities(&mut out, &form, &[0, 1], SpinAxis::X)?;

    let mut grid = Vec::new();
    for n in -2..=2 {
        grid.push(QSqrt2::from_rational(Rational::new(n, 2)));
        grid.push(QSqrt2::frac_1_sqrt_2() * Rational::from_integer(n));
    }
    let found = search_correlated_form(&xze_x, &grid);
    let _ = writeln!(
        out,
        "correlated forms matching XZE over {} coefficients per slot: {}",
        grid.len(),
        if found.is_some() { "found" } else { "none" }
    );
    Ok(out)
}
