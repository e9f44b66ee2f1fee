//! The invariant suite behind `lke verify`.
//!
//! Each check is named `module.property` and reports a one-line detail with
//! the measured quantity next to its bound.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;

use lke_core::gaussian_states::{
    fourier_duality_check, lk_momentum_correlation, lk_position_amplitude, lkl_cm_momentum_covariance,
    lkl_cm_momentum_moments, lkn_position_amplitude, GaussianPairParams, NBodyGaussianParams,
};
use lke_core::lke_kernel::{
    psi, psi3, psi3_integrand, psi_grid, psi_integrand, quadrant_cancellation_check, trace_out_grid,
    trace_out_y3, TraceOut,
};
use lke_core::measurement::{
    broadening_curve, post_measurement_density_2body, shell_points, two_body_momentum_after, width_metric,
    EnergyShell, PositionDensity1D, SliceSpec,
};
use lke_core::numerics::{integrate_1d, integrate_2d_product};
use lke_core::qsqrt2::Rational;
use lke_core::spin_algebra::{all_outcomes, search_correlated_form, xze_state, Spin, SpinAxis, SpinState};
use lke_core::{Axis, Grid2D, KernelParams, QSqrt2, Serial, Sweep, Tolerance};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::csv::render;

const SEED: u64 = 0x1ce_5eed;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct Suite {
    pub checks: Vec<Check>,
}

impl Suite {
    pub fn failures(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status}  {:width$}  {}", c.name, c.detail);
        }
        let failed = self.failures().len();
        let _ = writeln!(out, "{} checks, {} passed, {failed} failed", self.checks.len(), self.checks.len() - failed);
        out
    }

    fn record(&mut self, name: &'static str, outcome: Result<(bool, String), String>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.checks.push(Check { name, passed, detail });
    }
}

type Outcome = Result<(bool, String), String>;

fn bound(value: f64, limit: f64, what: &str) -> (bool, String) {
    (value <= limit, format!("{what} {value:.3e} (limit {limit:.0e})"))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Runs every check, using `sweep` for the grid evaluations.
pub fn run_suite<S: Sweep>(sweep: &S) -> Suite {
    let tol = Tolerance::DEFAULT;
    let mut s = Suite::default();

    s.record("numerics.linearity", numerics_linearity(tol));
    s.record("numerics.reflection", numerics_reflection(tol));
    s.record("numerics.separable_2d", numerics_separable(tol));

    s.record("gaussian.uncertainty_product", gaussian_uncertainty());
    s.record("gaussian.relative_coordinate_only", gaussian_relative_only());
    s.record("gaussian.translation_invariance", gaussian_translation());
    s.record("gaussian.conditional_localisation", gaussian_conditional());
    s.record("gaussian.fourier_duality", gaussian_duality(tol));
    s.record("gaussian.lkl_cm_not_eigenstate", gaussian_lkl_cm(tol));

    let p2 = KernelParams::two_body(1.0, 1.0, 0.0).expect("valid parameters");
    let fig1 = Axis::symmetric(25.0, 1.0)
        .map_err(err)
        .and_then(|a| psi_grid(&p2, a, a, tol, sweep).map_err(err));
    let fig2 = Axis::symmetric(40.0, 0.25)
        .map_err(err)
        .and_then(|a| psi_grid(&p2, a, a, tol, sweep).map_err(err))
        .and_then(|g| trace_out_grid(&g).map(|t| (g, t)).map_err(err));

    s.record("kernel.evenness", fig1.clone().and_then(|g| kernel_evenness(&g, &p2, tol)));
    s.record("kernel.closed_form_slice", kernel_closed_form(&p2, tol));
    s.record("kernel.oracle_equivalence", kernel_oracle(tol));
    s.record("kernel.localisation", fig2.clone().and_then(|(_, t)| kernel_localisation(&t)));
    s.record("kernel.tail_ratio", fig2.clone().and_then(|(g, t)| kernel_tail_ratio(&g, &t)));
    s.record("kernel.quadrant_cancellation", kernel_quadrants(tol));
    s.record("kernel.trace3_symmetry", kernel_trace3(tol, sweep));

    s.record("spin.involution", spin_involution());
    s.record("spin.norm_preservation", spin_norm());
    s.record("spin.four_term_expansion", spin_four_terms());
    s.record("spin.no_correlated_form", spin_no_form());

    s.record("measurement.shell_residual", measurement_shell());
    s.record("measurement.monotone_broadening", measurement_monotone());
    s.record("measurement.two_body_zero_decay", measurement_zero_decay());
    s.record("measurement.pre_post_contrast", fig2.and_then(|(_, t)| measurement_contrast(&t)));

    s.record("cli.determinism", cli_determinism(&p2, tol, sweep));
    s
}

fn numerics_linearity(tol: Tolerance) -> Outcome {
    let f = |x: f64| (3.0 * x).cos();
    let g = |x: f64| (-x * x).exp();
    let (a, b, alpha, beta) = (-2.0, 1.5, 2.5, -1.25);
    let lhs = integrate_1d(|x| alpha * f(x) + beta * g(x), a, b, tol).map_err(err)?.value;
    let rf = integrate_1d(f, a, b, tol).map_err(err)?.value;
    let rg = integrate_1d(g, a, b, tol).map_err(err)?.value;
    Ok(bound((lhs - alpha * rf - beta * rg).abs(), 2.0 * tol.abs_tol, "deviation"))
}

fn numerics_reflection(tol: Tolerance) -> Outcome {
    let even = |x: f64| (-x * x).exp() * (2.0 * x).cos();
    let odd = |x: f64| x * x * x * (-x * x).exp();
    let full = integrate_1d(even, -3.0, 3.0, tol).map_err(err)?.value;
    let half = integrate_1d(even, 0.0, 3.0, tol).map_err(err)?.value;
    let odd_value = integrate_1d(odd, -3.0, 3.0, tol).map_err(err)?.value.abs();
    let even_dev = (full - 2.0 * half).abs();
    let ok = even_dev <= 2.0 * tol.abs_tol && odd_value <= tol.abs_tol;
    Ok((ok, format!("even {even_dev:.3e} (limit {:.0e}), odd {odd_value:.3e} (limit {:.0e})", 2.0 * tol.abs_tol, tol.abs_tol)))
}

fn numerics_separable(tol: Tolerance) -> Outcome {
    let r = integrate_2d_product(|x, y| x.cos() * (2.0 * y).exp(), -1.0, 1.0, 0.0, 0.5, tol).map_err(err)?;
    let exact = 2.0 * 1f64.sin() * (1f64.exp() - 1.0) / 2.0;
    let limit = tol.target(exact) + 2.0 * tol.abs_tol;
    Ok(bound((r.value - exact).abs(), limit, "deviation"))
}

fn gaussian_uncertainty() -> Outcome {
    let mut worst = 0.0f64;
    for sk in [0.1, 0.25, 0.5, 1.0, 2.0, 3.7, 10.0] {
        let p = GaussianPairParams::new(sk, 0.0).map_err(err)?;
        worst = worst.max((p.sigma_x() * p.sigma_k() - 2.0).abs());
        let q = GaussianPairParams::from_sigma_x(sk, 0.0).map_err(err)?;
        worst = worst.max((q.sigma_x() * q.sigma_k() - 2.0).abs());
    }
    Ok(bound(worst, 1e-14, "|sigma_x sigma_k - 2|"))
}

fn gaussian_relative_only() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let p = GaussianPairParams::new(0.8, 1.3).map_err(err)?;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (x1, x2, shift) = (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-50.0..50.0));
        let a = lk_position_amplitude(x1, x2, &p);
        let b = lk_position_amplitude(x1 + shift, x2 + shift, &p);
        worst = worst.max((a - b).abs() / a.abs().max(1e-300));
    }
    Ok(bound(worst, 1e-9, "relative change under shift"))
}

fn gaussian_translation() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 1);
    let p = NBodyGaussianParams::new(4, 1.2, vec![0.5, -1.0, 2.0]).map_err(err)?;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let xs: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let shift = rng.gen_range(-40.0..40.0);
        let moved: Vec<f64> = xs.iter().map(|x| x + shift).collect();
        let a = lkn_position_amplitude(&xs, &p).map_err(err)?;
        let b = lkn_position_amplitude(&moved, &p).map_err(err)?;
        worst = worst.max((a - b).abs() / a.abs().max(1e-300));
    }
    Ok(bound(worst, 1e-9, "relative change under shift"))
}

/// Fits `ln d = a x² + b x + c` to a slice through the three-body density
/// and compares the implied centre and standard deviation.
fn gaussian_conditional() -> Outcome {
    let p = NBodyGaussianParams::new(3, 1.0, vec![1.5, -0.5]).map_err(err)?;
    let (x2, x3) = (0.2, 0.7);
    let centre = x3 - 1.5;
    let xs: Vec<f64> = (-30..=30).map(|i| centre + i as f64 * 0.1).collect();
    let mut logs = Vec::with_capacity(xs.len());
    for &x in &xs {
        let amp = lkn_position_amplitude(&[x, x2, x3], &p).map_err(err)?;
        logs.push((amp * amp).ln());
    }
    let (a, b, _) = fit_parabola(&xs, &logs).ok_or("singular fit")?;
    let std = (-1.0 / (2.0 * a)).sqrt();
    let mean = -b / (2.0 * a);
    let expected = p.sigma_x() / 2.0;
    let dev = (std - expected).abs().max((mean - centre).abs());
    Ok((
        dev <= 1e-8,
        format!("centre {mean:.9} (want {centre}), density std {std:.9} (want {expected})"),
    ))
}

fn fit_parabola(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let mut s = [0.0f64; 5];
    let mut t = [0.0f64; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let mut xp = 1.0;
        for (k, sk) in s.iter_mut().enumerate() {
            *sk += xp;
            if k < 3 {
                t[k] += xp * y;
            }
            xp *= x;
        }
    }
    // Normal equations for (c, b, a).
    let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d == 0.0 {
        return None;
    }
    let solve = |col: usize| {
        let mut mm = m;
        for r in 0..3 {
            mm[r][col] = t[r];
        }
        det(mm) / d
    };
    Some((solve(2), solve(1), solve(0)))
}

fn gaussian_duality(tol: Tolerance) -> Outcome {
    let xs: Vec<f64> = (-5..=5).map(|i| i as f64 * 0.7).collect();
    let mut worst = 0.0f64;
    for sk in [0.5, 1.0, 2.0] {
        for x12 in [0.0, 3.0] {
            let p = GaussianPairParams::new(sk, x12).map_err(err)?;
            worst = worst.max(fourier_duality_check(&p, &xs, tol).map_err(err)?);
        }
    }
    Ok(bound(worst, 1e-6, "max deviation"))
}

fn gaussian_lkl_cm(tol: Tolerance) -> Outcome {
    let analytic = lkl_cm_momentum_covariance();
    let numeric = lkl_cm_momentum_moments(12.0, tol).map_err(err)?;
    let cov_dev = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| (numeric.cov[i][j] - analytic.cov[i][j]).abs())
        .fold(0.0, f64::max);
    let corr_dev = (numeric.corr + FRAC_1_SQRT_2).abs();
    let ok = cov_dev <= 1e-6 && corr_dev <= 1e-6 && (numeric.corr + 1.0).abs() > 0.1 && lk_momentum_correlation() == -1.0;
    Ok((ok, format!("corr {:.9} vs pair corr {}, cov deviation {cov_dev:.1e}", numeric.corr, lk_momentum_correlation())))
}

fn kernel_evenness(grid: &Grid2D, p: &KernelParams, tol: Tolerance) -> Outcome {
    let (nx, ny) = (grid.x_axis().count(), grid.y_axis().count());
    let mut mirrored_exact = true;
    for i in 0..nx {
        for j in 0..ny {
            let v = grid.get(i, j);
            mirrored_exact &= v.to_bits() == grid.get(nx - 1 - i, j).to_bits()
                && v.to_bits() == grid.get(i, ny - 1 - j).to_bits();
        }
    }
    let mut rng = StdRng::seed_from_u64(SEED + 2);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (x, y) = (rng.gen_range(-25.0..25.0), rng.gen_range(-25.0..25.0));
        let v = psi(x, y, p, tol).map_err(err)?;
        worst = worst
            .max((v - psi(-x, y, p, tol).map_err(err)?).abs())
            .max((v - psi(x, -y, p, tol).map_err(err)?).abs());
    }
    Ok((
        mirrored_exact && worst <= 1e-10,
        format!("grid mirror bit-exact: {mirrored_exact}, re-evaluated deviation {worst:.3e} (limit 1e-10)"),
    ))
}

fn kernel_closed_form(p: &KernelParams, tol: Tolerance) -> Outcome {
    let mut worst = 0.0f64;
    for i in -25..=25 {
        if i == 0 {
            continue;
        }
        let x = i as f64;
        worst = worst.max((psi(x, 0.0, p, tol).map_err(err)? - 2.0 * x.sin() / x).abs());
    }
    let origin = (psi(0.0, 0.0, p, tol).map_err(err)? - 2.0).abs();
    Ok((
        worst <= 1e-8 && origin <= 1e-10,
        format!("max slice deviation {worst:.3e} (limit 1e-8), origin {origin:.3e} (limit 1e-10)"),
    ))
}

fn midpoint_psi(x: f64, y: f64, energy: f64, k0: f64, panels: usize) -> f64 {
    let h = 2.0 * k0 / panels as f64;
    (0..panels)
        .map(|i| psi_integrand(x, y, -k0 + (i as f64 + 0.5) * h, energy))
        .sum::<f64>()
        * h
}

fn midpoint_psi3(xx1: f64, xx2: f64, y: f64, energy: f64, k0: f64, panels: usize) -> f64 {
    let h = 2.0 * k0 / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let k1 = -k0 + (i as f64 + 0.5) * h;
        let mut row = 0.0;
        for j in 0..panels {
            row += psi3_integrand(xx1, xx2, y, k1, -k0 + (j as f64 + 0.5) * h, energy);
        }
        total += row;
    }
    total * h * h
}

/// The three-body midpoint sums are combined as `(4 M(2n) - M(n)) / 3`,
/// cancelling the leading `h²` error of the rule.
fn kernel_oracle(tol: Tolerance) -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 3);
    let p2 = KernelParams::two_body(1.0, 1.0, 0.0).map_err(err)?;
    let p3 = KernelParams::three_body(1.0, 3.0, 0.0, 0.0).map_err(err)?;
    let mut worst2 = 0.0f64;
    for _ in 0..20 {
        let (x, y) = (rng.gen_range(-25.0..25.0), rng.gen_range(-25.0..25.0));
        let oracle = midpoint_psi(x, y, 1.0, 1.0, 100_000);
        worst2 = worst2.max((psi(x, y, &p2, tol).map_err(err)? - oracle).abs());
    }
    let mut worst3 = 0.0f64;
    for _ in 0..20 {
        let (a, b, y) = (rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
        let fine = midpoint_psi3(a, b, y, 3.0, 1.0, 2000);
        let coarse = midpoint_psi3(a, b, y, 3.0, 1.0, 1000);
        let oracle = (4.0 * fine - coarse) / 3.0;
        worst3 = worst3.max((psi3(a, b, y, &p3, tol).map_err(err)? - oracle).abs());
    }
    Ok((
        worst2 <= 1e-6 && worst3 <= 1e-6,
        format!("psi {worst2:.3e}, psi3 {worst3:.3e} (limit 1e-6)"),
    ))
}

fn kernel_localisation(t: &TraceOut) -> Outcome {
    let d0 = t.samples.iter().find(|s| s.0 == 0.0).ok_or("x = 0 not sampled")?.1;
    let violations = t.samples.iter().filter(|s| s.0.abs() >= 5.0 && s.1 > d0).count();
    let tail_max = t.samples.iter().filter(|s| s.0.abs() >= 5.0).map(|s| s.1).fold(0.0, f64::max);
    Ok((violations == 0, format!("d(0) = {d0:.6}, max d over |x| >= 5 = {tail_max:.6}")))
}

fn kernel_tail_ratio(grid: &Grid2D, t: &TraceOut) -> Outcome {
    let y0 = grid.y_axis().values().position(|y| y == 0.0).ok_or("y = 0 not sampled")?;
    let x0 = t.samples.iter().position(|s| s.0 == 0.0).ok_or("x = 0 not sampled")?;
    let (d0, psi00) = (t.samples[x0].1, grid.get(x0, y0));
    let mut total = 0usize;
    let mut good = 0usize;
    for (i, &(x, d)) in t.samples.iter().enumerate() {
        if (5.0..=25.0).contains(&x.abs()) {
            total += 1;
            let iso = (grid.get(i, y0) / psi00).powi(2);
            good += usize::from(d / d0 >= iso);
        }
    }
    let fraction = good as f64 / total.max(1) as f64;
    Ok((total > 0 && fraction >= 0.8, format!("{good}/{total} tail points broader than the isolated slice (need 80%)")))
}

fn kernel_quadrants(tol: Tolerance) -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 4);
    let p = KernelParams::three_body(1.0, 3.0, 0.0, 0.0).map_err(err)?;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (a, b, y) = (rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
        worst = worst.max(quadrant_cancellation_check(a, b, y, &p, tol).map_err(err)?);
    }
    Ok(bound(worst, 1e-8, "max sine integral"))
}

fn kernel_trace3<S: Sweep>(tol: Tolerance, sweep: &S) -> Outcome {
    let p = KernelParams::three_body(1.0, 3.0, 0.0, 0.0).map_err(err)?;
    let a = Axis::new(0.0, 8.0, 2.0).map_err(err)?;
    let b = Axis::symmetric(8.0, 2.0).map_err(err)?;
    let y = Axis::symmetric(20.0, 0.5).map_err(err)?;
    let t = trace_out_y3(&p, a, b, y, tol, sweep).map_err(err)?;
    let lookup = |u: f64, v: f64| t.samples.iter().find(|s| s.0 == u && s.1 == v).map(|s| s.2);
    let mut worst = 0.0f64;
    for &(u, v, d) in &t.samples {
        if let Some(e) = lookup(v, u) {
            worst = worst.max((d - e).abs());
        }
    }
    let d00 = lookup(0.0, 0.0).ok_or("origin not sampled")?;
    let peak_at_origin = t.samples.iter().all(|s| s.2 <= d00);
    Ok((
        worst <= 1e-9 && peak_at_origin,
        format!("swap deviation {worst:.3e} (limit 1e-9), maximum at origin: {peak_at_origin}"),
    ))
}

fn random_state(rng: &mut StdRng) -> SpinState {
    let n = rng.gen_range(1..=4);
    let axes: Vec<SpinAxis> = (0..n).map(|_| if rng.gen() { SpinAxis::Z } else { SpinAxis::X }).collect();
    let mut terms: Vec<(Vec<Spin>, QSqrt2)> = Vec::new();
    for key in all_outcomes(n) {
        if rng.gen_bool(0.7) {
            let a = Rational::new(rng.gen_range(-6..=6), rng.gen_range(1..=4));
            let b = Rational::new(rng.gen_range(-6..=6), rng.gen_range(1..=4));
            terms.push((key, QSqrt2::new(a, b)));
        }
    }
    SpinState::from_terms(axes, terms).expect("keys match site count")
}

fn spin_involution() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 5);
    let mut failures = 0;
    for _ in 0..100 {
        let s = random_state(&mut rng);
        let site = rng.gen_range(0..s.n_sites());
        let to = s.axes()[site].other();
        let back = s
            .change_basis(site, to)
            .and_then(|t| t.change_basis(site, to.other()))
            .map_err(err)?;
        failures += usize::from(back != s);
    }
    Ok((failures == 0, format!("{failures}/100 states changed by a double basis change")))
}

fn spin_norm() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 6);
    let mut failures = 0;
    for _ in 0..100 {
        let s = random_state(&mut rng);
        let site = rng.gen_range(0..s.n_sites());
        let t = s.change_basis(site, s.axes()[site].other()).map_err(err)?;
        failures += usize::from(t.norm_squared() != s.norm_squared());
    }
    Ok((failures == 0, format!("{failures}/100 states changed norm")))
}

fn spin_four_terms() -> Outcome {
    use Spin::*;
    let x = xze_state().in_basis(SpinAxis::X);
    let h = QSqrt2::frac_1_sqrt_2();
    let expected = SpinState::from_terms(
        vec![SpinAxis::X; 3],
        [
            (vec![Plus, Plus, Plus], h),
            (vec![Minus, Minus, Plus], -h),
            (vec![Plus, Minus, Minus], h),
            (vec![Minus, Plus, Minus], -h),
        ],
    )
    .map_err(err)?;
    let marginal = x.outcome_probabilities(&[0, 1]).map_err(err)?;
    let quarter = Rational::new(1, 4);
    let uncorrelated = marginal.len() == 4 && marginal.values().all(|&p| p == quarter);
    let m = xze_state()
        .project(2, SpinAxis::Z, Minus)
        .map_err(err)?
        .in_basis(SpinAxis::X)
        .outcome_probabilities(&[0, 1])
        .map_err(err)?;
    let m_uniform = m.len() == 4 && m.values().all(|&p| p == quarter);
    Ok((
        x == expected && uncorrelated && m_uniform,
        format!("x-basis expansion {x}; sites 1,2 uniform: {uncorrelated}; measured state uniform: {m_uniform}"),
    ))
}

fn spin_no_form() -> Outcome {
    let target = xze_state().in_basis(SpinAxis::X);
    let mut grid = Vec::new();
    for n in -2..=2 {
        grid.push(QSqrt2::from_rational(Rational::new(n, 2)));
        grid.push(QSqrt2::frac_1_sqrt_2() * Rational::from_integer(n));
    }
    let found = search_correlated_form(&target, &grid);
    Ok((found.is_none(), format!("{} coefficient grid points searched, match: {}", grid.len(), found.is_some())))
}

fn measurement_shell() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..=30 {
        let shell = EnergyShell::new(3.0, i as f64 * 0.1, 1.0).map_err(err)?;
        for (k1, k2) in shell_points(&shell, 720).map_err(err)? {
            worst = worst.max(shell.residual(k1, k2).abs());
        }
    }
    Ok(bound(worst, 1e-12, "max residual"))
}

fn measurement_monotone() -> Outcome {
    let p = KernelParams::three_body(1.0, 3.0, 0.0, 0.0).map_err(err)?;
    let slice = SliceSpec::new(Axis::symmetric(40.0, 0.25).map_err(err)?);
    let ems: Vec<f64> = [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|f| f * 3.0).collect();
    let curve = broadening_curve(&ems, &p, &slice).map_err(err)?;
    let nondecreasing = curve.windows(2).all(|w| w[1].1 >= w[0].1);
    let ends = curve[curve.len() - 1].1 > curve[0].1;
    let listing: Vec<String> = curve.iter().map(|(e, w)| format!("W({e:.1})={w}")).collect();
    Ok((nondecreasing && ends, listing.join(" ")))
}

fn measurement_zero_decay() -> Outcome {
    let mut worst = 0.0f64;
    for em in [0.1, 0.5, 0.9] {
        let km = two_body_momentum_after(1.0, em);
        let period = PI / km;
        let step = period / 64.0;
        let values: Vec<f64> = (0..64 * 12).map(|j| post_measurement_density_2body(-6.0 * period + j as f64 * step, km, 0.0)).collect();
        let global = values.iter().copied().fold(0.0, f64::max);
        for window in values.windows(64) {
            worst = worst.max(global - window.iter().copied().fold(0.0, f64::max));
        }
    }
    Ok(bound(worst, 1e-12, "largest window-max shortfall"))
}

fn measurement_contrast(t: &TraceOut) -> Outcome {
    let half_length = 40.0;
    let pre = width_metric(&PositionDensity1D::new(t.samples.clone()).map_err(err)?).map_err(err)?;
    let axis = Axis::symmetric(half_length, 0.25).map_err(err)?;
    let km = two_body_momentum_after(1.0, 0.5);
    let post = width_metric(&PositionDensity1D::from_axis(&axis, |x| post_measurement_density_2body(x, km, 0.0)).map_err(err)?)
        .map_err(err)?;
    let ok = pre.is_finite() && pre < half_length && post >= 0.9 * half_length;
    Ok((ok, format!("W before {pre}, W after {post}, slice half-length {half_length}")))
}

fn cli_determinism<S: Sweep>(p: &KernelParams, tol: Tolerance, sweep: &S) -> Outcome {
    let a = Axis::symmetric(6.0, 1.0).map_err(err)?;
    let text = |g: Grid2D| render(&["x", "y", "psi"], &g.iter().map(|(x, y, v)| vec![x, y, v]).collect::<Vec<_>>());
    let first = text(psi_grid(p, a, a, tol, sweep).map_err(err)?);
    let again = text(psi_grid(p, a, a, tol, sweep).map_err(err)?);
    let serial = text(psi_grid(p, a, a, tol, &Serial).map_err(err)?);
    let same = first == again && first == serial;
    Ok((same, format!("repeat and serial renderings identical: {same}")))
}
