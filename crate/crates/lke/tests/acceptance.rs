//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! The full-resolution three-body grid is skipped unless the suite is run
//! with `--include-ignored` (or `--ignored`):
//!
//! ```text
//! cargo test --release -p lke --test acceptance -- --include-ignored
//! ```

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lke::parallel::Pool;
use lke_core::gaussian_states::{fourier_duality_check, lkl_cm_momentum_moments, GaussianPairParams};
use lke_core::lke_kernel::{psi, psi3, psi_grid, quadrant_cancellation_check, ridge_locate, trace_out_y, trace_out_y3};
use lke_core::measurement::{broadening_curve, post_measurement_density_2body, two_body_momentum_after, SliceSpec};
use lke_core::qsqrt2::Rational;
use lke_core::spin_algebra::{all_outcomes, xz_state, xze_state, Spin, SpinAxis, SpinState};
use lke_core::{Axis, KernelParams, QSqrt2, Tolerance};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Verdict = Result<String, String>;

struct Criterion {
    id: &'static str,
    title: &'static str,
    budget: Duration,
    run: fn(&Pool) -> Verdict,
}

const TOL: Tolerance = Tolerance::DEFAULT;

fn two_body() -> KernelParams {
    KernelParams::two_body(1.0, 1.0, 0.0).unwrap()
}

fn three_body() -> KernelParams {
    KernelParams::three_body(1.0, 3.0, 0.0, 0.0).unwrap()
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e(x: impl std::fmt::Display) -> String {
    x.to_string()
}

// Independent midpoint-rule oracles, written against the integrands
// directly rather than the library's helpers.

fn oracle_psi(x: f64, y: f64, energy: f64, k0: f64, panels: usize) -> f64 {
    let h = 2.0 * k0 / panels as f64;
    let mut sum = 0.0;
    for i in 0..panels {
        let k = -k0 + (i as f64 + 0.5) * h;
        sum += (x * k).cos() * (y * (energy - k * k).sqrt()).cos();
    }
    sum * h
}

fn oracle_psi3_midpoint(xx1: f64, xx2: f64, y: f64, energy: f64, k0: f64, panels: usize) -> f64 {
    let h = 2.0 * k0 / panels as f64;
    let mut sum = 0.0;
    for i in 0..panels {
        let k1 = -k0 + (i as f64 + 0.5) * h;
        for j in 0..panels {
            let k2 = -k0 + (j as f64 + 0.5) * h;
            let kinetic = 0.5 * (k1 * k1 + k2 * k2 + (k1 + k2) * (k1 + k2));
            let residual = (energy - kinetic).max(0.0);
            sum += (k1 * xx1 + k2 * xx2).cos() * (y * residual.sqrt()).cos();
        }
    }
    sum * h * h
}

/// Midpoint sums at `n` and `n/2` panels per axis with the `h²` term
/// eliminated.
fn oracle_psi3(xx1: f64, xx2: f64, y: f64, panels: usize) -> f64 {
    let fine = oracle_psi3_midpoint(xx1, xx2, y, 3.0, 1.0, panels);
    let coarse = oracle_psi3_midpoint(xx1, xx2, y, 3.0, 1.0, panels / 2);
    (4.0 * fine - coarse) / 3.0
}

fn closed_form_slice(_: &Pool) -> Verdict {
    let p = two_body();
    let mut worst = 0.0f64;
    for i in (-25..=25).filter(|&i| i != 0) {
        let x = i as f64;
        worst = worst.max((psi(x, 0.0, &p, TOL).map_err(e)? - 2.0 * x.sin() / x).abs());
    }
    let origin = (psi(0.0, 0.0, &p, TOL).map_err(e)? - 2.0).abs();
    check(
        worst <= 1e-8 && origin <= 1e-10,
        format!("max |psi(x,0) - 2 sin x / x| = {worst:.2e}, |psi(0,0) - 2| = {origin:.2e}"),
    )
}

fn fourier_duality(_: &Pool) -> Verdict {
    let xs: Vec<f64> = (0..11).map(|i| -5.0 + i as f64).collect();
    let mut worst = 0.0f64;
    for sk in [0.5, 1.0, 2.0] {
        for x12 in [0.0, 3.0] {
            let p = GaussianPairParams::new(sk, x12).map_err(e)?;
            worst = worst.max(fourier_duality_check(&p, &xs, TOL).map_err(e)?);
        }
    }
    check(worst <= 1e-6, format!("max deviation {worst:.2e} over 6 parameter sets x 11 points"))
}

fn lkl_cm_counterexample(_: &Pool) -> Verdict {
    // Inverse of the precision matrix [[1, 1], [1, 2]] (determinant 1).
    let (a, b, c, d) = (1.0, 1.0, 1.0, 2.0);
    let det: f64 = a * d - b * c;
    let expected = [[d / det, -b / det], [-c / det, a / det]];
    let expected_corr = expected[0][1] / (expected[0][0] * expected[1][1]).sqrt();

    let m = lkl_cm_momentum_moments(12.0, TOL).map_err(e)?;
    let mut cov_dev = 0.0f64;
    for (row, want) in m.cov.iter().zip(&expected) {
        for (got, want) in row.iter().zip(want) {
            cov_dev = cov_dev.max((got - want).abs());
        }
    }
    let corr_dev = (m.corr - expected_corr).abs().max((m.corr + FRAC_1_SQRT_2).abs());
    check(
        cov_dev <= 1e-6 && corr_dev <= 1e-6,
        format!("corr {:.9}, covariance deviation {cov_dev:.2e}", m.corr),
    )
}

fn random_state(rng: &mut StdRng) -> SpinState {
    let n = rng.gen_range(1..=4);
    let axes: Vec<SpinAxis> = (0..n).map(|_| if rng.gen() { SpinAxis::Z } else { SpinAxis::X }).collect();
    let mut terms = Vec::new();
    for key in all_outcomes(n) {
        if rng.gen_bool(0.75) {
            let a = Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=6));
            let b = Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=6));
            terms.push((key, QSqrt2::new(a, b)));
        }
    }
    SpinState::from_terms(axes, terms).unwrap()
}

fn spin_exactness(_: &Pool) -> Verdict {
    use Spin::*;
    let rr = SpinState::product(SpinAxis::X, &[Plus, Plus]);
    let ll = SpinState::product(SpinAxis::X, &[Minus, Minus]);
    let xz_ok = xz_state().in_basis(SpinAxis::X) == rr.sub(&ll).map_err(e)?;

    let h = QSqrt2::new(Rational::new(0, 1), Rational::new(1, 2));
    let expected = SpinState::from_terms(
        vec![SpinAxis::X; 3],
        [
            (vec![Plus, Plus, Plus], h),
            (vec![Minus, Minus, Plus], -h),
            (vec![Plus, Minus, Minus], h),
            (vec![Minus, Plus, Minus], -h),
        ],
    )
    .map_err(e)?;
    let xze_x = xze_state().in_basis(SpinAxis::X);
    let xze_ok = xze_x.len() == 4 && xze_x == expected;

    let m = xze_state().project(2, SpinAxis::Z, Minus).map_err(e)?;
    let marginal = m.in_basis(SpinAxis::X).outcome_probabilities(&[0, 1]).map_err(e)?;
    let marginal_ok = marginal.len() == 4 && marginal.values().all(|&p| p == Rational::new(1, 4));

    let mut rng = StdRng::seed_from_u64(4);
    let mut broken = 0;
    for _ in 0..100 {
        let s = random_state(&mut rng);
        let site = rng.gen_range(0..s.n_sites());
        let there = s.axes()[site].other();
        let back = s.change_basis(site, there).and_then(|t| t.change_basis(site, there.other())).map_err(e)?;
        broken += usize::from(back != s);
    }
    check(
        xz_ok && xze_ok && marginal_ok && broken == 0,
        format!("XZ {xz_ok}, XZE four terms {xze_ok}, measured marginal uniform {marginal_ok}, involution failures {broken}/100"),
    )
}

fn quadrant_cancellation(_: &Pool) -> Verdict {
    let p = three_body();
    let mut rng = StdRng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let (a, b, y) = (rng.gen_range(-25.0..25.0), rng.gen_range(-25.0..25.0), rng.gen_range(-40.0..40.0));
        worst = worst.max(quadrant_cancellation_check(a, b, y, &p, TOL).map_err(e)?);
    }
    check(worst <= 1e-8, format!("max |sine integral| {worst:.2e}"))
}

fn oracle_equivalence(_: &Pool) -> Verdict {
    let mut rng = StdRng::seed_from_u64(6);
    let p2 = two_body();
    let mut worst2 = 0.0f64;
    for _ in 0..20 {
        let (x, y) = (rng.gen_range(-25.0..25.0), rng.gen_range(-25.0..25.0));
        worst2 = worst2.max((psi(x, y, &p2, TOL).map_err(e)? - oracle_psi(x, y, 1.0, 1.0, 100_000)).abs());
    }
    let p3 = three_body();
    let mut worst3 = 0.0f64;
    for _ in 0..10 {
        let (a, b, y) = (rng.gen_range(0.0..40.0), rng.gen_range(-20.0..20.0), rng.gen_range(-40.0..40.0));
        worst3 = worst3.max((psi3(a, b, y, &p3, TOL).map_err(e)? - oracle_psi3(a, b, y, 2000)).abs());
    }
    check(
        worst2 <= 1e-6 && worst3 <= 1e-5,
        format!("psi max deviation {worst2:.2e} (20 points), psi3 max deviation {worst3:.2e} (10 points)"),
    )
}

fn fig1_properties(pool: &Pool) -> Verdict {
    let p = two_body();
    let axis = Axis::symmetric(25.0, 1.0).map_err(e)?;
    let grid = psi_grid(&p, axis, axis, TOL, pool).map_err(e)?;
    let n = axis.count();
    let mut bit_exact = true;
    let mut reevaluated = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v = grid.get(i, j);
            bit_exact &= v.to_bits() == grid.get(n - 1 - i, j).to_bits() && v.to_bits() == grid.get(i, n - 1 - j).to_bits();
            let (x, y) = (axis.value(i), axis.value(j));
            if x < 0.0 || y < 0.0 {
                reevaluated = reevaluated.max((psi(x, y, &p, TOL).map_err(e)? - v).abs());
            }
        }
    }

    let y_axis = Axis::symmetric(25.0, 0.25).map_err(e)?;
    let mut ridge = Vec::new();
    let mut ridge_ok = true;
    for x in [5.0, 10.0, 15.0, 20.0, 25.0] {
        let y_star = ridge_locate(x, &p, y_axis, TOL).map_err(e)?;
        ridge_ok &= (y_star - x).abs() <= 2.0;
        ridge.push(format!("{x}->{y_star}"));
    }
    check(
        bit_exact && reevaluated <= 1e-10 && ridge_ok,
        format!(
            "mirror bit-exact {bit_exact}, direct re-evaluation {reevaluated:.2e}, ridge |y* - x| <= 2: {ridge_ok} ({})",
            ridge.join(", ")
        ),
    )
}

fn fig2_properties(pool: &Pool) -> Verdict {
    let p = two_body();
    let axis = Axis::symmetric(40.0, 0.25).map_err(e)?;
    let t = trace_out_y(&p, axis, axis, TOL, pool).map_err(e)?;
    let n = t.samples.len();
    let symmetry = (0..n).map(|i| (t.samples[i].1 - t.samples[n - 1 - i].1).abs()).fold(0.0, f64::max);
    let centre = n / 2;
    let d0 = t.samples[centre].1;
    let dominated = t.samples.iter().filter(|s| s.0.abs() >= 5.0).all(|s| s.1 <= d0);

    let psi00 = psi(0.0, 0.0, &p, TOL).map_err(e)?;
    let (mut good, mut total) = (0, 0);
    for &(x, d) in t.samples.iter().filter(|s| (5.0..=25.0).contains(&s.0.abs())) {
        let isolated = (psi(x, 0.0, &p, TOL).map_err(e)? / psi00).powi(2);
        total += 1;
        good += usize::from(d / d0 >= isolated);
    }
    let fraction = good as f64 / total as f64;
    check(
        symmetry <= 1e-9 && dominated && fraction >= 0.8,
        format!("symmetry {symmetry:.2e}, d(0) dominates |x|>=5 {dominated}, tail ratio {good}/{total}"),
    )
}

fn fig3_with(pool: &Pool, step: f64, y_step: f64) -> Verdict {
    let p = three_body();
    let xx1 = Axis::new(0.0, 40.0, step).map_err(e)?;
    let xx2 = Axis::new(-20.0, 20.0, step).map_err(e)?;
    let y = Axis::symmetric(40.0, y_step).map_err(e)?;
    let t = trace_out_y3(&p, xx1, xx2, y, TOL, pool).map_err(e)?;
    let at = |a: f64, b: f64| t.samples.iter().find(|s| s.0 == a && s.1 == b).map(|s| s.2);

    let mut swap = 0.0f64;
    let mut overlap = 0;
    for &(a, b, d) in &t.samples {
        if let Some(other) = at(b, a) {
            swap = swap.max((d - other).abs());
            overlap += 1;
        }
    }

    // A few swapped points traced directly, with no mirroring involved.
    let mut direct = 0.0f64;
    for (a, b) in [(2.0 * step, 4.0 * step), (0.0, 6.0 * step), (10.0 * step, 2.0 * step)] {
        let squares: Vec<f64> = y
            .values()
            .map(|yy| psi3(a, b, yy, &p, TOL).map(|v| v * v))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        let d = lke_core::numerics::integrate_grid(&squares, y.spacing()).map_err(e)?;
        let mirrored = at(b, a).ok_or("swapped point missing")?;
        direct = direct.max((d - mirrored).abs());
    }

    let d00 = at(0.0, 0.0).ok_or("origin missing")?;
    let max_at_origin = t.samples.iter().all(|s| s.2 <= d00);
    check(
        swap <= 1e-9 && direct <= 1e-9 && max_at_origin,
        format!(
            "swap symmetry {swap:.2e} on {overlap} points, direct re-trace {direct:.2e}, global max at origin {max_at_origin} ({} evaluated of {})",
            t.evaluated_points,
            t.samples.len()
        ),
    )
}

fn fig3_reduced(pool: &Pool) -> Verdict {
    fig3_with(pool, 2.0, 0.5)
}

fn fig3_full(pool: &Pool) -> Verdict {
    fig3_with(pool, 1.0, 0.25)
}

fn oracle_slice_density(measured: f64, count: usize, axis: &Axis) -> Vec<(f64, f64)> {
    let r = 3.0 - measured;
    let (su, sv) = ((2.0 * r / 3.0).sqrt(), (2.0 * r).sqrt());
    let mut points = Vec::new();
    for i in 0..count {
        let t = 2.0 * PI * i as f64 / count as f64;
        let (u, v) = (su * t.cos(), sv * t.sin());
        let (k1, k2) = ((u + v) * FRAC_1_SQRT_2, (u - v) * FRAC_1_SQRT_2);
        if k1.abs() <= 1.0 && k2.abs() <= 1.0 {
            points.push(k1);
        }
    }
    axis.values()
        .map(|x| {
            let (c, s) = points.iter().fold((0.0, 0.0), |(c, s), k| (c + (k * x).cos(), s + (k * x).sin()));
            (x, c * c + s * s)
        })
        .collect()
}

fn half_mass_width(samples: &[(f64, f64)], h: f64) -> f64 {
    let total: f64 = samples.iter().map(|s| s.1).sum();
    let peak = samples.iter().enumerate().fold(0, |b, (i, s)| if s.1 > samples[b].1 { i } else { b });
    let mut m = 0;
    loop {
        let lo = peak.saturating_sub(m);
        let hi = (peak + m).min(samples.len() - 1);
        if samples[lo..=hi].iter().map(|s| s.1).sum::<f64>() >= 0.5 * total {
            return (2 * m + 1) as f64 * h;
        }
        m += 1;
    }
}

fn nonlocality(_: &Pool) -> Verdict {
    let mut periodic = 0.0f64;
    let mut shortfall = 0.0f64;
    for measured in [0.1, 0.5, 0.9] {
        let km = two_body_momentum_after(1.0, measured);
        let period = PI / km;
        let xs: Vec<f64> = (0..2000).map(|i| -40.0 + i as f64 * 0.04).collect();
        for &x in &xs {
            let a = post_measurement_density_2body(x, km, 0.0);
            periodic = periodic.max((a - post_measurement_density_2body(x + period, km, 0.0)).abs());
        }
        let step = period / 64.0;
        let samples: Vec<f64> = (0..64 * 20).map(|j| post_measurement_density_2body(-10.0 * period + j as f64 * step, km, 0.0)).collect();
        let peak = samples.iter().copied().fold(0.0, f64::max);
        for window in samples.windows(64) {
            shortfall = shortfall.max(peak - window.iter().copied().fold(0.0, f64::max));
        }
    }

    let p = three_body();
    let axis = Axis::symmetric(40.0, 0.25).map_err(e)?;
    let slice = SliceSpec::new(axis);
    let curve = broadening_curve(&[0.3, 1.5, 2.7], &p, &slice).map_err(e)?;
    let w: Vec<f64> = curve.iter().map(|c| c.1).collect();
    let increasing = w[0] < w[1] && w[1] < w[2];
    let ratio = w[2] / w[0];

    let oracle: Vec<String> = [0.3, 1.5, 2.7]
        .iter()
        .map(|&m| format!("{}", half_mass_width(&oracle_slice_density(m, 7200, &axis), 0.25)))
        .collect();
    check(
        periodic <= 1e-12 && shortfall <= 1e-12 && increasing && ratio >= 2.0,
        format!(
            "two-body period deviation {periodic:.1e}, window shortfall {shortfall:.1e}; W(0.3,1.5,2.7) = {:?}, strictly increasing {increasing}, W(2.7)/W(0.3) = {ratio:.3}; 7200-point oracle W = [{}]",
            w,
            oracle.join(", ")
        ),
    )
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let full = args.iter().any(|a| a == "--include-ignored" || a == "--ignored");
    if args.iter().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let pool = Pool::new(lke::parallel::resolve_threads(None).unwrap_or(0)).expect("thread pool");

    let mut criteria = vec![
        Criterion { id: "1", title: "closed-form slice", budget: Duration::from_secs(1), run: closed_form_slice },
        Criterion { id: "2", title: "Fourier duality", budget: Duration::from_secs(1), run: fourier_duality },
        Criterion { id: "3", title: "centre-of-mass state correlation", budget: Duration::MAX, run: lkl_cm_counterexample },
        Criterion { id: "4", title: "spin exactness", budget: Duration::from_secs(1), run: spin_exactness },
        Criterion { id: "5", title: "quadrant cancellation", budget: Duration::MAX, run: quadrant_cancellation },
        Criterion { id: "6", title: "oracle equivalence", budget: Duration::from_secs(120), run: oracle_equivalence },
        Criterion { id: "7", title: "two-body kernel grid", budget: Duration::MAX, run: fig1_properties },
        Criterion { id: "8", title: "two-body density", budget: Duration::from_secs(600), run: fig2_properties },
        Criterion { id: "9", title: "three-body density (reduced grid)", budget: Duration::from_secs(120), run: fig3_reduced },
        Criterion { id: "10", title: "nonlocality", budget: Duration::MAX, run: nonlocality },
    ];
    if full {
        criteria.push(Criterion {
            id: "9",
            title: "three-body density (full grid)",
            budget: Duration::from_secs(1800),
            run: fig3_full,
        });
    }

    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let verdict = (c.run)(&pool);
        let elapsed = start.elapsed();
        let (ok, detail) = match verdict {
            Ok(d) if elapsed <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over time budget {:?}", c.budget)),
            Err(d) => (false, d),
        };
        println!(
            "criterion {:>2} {:<34} {}  [{:.2}s] {detail}",
            c.id,
            c.title,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        if !ok {
            failed.push(format!("{} ({})", c.id, c.title));
        }
    }
    if !full {
        println!("criterion  9 three-body density (full grid)     SKIP  run with --include-ignored");
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
