//! Quadrature engine.
//!
//! * [`integrate_1d`]: globally adaptive bisection driven by a 7-point Gauss /
//!   15-point Kronrod pair on a finite interval.
//! * [`integrate_2d_product`]: nested adaptive 1D rules over a rectangle.
//! * [`integrate_grid`]: composite Simpson over tabulated, equally spaced data.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid interval [{a}, {b}]: lower limit must be below upper limit and both finite")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid tolerance: abs_tol and rel_tol must lie in (0, 1), max_subdivisions >= 1")]
    InvalidTolerance,
    #[error(
        "no convergence after {subdivisions} subdivisions (value {value:e}, error estimate {error_estimate:e})"
    )]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },
    #[error("integrand returned a non-finite value at {at}")]
    NonFinite { at: f64 },
    #[error("at least 3 samples are required, got {len}")]
    TooFewSamples { len: usize },
    #[error("sample spacing must be positive and finite, got {spacing}")]
    InvalidSpacing { spacing: f64 },
}

/// Requested accuracy for the adaptive rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance {
        abs_tol: 1e-10,
        rel_tol: 1e-8,
        max_subdivisions: 2000,
    };

    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self, QuadratureError> {
        let tol = Tolerance {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        let in_unit = |t: f64| t > 0.0 && t < 1.0;
        if in_unit(self.abs_tol) && in_unit(self.rel_tol) && self.max_subdivisions >= 1 {
            Ok(())
        } else {
            Err(QuadratureError::InvalidTolerance)
        }
    }

    /// Error bound accepted for a computed `value`.
    #[inline]
    pub fn target(&self, value: f64) -> f64 {
        f64::max(self.abs_tol, self.rel_tol * value.abs())
    }

    /// Scales both tolerances by `factor`, keeping the subdivision budget.
    pub fn scaled(&self, factor: f64) -> Tolerance {
        Tolerance {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::DEFAULT
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

// Kronrod abscissae (descending, last is the centre), Gauss weights for the
// 7-point rule at the odd-indexed Kronrod nodes, and 15-point Kronrod weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const KRONROD_POINTS: usize = 15;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    // Max-heap on error, ties broken by position.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn eval<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> Result<f64, QuadratureError> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QuadratureError::NonFinite { at: x })
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = libm::pow(200.0 * scaled / res_asc, 1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = f64::max(scaled, 50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gauss_kronrod_15<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
) -> Result<Segment, QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = eval(f, center)?;

    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();
    let mut lo = [0.0; 7];
    let mut hi = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        lo[j] = f1;
        hi[j] = f2;
        let sum = f1 + f2;
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * sum;
        }
        res_kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }
    res_gauss += WG[3] * f_center;

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((lo[j] - mean).abs() + (hi[j] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    let abs_half = half.abs();
    Ok(Segment {
        a,
        b,
        value: res_kronrod * half,
        error: rescale_error(err, res_abs * abs_half, res_asc * abs_half),
    })
}

/// Adaptive integral of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below `tol.target(value)`. At most `tol.max_subdivisions`
/// segments are kept alive.
pub fn integrate_1d<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadratureResult, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    tol.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadratureError::InvalidInterval { a, b });
    }

    let first = gauss_kronrod_15(&mut f, a, b)?;
    let mut evaluations = KRONROD_POINTS;
    let mut heap = BinaryHeap::with_capacity(16);
    let mut value = first.value;
    let mut error = first.error;
    heap.push(first);

    loop {
        if error <= tol.target(value) {
            // Re-sum from the segments.
            let (v, e) = totals(&heap);
            value = v;
            error = e;
            if error <= tol.target(value) {
                break;
            }
        }
        if heap.len() >= tol.max_subdivisions {
            return Err(QuadratureError::NonConvergence {
                value,
                error_estimate: error,
                subdivisions: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // Segment cannot be split further in floating point.
            heap.push(worst);
            let (v, e) = totals(&heap);
            return Err(QuadratureError::NonConvergence {
                value: v,
                error_estimate: e,
                subdivisions: heap.len(),
            });
        }
        let left = gauss_kronrod_15(&mut f, worst.a, mid)?;
        let right = gauss_kronrod_15(&mut f, mid, worst.b)?;
        evaluations += 2 * KRONROD_POINTS;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    Ok(QuadratureResult {
        value,
        error_estimate: error,
        evaluations,
    })
}

fn totals(heap: &BinaryHeap<Segment>) -> (f64, f64) {
    let mut segments: Vec<&Segment> = heap.iter().collect();
    segments.sort_by(|l, r| l.a.total_cmp(&r.a));
    segments
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error))
}

/// Integral of `f(x, y)` over `[ax, bx] x [ay, by]` as an outer adaptive rule
/// in `x` over inner adaptive rules in `y`.
///
/// The tolerance budget is split evenly between the outer rule and the
/// accumulated inner error.
pub fn integrate_2d_product<F>(
    mut f: F,
    ax: f64,
    bx: f64,
    ay: f64,
    by: f64,
    tol: Tolerance,
) -> Result<QuadratureResult, QuadratureError>
where
    F: FnMut(f64, f64) -> f64,
{
    tol.validate()?;
    if !(ax.is_finite() && bx.is_finite() && ax < bx) {
        return Err(QuadratureError::InvalidInterval { a: ax, b: bx });
    }
    if !(ay.is_finite() && by.is_finite() && ay < by) {
        return Err(QuadratureError::InvalidInterval { a: ay, b: by });
    }

    let outer_tol = tol.scaled(0.5);
    let inner_tol = Tolerance {
        abs_tol: tol.abs_tol * 0.5 / (bx - ax),
        rel_tol: tol.rel_tol * 0.5,
        max_subdivisions: tol.max_subdivisions,
    };

    let mut failure: Option<QuadratureError> = None;
    let mut inner_evaluations = 0usize;
    let mut inner_error = 0.0f64;

    let outer = integrate_1d(
        |x| {
            if failure.is_some() {
                return 0.0;
            }
            match integrate_1d(|y| f(x, y), ay, by, inner_tol) {
                Ok(r) => {
                    inner_evaluations += r.evaluations;
                    inner_error = inner_error.max(r.error_estimate);
                    r.value
                }
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        ax,
        bx,
        outer_tol,
    );

    if let Some(e) = failure {
        return Err(e);
    }
    let outer = outer?;
    Ok(QuadratureResult {
        value: outer.value,
        error_estimate: outer.error_estimate + (bx - ax) * inner_error,
        evaluations: inner_evaluations.max(1),
    })
}

/// One bisection interval of a vector-valued integrand: per-component
/// estimates plus the largest component error as the refinement key.
#[derive(Debug, Clone)]
struct VecSegment {
    a: f64,
    b: f64,
    values: Vec<f64>,
    errors: Vec<f64>,
    key: f64,
}

impl PartialEq for VecSegment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for VecSegment {}

impl PartialOrd for VecSegment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VecSegment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod_15_vec<F>(f: &mut F, a: f64, b: f64, buf: &mut [f64]) -> Result<VecSegment, QuadratureError>
where
    F: FnMut(f64, &mut [f64]) -> Result<(), QuadratureError>,
{
    let dim = buf.len() / KRONROD_POINTS;
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // Row 0 is the centre, rows 2j+1 and 2j+2 are center -/+ half XGK[j].
    let mut node = |row: usize, x: f64, buf: &mut [f64]| -> Result<(), QuadratureError> {
        let out = &mut buf[row * dim..(row + 1) * dim];
        f(x, out)?;
        match out.iter().all(|v| v.is_finite()) {
            true => Ok(()),
            false => Err(QuadratureError::NonFinite { at: x }),
        }
    };
    node(0, center, buf)?;
    for (j, &xgk) in XGK.iter().take(7).enumerate() {
        let dx = half * xgk;
        node(2 * j + 1, center - dx, buf)?;
        node(2 * j + 2, center + dx, buf)?;
    }

    let abs_half = half.abs();
    let mut values = Vec::with_capacity(dim);
    let mut errors = Vec::with_capacity(dim);
    for c in 0..dim {
        let at = |row: usize| buf[row * dim + c];
        let f_center = at(0);
        let mut res_gauss = WG[3] * f_center;
        let mut res_kronrod = WGK[7] * f_center;
        let mut res_abs = res_kronrod.abs();
        for (j, &w) in WGK.iter().take(7).enumerate() {
            let (f1, f2) = (at(2 * j + 1), at(2 * j + 2));
            if j % 2 == 1 {
                res_gauss += WG[j / 2] * (f1 + f2);
            }
            res_kronrod += w * (f1 + f2);
            res_abs += w * (f1.abs() + f2.abs());
        }
        let mean = 0.5 * res_kronrod;
        let mut res_asc = WGK[7] * (f_center - mean).abs();
        for (j, &w) in WGK.iter().take(7).enumerate() {
            res_asc += w * ((at(2 * j + 1) - mean).abs() + (at(2 * j + 2) - mean).abs());
        }
        values.push(res_kronrod * half);
        errors.push(rescale_error((res_kronrod - res_gauss) * half, res_abs * abs_half, res_asc * abs_half));
    }
    let key = errors.iter().fold(0.0f64, |m, &e| m.max(e));
    Ok(VecSegment { a, b, values, errors, key })
}

fn vec_totals(heap: &BinaryHeap<VecSegment>, dim: usize) -> (Vec<f64>, Vec<f64>) {
    let mut segments: Vec<&VecSegment> = heap.iter().collect();
    segments.sort_by(|l, r| l.a.total_cmp(&r.a));
    let mut values = alloc::vec![0.0; dim];
    let mut errors = alloc::vec![0.0; dim];
    for s in segments {
        for c in 0..dim {
            values[c] += s.values[c];
            errors[c] += s.errors[c];
        }
    }
    (values, errors)
}

/// Adaptive integral of a vector-valued `f` over `[a, b]` on one shared mesh.
///
/// `f(x, out)` writes all `dim` components at `x`. Bisection continues until
/// every component meets `tol` on its own, so each result is as accurate as
/// the scalar [`integrate_1d`] would require.
pub fn integrate_1d_vec<F>(
    mut f: F,
    a: f64,
    b: f64,
    dim: usize,
    tol: Tolerance,
) -> Result<Vec<QuadratureResult>, QuadratureError>
where
    F: FnMut(f64, &mut [f64]) -> Result<(), QuadratureError>,
{
    tol.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadratureError::InvalidInterval { a, b });
    }
    let mut buf = alloc::vec![0.0; KRONROD_POINTS * dim];
    let first = gauss_kronrod_15_vec(&mut f, a, b, &mut buf)?;
    let mut evaluations = KRONROD_POINTS;
    let mut values = first.values.clone();
    let mut errors = first.errors.clone();
    let mut heap = BinaryHeap::with_capacity(16);
    heap.push(first);
    let converged = |v: &[f64], e: &[f64]| v.iter().zip(e).all(|(&v, &e)| e <= tol.target(v));

    loop {
        if converged(&values, &errors) {
            (values, errors) = vec_totals(&heap, dim);
            if converged(&values, &errors) {
                break;
            }
        }
        let worst_error = errors.iter().fold(0.0f64, |m, &e| m.max(e));
        if heap.len() >= tol.max_subdivisions {
            return Err(QuadratureError::NonConvergence {
                value: values.first().copied().unwrap_or(0.0),
                error_estimate: worst_error,
                subdivisions: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            heap.push(worst);
            return Err(QuadratureError::NonConvergence {
                value: values.first().copied().unwrap_or(0.0),
                error_estimate: worst_error,
                subdivisions: heap.len(),
            });
        }
        let left = gauss_kronrod_15_vec(&mut f, worst.a, mid, &mut buf)?;
        let right = gauss_kronrod_15_vec(&mut f, mid, worst.b, &mut buf)?;
        evaluations += 2 * KRONROD_POINTS;
        for c in 0..dim {
            values[c] += left.values[c] + right.values[c] - worst.values[c];
            errors[c] += left.errors[c] + right.errors[c] - worst.errors[c];
        }
        heap.push(left);
        heap.push(right);
    }

    Ok(values
        .into_iter()
        .zip(errors)
        .map(|(value, error_estimate)| QuadratureResult {
            value,
            error_estimate,
            evaluations,
        })
        .collect())
}

/// Vector-valued counterpart of [`integrate_2d_product`]: every component of
/// `f(x, y, out)` is integrated over the rectangle on shared meshes.
pub fn integrate_2d_product_vec<F>(
    mut f: F,
    ax: f64,
    bx: f64,
    ay: f64,
    by: f64,
    dim: usize,
    tol: Tolerance,
) -> Result<Vec<QuadratureResult>, QuadratureError>
where
    F: FnMut(f64, f64, &mut [f64]),
{
    tol.validate()?;
    if !(ay.is_finite() && by.is_finite() && ay < by) {
        return Err(QuadratureError::InvalidInterval { a: ay, b: by });
    }
    if !(ax.is_finite() && bx.is_finite() && ax < bx) {
        return Err(QuadratureError::InvalidInterval { a: ax, b: bx });
    }
    let inner_tol = Tolerance {
        abs_tol: tol.abs_tol * 0.5 / (bx - ax),
        rel_tol: tol.rel_tol * 0.5,
        max_subdivisions: tol.max_subdivisions,
    };
    let mut inner_evaluations = 0usize;
    let mut inner_error = alloc::vec![0.0f64; dim];

    let outer = integrate_1d_vec(
        |x, out: &mut [f64]| {
            let inner = integrate_1d_vec(
                |y, row: &mut [f64]| {
                    f(x, y, row);
                    Ok(())
                },
                ay,
                by,
                dim,
                inner_tol,
            )?;
            inner_evaluations += inner.first().map_or(0, |r| r.evaluations);
            for (c, r) in inner.iter().enumerate() {
                out[c] = r.value;
                inner_error[c] = inner_error[c].max(r.error_estimate);
            }
            Ok(())
        },
        ax,
        bx,
        dim,
        tol.scaled(0.5),
    )?;

    Ok(outer
        .into_iter()
        .zip(inner_error)
        .map(|(r, inner)| QuadratureResult {
            value: r.value,
            error_estimate: r.error_estimate + (bx - ax) * inner,
            evaluations: inner_evaluations.max(1),
        })
        .collect())
}

/// Composite Simpson integral of equally spaced samples.
///
/// An even sample count is handled by Simpson over the first `n - 1` samples
/// plus one trapezoid panel at the end.
pub fn integrate_grid(samples: &[f64], spacing: f64) -> Result<f64, QuadratureError> {
    if samples.len() < 3 {
        return Err(QuadratureError::TooFewSamples { len: samples.len() });
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(QuadratureError::InvalidSpacing { spacing });
    }

    let n = samples.len();
    let simpson_len = if n % 2 == 1 { n } else { n - 1 };
    let simpson = &samples[..simpson_len];

    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, &s) in simpson.iter().enumerate().take(simpson_len - 1).skip(1) {
        if i % 2 == 1 {
            odd += s;
        } else {
            even += s;
        }
    }
    let mut total = spacing / 3.0 * (simpson[0] + 4.0 * odd + 2.0 * even + simpson[simpson_len - 1]);
    if simpson_len < n {
        total += 0.5 * spacing * (samples[n - 2] + samples[n - 1]);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn close(actual: f64, expected: f64, eps: f64) {
        assert!(
            (actual - expected).abs() <= eps,
            "expected {expected}, got {actual} (diff {:e})",
            (actual - expected).abs()
        );
    }

    #[test]
    fn constant_integrand() {
        let r = integrate_1d(|_| 1.0, -1.0, 1.0, tol()).unwrap();
        close(r.value, 2.0, 1e-14);
        assert!(r.evaluations >= 1);
        assert!(r.error_estimate >= 0.0);
    }

    #[test]
    fn antisymmetric_integrand_vanishes() {
        let r = integrate_1d(libm::sin, -1.0, 1.0, tol()).unwrap();
        close(r.value, 0.0, tol().abs_tol);
    }

    #[test]
    fn oscillatory_cosine_closed_form() {
        let r = integrate_1d(|k| libm::cos(5.0 * k), -1.0, 1.0, tol()).unwrap();
        let exact = 2.0 * libm::sin(5.0) / 5.0;
        close(r.value, exact, tol().target(exact));
        close(r.value, -0.383_570, 1e-6);
        assert!(r.error_estimate <= tol().target(r.value));
    }

    #[test]
    fn highly_oscillatory_needs_subdivision() {
        let r = integrate_1d(|k| libm::cos(80.0 * k), -1.0, 1.0, tol()).unwrap();
        close(r.value, 2.0 * libm::sin(80.0) / 80.0, 1e-10);
        assert!(r.evaluations > KRONROD_POINTS);
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(matches!(
            integrate_1d(|_| 1.0, 1.0, -1.0, tol()),
            Err(QuadratureError::InvalidInterval { .. })
        ));
        assert!(matches!(
            integrate_1d(|_| 1.0, 0.0, f64::INFINITY, tol()),
            Err(QuadratureError::InvalidInterval { .. })
        ));
    }

    #[test]
    fn reports_non_finite_integrand() {
        let err = integrate_1d(|x| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0, tol()).unwrap_err();
        assert!(matches!(err, QuadratureError::NonFinite { .. }));
    }

    #[test]
    fn non_convergence_when_budget_is_exhausted() {
        let tight = Tolerance::new(1e-15, 1e-15, 1).unwrap();
        let err = integrate_1d(|k| libm::cos(200.0 * k), -1.0, 1.0, tight).unwrap_err();
        assert!(matches!(err, QuadratureError::NonConvergence { subdivisions: 1, .. }));
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0, 1e-8, 10).is_err());
        assert!(Tolerance::new(1e-10, 1.0, 10).is_err());
        assert!(Tolerance::new(1e-10, 1e-8, 0).is_err());
        assert_eq!(Tolerance::new(1e-10, 1e-8, 2000).unwrap(), Tolerance::DEFAULT);
    }

    #[test]
    fn product_region_examples() {
        let r = integrate_2d_product(|_, _| 1.0, 0.0, 1.0, 0.0, 1.0, tol()).unwrap();
        close(r.value, 1.0, 1e-12);

        let r = integrate_2d_product(
            |x, y| libm::sin(x) + libm::sin(y),
            -1.0,
            1.0,
            -1.0,
            1.0,
            tol(),
        )
        .unwrap();
        close(r.value, 0.0, tol().abs_tol);

        let r = integrate_2d_product(
            |x, y| libm::cos(x) * libm::cos(y),
            -1.0,
            1.0,
            -1.0,
            1.0,
            tol(),
        )
        .unwrap();
        let exact = libm::pow(2.0 * libm::sin(1.0), 2.0);
        close(r.value, exact, tol().target(exact));
        close(r.value, 2.832_294, 1e-6);
    }

    #[test]
    fn product_region_propagates_inner_failure() {
        let err = integrate_2d_product(
            |x, y| if y > 0.9 && x > 0.0 { f64::INFINITY } else { 1.0 },
            -1.0,
            1.0,
            0.0,
            1.0,
            tol(),
        )
        .unwrap_err();
        assert!(matches!(err, QuadratureError::NonFinite { .. }));
    }

    fn sample(f: impl Fn(f64) -> f64, a: f64, h: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| f(a + i as f64 * h)).collect()
    }

    #[test]
    fn grid_rule_examples() {
        close(integrate_grid(&sample(|_| 1.0, 0.0, 0.25, 5), 0.25).unwrap(), 1.0, 1e-15);
        close(integrate_grid(&sample(|y| y, 0.0, 0.25, 5), 0.25).unwrap(), 0.5, 1e-15);
        close(
            integrate_grid(&sample(|y| y * y, 0.0, 0.05, 41), 0.05).unwrap(),
            8.0 / 3.0,
            1e-4,
        );
    }

    #[test]
    fn grid_rule_exact_for_cubics_with_odd_count() {
        let v = integrate_grid(&sample(|y| y * y * y - y, 0.0, 0.5, 9), 0.5).unwrap();
        close(v, 4.0f64.powi(4) / 4.0 - 8.0, 1e-12);
    }

    #[test]
    fn grid_rule_even_count_pads_with_trapezoid() {
        // Linear data is integrated exactly by both pieces.
        let v = integrate_grid(&sample(|y| 2.0 * y + 1.0, 0.0, 0.5, 6), 0.5).unwrap();
        close(v, 2.5 * 2.5 + 2.5, 1e-12);
    }

    #[test]
    fn grid_rule_errors() {
        assert_eq!(
            integrate_grid(&[1.0, 2.0], 0.1),
            Err(QuadratureError::TooFewSamples { len: 2 })
        );
        assert!(matches!(
            integrate_grid(&[1.0, 2.0, 3.0], 0.0),
            Err(QuadratureError::InvalidSpacing { .. })
        ));
    }

    #[test]
    fn vector_rule_matches_scalar_rule_per_component() {
        let freqs = [0.0, 1.0, 7.5, 30.0];
        let v = integrate_1d_vec(
            |x, out: &mut [f64]| {
                for (o, w) in out.iter_mut().zip(freqs) {
                    *o = libm::cos(w * x) * libm::exp(-x * x);
                }
                Ok(())
            },
            -3.0,
            2.0,
            freqs.len(),
            tol(),
        )
        .unwrap();
        for (r, w) in v.iter().zip(freqs) {
            let scalar = integrate_1d(|x| libm::cos(w * x) * libm::exp(-x * x), -3.0, 2.0, tol()).unwrap();
            close(r.value, scalar.value, 1e-9);
            assert!(r.error_estimate <= tol().target(r.value));
        }
    }

    #[test]
    fn vector_rule_propagates_failures() {
        let bad = integrate_1d_vec(
            |x, out: &mut [f64]| {
                out[0] = 1.0;
                out[1] = 1.0 / x;
                Ok(())
            },
            0.0,
            1.0,
            2,
            tol(),
        );
        assert!(bad.is_err());
        let refused = integrate_1d_vec(|_, _: &mut [f64]| Err(QuadratureError::NonFinite { at: 0.5 }), 0.0, 1.0, 1, tol());
        assert_eq!(refused, Err(QuadratureError::NonFinite { at: 0.5 }));
    }

    #[test]
    fn vector_product_rule_on_polynomials() {
        let v = integrate_2d_product_vec(
            |x, y, out: &mut [f64]| {
                out[0] = 1.0;
                out[1] = x * y * y;
            },
            0.0,
            2.0,
            -1.0,
            1.0,
            2,
            tol(),
        )
        .unwrap();
        close(v[0].value, 4.0, 1e-12);
        close(v[1].value, 4.0 / 3.0, 1e-12);
    }
}
