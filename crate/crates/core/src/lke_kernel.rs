//! Position-basis kernels of the energy-momentum eigenstates.
//!
//! The two-body kernel
//!
//! ```text
//! psi(x, y) = ∫_{-k0}^{k0} cos(x k) cos(y √(E - k²)) dk
//! ```
//!
//! and its three-body extension
//!
//! ```text
//! psi3(xx1, xx2, y) = ∬_{[-k0, k0]²} cos(k1 xx1 + k2 xx2) cos(y √(E - E_k)) dk1 dk2,
//! E_k = ½ (k1² + k2² + (k1 + k2)²)
//! ```
//!
//! are evaluated in reduced coordinates (`x = x1 - x2 + x12`, `y = y3 - y4`
//! and so on). Tracing out the internal coordinate `y` gives the unnormalised
//! position densities `d(x)` and `d(xx1, xx2)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use thiserror::Error;

use crate::grid::{Axis, Grid2D, GridError};
use crate::numerics::{
    integrate_1d, integrate_2d_product, integrate_2d_product_vec, integrate_grid, QuadratureError, Tolerance,
};
use crate::sweep::Sweep;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("invalid kernel parameters: {0}")]
    InvalidParams(&'static str),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Mean separations carried by the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Offsets {
    Two { x12: f64 },
    Three { x13: f64, x23: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    k0: f64,
    energy: f64,
    offsets: Offsets,
}

impl KernelParams {
    /// Two-body parameters; requires `E >= k0²`.
    pub fn two_body(k0: f64, energy: f64, x12: f64) -> Result<Self, KernelError> {
        check_cutoff(k0)?;
        if !(energy.is_finite() && energy >= k0 * k0) {
            return Err(KernelError::InvalidParams("two-body kernel requires E >= k0^2"));
        }
        if !x12.is_finite() {
            return Err(KernelError::InvalidParams("offset x12 must be finite"));
        }
        Ok(KernelParams {
            k0,
            energy,
            offsets: Offsets::Two { x12 },
        })
    }

    /// Three-body parameters; requires `E >= 3 k0²`.
    pub fn three_body(k0: f64, energy: f64, x13: f64, x23: f64) -> Result<Self, KernelError> {
        check_cutoff(k0)?;
        if !(energy.is_finite() && energy >= 3.0 * k0 * k0) {
            return Err(KernelError::InvalidParams("three-body kernel requires E >= 3 k0^2"));
        }
        if !(x13.is_finite() && x23.is_finite()) {
            return Err(KernelError::InvalidParams("offsets x13, x23 must be finite"));
        }
        Ok(KernelParams {
            k0,
            energy,
            offsets: Offsets::Three { x13, x23 },
        })
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn offsets(&self) -> Offsets {
        self.offsets
    }

    pub fn is_two_body(&self) -> bool {
        matches!(self.offsets, Offsets::Two { .. })
    }

    /// Reduced coordinate `x1 - x2 + x12` (two-body parameters only).
    pub fn reduced_x(&self, x1: f64, x2: f64) -> Option<f64> {
        match self.offsets {
            Offsets::Two { x12 } => Some(x1 - x2 + x12),
            Offsets::Three { .. } => None,
        }
    }

    /// Reduced coordinates `(x1 - x3 + x13, x2 - x3 + x23)` (three-body only).
    pub fn reduced_xx(&self, x1: f64, x2: f64, x3: f64) -> Option<(f64, f64)> {
        match self.offsets {
            Offsets::Three { x13, x23 } => Some((x1 - x3 + x13, x2 - x3 + x23)),
            Offsets::Two { .. } => None,
        }
    }

    fn require_two_body(&self) -> Result<(), KernelError> {
        if self.is_two_body() {
            Ok(())
        } else {
            Err(KernelError::InvalidParams("two-body kernel called with three-body parameters"))
        }
    }

    fn require_three_body(&self) -> Result<(), KernelError> {
        if self.is_two_body() {
            Err(KernelError::InvalidParams("three-body kernel called with two-body parameters"))
        } else {
            Ok(())
        }
    }
}

fn check_cutoff(k0: f64) -> Result<(), KernelError> {
    if k0.is_finite() && k0 > 0.0 {
        Ok(())
    } else {
        Err(KernelError::InvalidParams("k0 must be positive and finite"))
    }
}

/// Residual-energy factor `cos(y √max(r, 0))`.
#[inline]
fn standing_wave(y: f64, residual: f64) -> f64 {
    libm::cos(y * libm::sqrt(f64::max(residual, 0.0)))
}

/// Kinetic energy `½ (k1² + k2² + (k1 + k2)²)` of the three free bodies.
#[inline]
pub fn three_body_kinetic(k1: f64, k2: f64) -> f64 {
    let k3 = k1 + k2;
    0.5 * (k1 * k1 + k2 * k2 + k3 * k3)
}

/// Integrand of [`psi`] at momentum `k`.
#[inline]
pub fn psi_integrand(x: f64, y: f64, k: f64, energy: f64) -> f64 {
    libm::cos(x * k) * standing_wave(y, energy - k * k)
}

/// Real integrand of [`psi3`] at `(k1, k2)`.
#[inline]
pub fn psi3_integrand(xx1: f64, xx2: f64, y: f64, k1: f64, k2: f64, energy: f64) -> f64 {
    libm::cos(k1 * xx1 + k2 * xx2) * standing_wave(y, energy - three_body_kinetic(k1, k2))
}

/// Imaginary integrand dropped from [`psi3`].
#[inline]
pub fn psi3_sine_integrand(xx1: f64, xx2: f64, y: f64, k1: f64, k2: f64, energy: f64) -> f64 {
    libm::sin(k1 * xx1 + k2 * xx2) * standing_wave(y, energy - three_body_kinetic(k1, k2))
}

/// Two-body kernel at reduced coordinates `(x, y)`.
///
/// The integrand is even in `k`, so only `[0, k0]` is integrated.
pub fn psi(x: f64, y: f64, p: &KernelParams, tol: Tolerance) -> Result<f64, KernelError> {
    p.require_two_body()?;
    let energy = p.energy;
    let half = integrate_1d(|k| psi_integrand(x, y, k, energy), 0.0, p.k0, tol.scaled(0.5))?;
    Ok(2.0 * half.value)
}

/// Three-body kernel at reduced coordinates `(xx1, xx2, y)`.
///
/// The integrand is invariant under `(k1, k2) -> (-k1, -k2)`, so the square is
/// folded onto `k1 >= 0`.
pub fn psi3(xx1: f64, xx2: f64, y: f64, p: &KernelParams, tol: Tolerance) -> Result<f64, KernelError> {
    p.require_three_body()?;
    let energy = p.energy;
    let k0 = p.k0;
    let half = integrate_2d_product(
        |k1, k2| psi3_integrand(xx1, xx2, y, k1, k2, energy),
        0.0,
        k0,
        -k0,
        k0,
        tol.scaled(0.5),
    )?;
    Ok(2.0 * half.value)
}

/// [`psi3`] at `y = y0 + j dy` for `j < count`, integrated on one adaptive
/// mesh that satisfies `tol` for every `y` at once.
///
/// Along the ladder the standing waves are generated by repeated rotation
/// through `dy √(E - E_k)`.
pub fn psi3_ladder(
    xx1: f64,
    xx2: f64,
    y0: f64,
    dy: f64,
    count: usize,
    p: &KernelParams,
    tol: Tolerance,
) -> Result<Vec<f64>, KernelError> {
    p.require_three_body()?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let energy = p.energy;
    let k0 = p.k0;
    let half = integrate_2d_product_vec(
        |k1, k2, out: &mut [f64]| {
            let phase = libm::cos(k1 * xx1 + k2 * xx2);
            let w = libm::sqrt(f64::max(energy - three_body_kinetic(k1, k2), 0.0));
            let (mut s, mut c) = (libm::sin(y0 * w), libm::cos(y0 * w));
            let (ds, dc) = (libm::sin(dy * w), libm::cos(dy * w));
            for v in out.iter_mut() {
                *v = phase * c;
                (c, s) = (c * dc - s * ds, s * dc + c * ds);
            }
        },
        0.0,
        k0,
        -k0,
        k0,
        count,
        tol.scaled(0.5),
    )?;
    Ok(half.into_iter().map(|r| 2.0 * r.value).collect())
}

/// Magnitude of the sine part of the three-body integral over the full square.
///
/// Opposite quadrants cancel pairwise, so this is a pure quadrature residual.
pub fn quadrant_cancellation_check(
    xx1: f64,
    xx2: f64,
    y: f64,
    p: &KernelParams,
    tol: Tolerance,
) -> Result<f64, KernelError> {
    p.require_three_body()?;
    let energy = p.energy;
    let k0 = p.k0;
    let r = integrate_2d_product(
        |k1, k2| psi3_sine_integrand(xx1, xx2, y, k1, k2, energy),
        -k0,
        k0,
        -k0,
        k0,
        tol,
    )?;
    Ok(r.value.abs())
}

/// Indices `0..axis.count()` grouped by their mirror representative.
fn canonical_indices(axis: &Axis) -> Vec<usize> {
    (0..axis.count()).filter(|&i| axis.canonical(i) == i).collect()
}

/// Tabulates [`psi`] on `x_axis x y_axis`.
///
/// Symmetric axes are evaluated on their non-negative half only and filled by
/// index reflection, so the grid is exactly even in both coordinates.
pub fn psi_grid<S: Sweep>(
    p: &KernelParams,
    x_axis: Axis,
    y_axis: Axis,
    tol: Tolerance,
    sweep: &S,
) -> Result<Grid2D, KernelError> {
    p.require_two_body()?;
    let xs = canonical_indices(&x_axis);
    let ys = canonical_indices(&y_axis);
    let ny = ys.len();

    let computed = sweep.map(xs.len() * ny, |n| {
        psi(x_axis.value(xs[n / ny]), y_axis.value(ys[n % ny]), p, tol)
    });
    let computed: Vec<f64> = computed.into_iter().collect::<Result<_, _>>()?;

    let x_slot = slot_table(&x_axis, &xs);
    let y_slot = slot_table(&y_axis, &ys);
    let mut values = Vec::with_capacity(x_axis.count() * y_axis.count());
    for i in 0..x_axis.count() {
        for j in 0..y_axis.count() {
            values.push(computed[x_slot[i] * ny + y_slot[j]]);
        }
    }
    Ok(Grid2D::new(x_axis, y_axis, values)?)
}

/// Maps each axis index to its position within `canonical`.
fn slot_table(axis: &Axis, canonical: &[usize]) -> Vec<usize> {
    let mut position = alloc::vec![usize::MAX; axis.count()];
    for (slot, &i) in canonical.iter().enumerate() {
        position[i] = slot;
    }
    (0..axis.count()).map(|i| position[axis.canonical(i)]).collect()
}

/// Traced-out two-body density.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceOut {
    /// `(x, d(x))` in ascending `x`.
    pub samples: Vec<(f64, f64)>,
    /// Largest squared kernel value on the `y` boundary relative to the
    /// largest squared value anywhere; large ratios mean the `y` range
    /// truncates a significant part of the integrand.
    pub edge_ratio: f64,
}

impl TraceOut {
    pub fn densities(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.1)
    }
}

/// `d(x) = ∫ psi(x, y)² dy` with the `y` integral taken by composite Simpson
/// over the same samples as the sweep.
pub fn trace_out_y<S: Sweep>(
    p: &KernelParams,
    x_axis: Axis,
    y_axis: Axis,
    tol: Tolerance,
    sweep: &S,
) -> Result<TraceOut, KernelError> {
    let grid = psi_grid(p, x_axis, y_axis, tol, sweep)?;
    trace_out_grid(&grid)
}

/// Squares and integrates each row of an already tabulated kernel grid.
pub fn trace_out_grid(grid: &Grid2D) -> Result<TraceOut, KernelError> {
    let y_axis = grid.y_axis();
    let last = y_axis.count() - 1;
    let mut samples = Vec::with_capacity(grid.x_axis().count());
    let mut peak = 0.0f64;
    let mut edge = 0.0f64;
    let mut squares = Vec::with_capacity(y_axis.count());
    for i in 0..grid.x_axis().count() {
        squares.clear();
        squares.extend(grid.row(i).iter().map(|v| v * v));
        peak = squares.iter().fold(peak, |m, &v| m.max(v));
        edge = edge.max(squares[0]).max(squares[last]);
        let d = integrate_grid(&squares, y_axis.spacing())?;
        samples.push((grid.x_axis().value(i), d));
    }
    Ok(TraceOut {
        samples,
        edge_ratio: if peak > 0.0 { edge / peak } else { 0.0 },
    })
}

/// Three-body traced-out density on `xx1_axis x xx2_axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceOut3 {
    /// `(xx1, xx2, d)` in ascending `xx1`, then `xx2`.
    pub samples: Vec<(f64, f64, f64)>,
    pub edge_ratio: f64,
    /// Number of distinct points actually integrated.
    pub evaluated_points: usize,
}

/// Representative of `(a, b)` under the kernel symmetries
/// `(a, b) -> (b, a)` and `(a, b) -> (-a, -b)`, chosen with `a >= |b|`.
pub fn fundamental_domain(a: f64, b: f64) -> (f64, f64) {
    let candidates = [(a, b), (b, a), (-a, -b), (-b, -a)];
    let (u, v) = candidates
        .into_iter()
        .find(|(u, v)| *u >= v.abs())
        .unwrap_or((a, b));
    (u + 0.0, v + 0.0)
}

/// `d(xx1, xx2) = ∫ psi3(xx1, xx2, y)² dy`, evaluated on the fundamental
/// domain `xx1 >= |xx2|` only and mirrored to the rest of the grid.
pub fn trace_out_y3<S: Sweep>(
    p: &KernelParams,
    xx1_axis: Axis,
    xx2_axis: Axis,
    y_axis: Axis,
    tol: Tolerance,
    sweep: &S,
) -> Result<TraceOut3, KernelError> {
    p.require_three_body()?;

    let mut slots: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut lookup = Vec::with_capacity(xx1_axis.count() * xx2_axis.count());
    for a in xx1_axis.values() {
        for b in xx2_axis.values() {
            let (u, v) = fundamental_domain(a, b);
            let slot = *slots.entry((u.to_bits(), v.to_bits())).or_insert_with(|| {
                points.push((u, v));
                points.len() - 1
            });
            lookup.push(slot);
        }
    }

    let ys = canonical_indices(&y_axis);
    let y_slot = slot_table(&y_axis, &ys);
    let last = y_axis.count() - 1;
    let y0 = y_axis.value(ys[0]);

    let traced = sweep.map(points.len(), |n| -> Result<(f64, f64, f64), KernelError> {
        let (u, v) = points[n];
        let half: Vec<f64> = psi3_ladder(u, v, y0, y_axis.spacing(), ys.len(), p, tol)?
            .into_iter()
            .map(|value| value * value)
            .collect();
        let squares: Vec<f64> = y_slot.iter().map(|&s| half[s]).collect();
        let peak = squares.iter().fold(0.0f64, |m, &s| m.max(s));
        let edge = squares[0].max(squares[last]);
        Ok((integrate_grid(&squares, y_axis.spacing())?, peak, edge))
    });
    let traced: Vec<(f64, f64, f64)> = traced.into_iter().collect::<Result<_, _>>()?;

    let peak = traced.iter().fold(0.0f64, |m, t| m.max(t.1));
    let edge = traced.iter().fold(0.0f64, |m, t| m.max(t.2));
    let mut samples = Vec::with_capacity(lookup.len());
    let mut k = 0;
    for a in xx1_axis.values() {
        for b in xx2_axis.values() {
            samples.push((a, b, traced[lookup[k]].0));
            k += 1;
        }
    }
    Ok(TraceOut3 {
        samples,
        edge_ratio: if peak > 0.0 { edge / peak } else { 0.0 },
        evaluated_points: points.len(),
    })
}

/// Sampled `y` maximising `|psi(x, y)|`.
///
/// Exact ties prefer the smaller `|y|`, then the non-negative sample.
pub fn ridge_locate(x: f64, p: &KernelParams, y_axis: Axis, tol: Tolerance) -> Result<f64, KernelError> {
    p.require_two_body()?;
    let mut best: Option<(f64, f64)> = None;
    for y in y_axis.values() {
        let magnitude = psi(x, y, p, tol)?.abs();
        best = match best {
            None => Some((y, magnitude)),
            Some((by, bm)) => {
                let better = magnitude > bm
                    || (magnitude == bm && (y.abs() < by.abs() || (y.abs() == by.abs() && y >= 0.0)));
                Some(if better { (y, magnitude) } else { (by, bm) })
            }
        };
    }
    Ok(best.map(|b| b.0).unwrap_or(0.0))
}
