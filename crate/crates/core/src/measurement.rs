//! Position densities after a residual-energy measurement.
//!
//! Measuring the residual energy `E_m` of the two-body state leaves the free
//! pair in `|k_m, -k_m⟩ + |-k_m, k_m⟩` with `k_m = √(E - E_m)`: a standing
//! wave with no localisation at all. For three bodies the free momenta are
//! confined to the shell `½ (k1² + k2² + (k1 + k2)²) = E - E_m`, i.e. the
//! ellipse `k1² + k1 k2 + k2² = E - E_m` clipped to `[-k0, k0]²`; the shell
//! is sampled with equal weights in the ellipse's angular parameter.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use thiserror::Error;

use crate::grid::Axis;
use crate::lke_kernel::{three_body_kinetic, KernelParams};

pub const DEFAULT_SHELL_COUNT: usize = 720;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasurementError {
    #[error("invalid energy shell: {0}")]
    InvalidShell(&'static str),
    #[error("no shell point lies inside the momentum square")]
    EmptyShell,
    #[error("shell sampling needs at least 8 points, got {0}")]
    InvalidCount(usize),
    #[error("density has zero total mass")]
    ZeroMass,
    #[error("invalid density samples: {0}")]
    InvalidSamples(&'static str),
}

/// Momenta compatible with a measured residual energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyShell {
    energy: f64,
    measured: f64,
    k0: f64,
}

impl EnergyShell {
    pub fn new(energy: f64, measured: f64, k0: f64) -> Result<Self, MeasurementError> {
        if !(k0.is_finite() && k0 > 0.0) {
            return Err(MeasurementError::InvalidShell("k0 must be positive"));
        }
        if !(energy.is_finite() && measured.is_finite() && measured >= 0.0 && measured <= energy) {
            return Err(MeasurementError::InvalidShell("requires 0 <= E_m <= E"));
        }
        Ok(EnergyShell { energy, measured, k0 })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn measured(&self) -> f64 {
        self.measured
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    /// Kinetic energy left to the free bodies, `E - E_m`.
    pub fn kinetic(&self) -> f64 {
        self.energy - self.measured
    }

    /// `|½ (k1² + k2² + (k1 + k2)²) - (E - E_m)|`.
    pub fn residual(&self, k1: f64, k2: f64) -> f64 {
        (three_body_kinetic(k1, k2) - self.kinetic()).abs()
    }
}

/// Free-pair momentum after measuring `E_m` in the two-body state.
pub fn two_body_momentum_after(energy: f64, measured: f64) -> f64 {
    libm::sqrt(f64::max(energy - measured, 0.0))
}

/// `cos²(k_m (x + x12))` for the relative coordinate `x = x1 - x2`.
pub fn post_measurement_density_2body(x: f64, k_m: f64, x12: f64) -> f64 {
    let c = libm::cos(k_m * (x + x12));
    c * c
}

/// `count` equally spaced angles on the shell ellipse, keeping the points
/// inside `[-k0, k0]²`.
///
/// In the rotated frame `k1 = (u + v)/√2`, `k2 = (u - v)/√2` the ellipse is
/// `3u²/2 + v²/2 = E - E_m`. A degenerate shell (`E_m = E`) yields the single
/// point `(0, 0)`.
pub fn shell_points(shell: &EnergyShell, count: usize) -> Result<Vec<(f64, f64)>, MeasurementError> {
    if count < 8 {
        return Err(MeasurementError::InvalidCount(count));
    }
    let kinetic = shell.kinetic();
    if kinetic <= 0.0 {
        return Ok(alloc::vec![(0.0, 0.0)]);
    }
    let u_radius = libm::sqrt(2.0 * kinetic / 3.0);
    let v_radius = libm::sqrt(2.0 * kinetic);
    let k0 = shell.k0;
    let points: Vec<(f64, f64)> = (0..count)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / count as f64;
            let u = u_radius * libm::cos(theta);
            let v = v_radius * libm::sin(theta);
            ((u + v) / SQRT_2, (u - v) / SQRT_2)
        })
        .filter(|&(k1, k2)| k1.abs() <= k0 && k2.abs() <= k0)
        .collect();
    if points.is_empty() {
        Err(MeasurementError::EmptyShell)
    } else {
        Ok(points)
    }
}

/// `|Σ_shell e^{i (k1 xx1 + k2 xx2)}|²` over pre-computed shell points.
pub fn shell_density(xx1: f64, xx2: f64, points: &[(f64, f64)]) -> f64 {
    let (re, im) = points.iter().fold((0.0, 0.0), |(re, im), &(k1, k2)| {
        let phase = k1 * xx1 + k2 * xx2;
        (re + libm::cos(phase), im + libm::sin(phase))
    });
    re * re + im * im
}

/// Three-body relative-position density after measuring `E_m`.
pub fn post_measurement_density_3body(
    xx1: f64,
    xx2: f64,
    shell: &EnergyShell,
    count: usize,
) -> Result<f64, MeasurementError> {
    Ok(shell_density(xx1, xx2, &shell_points(shell, count)?))
}

/// Non-negative density samples on an equally spaced coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionDensity1D {
    samples: Vec<(f64, f64)>,
    spacing: f64,
    normalisation: f64,
}

impl PositionDensity1D {
    /// `samples` must be in ascending, equally spaced coordinate order.
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self, MeasurementError> {
        if samples.is_empty() {
            return Err(MeasurementError::InvalidSamples("no samples"));
        }
        if samples.iter().any(|&(x, d)| !x.is_finite() || !d.is_finite() || d < 0.0) {
            return Err(MeasurementError::InvalidSamples("densities must be finite and non-negative"));
        }
        let spacing = if samples.len() > 1 {
            samples[1].0 - samples[0].0
        } else {
            1.0
        };
        if spacing.is_nan() || spacing <= 0.0 {
            return Err(MeasurementError::InvalidSamples("coordinates must ascend"));
        }
        let uneven = samples
            .windows(2)
            .any(|w| ((w[1].0 - w[0].0) - spacing).abs() > 1e-9 * spacing);
        if uneven {
            return Err(MeasurementError::InvalidSamples("coordinates must be equally spaced"));
        }
        let normalisation = samples.iter().map(|s| s.1).sum::<f64>() * spacing;
        Ok(PositionDensity1D {
            samples,
            spacing,
            normalisation,
        })
    }

    pub fn from_axis(axis: &Axis, density: impl Fn(f64) -> f64) -> Result<Self, MeasurementError> {
        PositionDensity1D::new(axis.values().map(|x| (x, density(x))).collect())
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Sampled mass `Σ d·h`.
    pub fn normalisation(&self) -> f64 {
        self.normalisation
    }
}

/// Width of the smallest window of samples centred on the peak that holds at
/// least half of the sampled mass, in coordinate units (`(2m + 1)·h` for a
/// window of `2m + 1` samples).
///
/// When the maximum is attained at several samples the median one is the
/// peak.
pub fn width_metric(d: &PositionDensity1D) -> Result<f64, MeasurementError> {
    let values: Vec<f64> = d.samples.iter().map(|s| s.1).collect();
    let total: f64 = values.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(MeasurementError::ZeroMass);
    }
    let max = values.iter().fold(0.0f64, |m, &v| m.max(v));
    let tied: Vec<usize> = (0..values.len()).filter(|&i| values[i] == max).collect();
    let peak = tied[(tied.len() - 1) / 2];

    let n = values.len();
    let mut mass = values[peak];
    let mut half_width = 0usize;
    while mass < 0.5 * total {
        half_width += 1;
        if peak >= half_width {
            mass += values[peak - half_width];
        }
        if peak + half_width < n {
            mass += values[peak + half_width];
        }
    }
    Ok((2 * half_width + 1) as f64 * d.spacing)
}

/// Where the post-measurement density is sampled: `xx2 = 0`, `xx1` on an
/// axis, with a fixed shell sampling count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceSpec {
    pub xx1_axis: Axis,
    pub shell_count: usize,
}

impl SliceSpec {
    pub fn new(xx1_axis: Axis) -> Self {
        SliceSpec {
            xx1_axis,
            shell_count: DEFAULT_SHELL_COUNT,
        }
    }
}

/// Post-measurement density on the `xx2 = 0` slice.
pub fn post_measurement_slice(
    measured: f64,
    p: &KernelParams,
    slice: &SliceSpec,
) -> Result<PositionDensity1D, MeasurementError> {
    let shell = EnergyShell::new(p.energy(), measured, p.k0())?;
    let points = shell_points(&shell, slice.shell_count)?;
    PositionDensity1D::from_axis(&slice.xx1_axis, |x| shell_density(x, 0.0, &points))
}

/// `(E_m, W)` for each requested measurement outcome, in input order.
pub fn broadening_curve(
    measured_values: &[f64],
    p: &KernelParams,
    slice: &SliceSpec,
) -> Result<Vec<(f64, f64)>, MeasurementError> {
    if p.is_two_body() {
        return Err(MeasurementError::InvalidShell("broadening curve needs three-body parameters"));
    }
    measured_values
        .iter()
        .map(|&em| {
            if !(em >= 0.0 && em < p.energy()) {
                return Err(MeasurementError::InvalidShell("requires 0 <= E_m < E"));
            }
            let density = post_measurement_slice(em, p, slice)?;
            Ok((em, width_metric(&density)?))
        })
        .collect()
}
