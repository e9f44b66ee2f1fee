//! Gaussian momentum-anticorrelated states.
//!
//! Normalisation constants are one throughout; densities used for statistics
//! are normalised where they are consumed.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{integrate_1d, integrate_2d_product, QuadratureError, Tolerance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaussianError {
    #[error("sigma_k must be positive and finite, got {0}")]
    InvalidWidth(f64),
    #[error("expected {expected} coordinates, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("an n-body state needs n >= 2 bodies")]
    TooFewBodies,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Momentum width and mean separation of the two-body state.
///
/// The position width is derived: `sigma_x = 2 / sigma_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPairParams {
    sigma_k: f64,
    x12: f64,
}

impl GaussianPairParams {
    pub fn new(sigma_k: f64, x12: f64) -> Result<Self, GaussianError> {
        check_width(sigma_k)?;
        Ok(GaussianPairParams { sigma_k, x12 })
    }

    /// Parameters with a given position width.
    pub fn from_sigma_x(sigma_x: f64, x12: f64) -> Result<Self, GaussianError> {
        check_width(sigma_x)?;
        GaussianPairParams::new(2.0 / sigma_x, x12)
    }

    pub fn sigma_k(&self) -> f64 {
        self.sigma_k
    }

    pub fn sigma_x(&self) -> f64 {
        2.0 / self.sigma_k
    }

    pub fn x12(&self) -> f64 {
        self.x12
    }
}

fn check_width(sigma: f64) -> Result<(), GaussianError> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(GaussianError::InvalidWidth(sigma))
    }
}

/// `n`-body parameters; `offsets[j]` is `x_{j+1, n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NBodyGaussianParams {
    sigma_k: f64,
    offsets: Vec<f64>,
}

impl NBodyGaussianParams {
    pub fn new(n: usize, sigma_k: f64, offsets: Vec<f64>) -> Result<Self, GaussianError> {
        if n < 2 {
            return Err(GaussianError::TooFewBodies);
        }
        check_width(sigma_k)?;
        if offsets.len() != n - 1 {
            return Err(GaussianError::DimensionMismatch {
                expected: n - 1,
                actual: offsets.len(),
            });
        }
        Ok(NBodyGaussianParams { sigma_k, offsets })
    }

    pub fn n(&self) -> usize {
        self.offsets.len() + 1
    }

    pub fn sigma_k(&self) -> f64 {
        self.sigma_k
    }

    pub fn sigma_x(&self) -> f64 {
        2.0 / self.sigma_k
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }
}

impl From<GaussianPairParams> for NBodyGaussianParams {
    fn from(p: GaussianPairParams) -> Self {
        NBodyGaussianParams {
            sigma_k: p.sigma_k,
            offsets: alloc::vec![p.x12],
        }
    }
}

/// `e^{-k²/σk²} e^{i k x12}`, the weight of `|k>₁ ⊗ |-k>₂`.
pub fn lk_momentum_amplitude(k: f64, p: &GaussianPairParams) -> Complex64 {
    let envelope = libm::exp(-(k * k) / (p.sigma_k * p.sigma_k));
    let phase = k * p.x12;
    Complex64::new(envelope * libm::cos(phase), envelope * libm::sin(phase))
}

/// `(2√π/σx) e^{-(x1 - x2 + x12)²/σx²}`.
pub fn lk_position_amplitude(x1: f64, x2: f64, p: &GaussianPairParams) -> f64 {
    let sigma_x = p.sigma_x();
    let u = x1 - x2 + p.x12;
    2.0 * libm::sqrt(PI) / sigma_x * libm::exp(-(u * u) / (sigma_x * sigma_x))
}

/// Largest deviation, over `x_samples` (values of `x1 - x2`), between the
/// numerically integrated momentum-to-position transform and the closed form.
///
/// The `k` integral is truncated at `±8σk`; both the cosine and sine parts
/// are integrated and the complex modulus of the deviation is reported.
pub fn fourier_duality_check(
    p: &GaussianPairParams,
    x_samples: &[f64],
    tol: Tolerance,
) -> Result<f64, GaussianError> {
    let cutoff = 8.0 * p.sigma_k;
    let s2 = p.sigma_k * p.sigma_k;
    let mut worst = 0.0f64;
    for &dx in x_samples {
        let u = dx + p.x12;
        let re = integrate_1d(
            |k| libm::exp(-(k * k) / s2) * libm::cos(k * u),
            -cutoff,
            cutoff,
            tol,
        )?;
        let im = integrate_1d(
            |k| libm::exp(-(k * k) / s2) * libm::sin(k * u),
            -cutoff,
            cutoff,
            tol,
        )?;
        let exact = lk_position_amplitude(dx, 0.0, p);
        worst = worst.max(libm::hypot(re.value - exact, im.value));
    }
    Ok(worst)
}

/// `(2√π/σx)^{n-1} Π_j e^{-(x_j - x_n + x_{jn})²/σx²}`.
pub fn lkn_position_amplitude(xs: &[f64], p: &NBodyGaussianParams) -> Result<f64, GaussianError> {
    let n = p.n();
    if xs.len() != n {
        return Err(GaussianError::DimensionMismatch {
            expected: n,
            actual: xs.len(),
        });
    }
    let sigma_x = p.sigma_x();
    let prefactor = 2.0 * libm::sqrt(PI) / sigma_x;
    let last = xs[n - 1];
    let exponent: f64 = xs[..n - 1]
        .iter()
        .zip(p.offsets())
        .map(|(&x, &offset)| {
            let u = x - last + offset;
            u * u
        })
        .sum();
    Ok(libm::pow(prefactor, (n - 1) as f64) * libm::exp(-exponent / (sigma_x * sigma_x)))
}

/// Momentum statistics of the centre-of-mass-localised state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumCovariance {
    pub cov: [[f64; 2]; 2],
    pub corr: f64,
}

impl MomentumCovariance {
    fn from_cov(cov: [[f64; 2]; 2]) -> Self {
        MomentumCovariance {
            cov,
            corr: cov[0][1] / libm::sqrt(cov[0][0] * cov[1][1]),
        }
    }
}

/// Precision matrix of `|amplitude|² ∝ exp(-½ kᵀ Q k)` for the state with
/// `x12 = 0`, `σx = 1` localised about the origin.
///
/// The momentum amplitude is `e^{-k2²/4} e^{-(k1 + k2)²/4}`, whose square has
/// exponent `-½ (k1² + 2 k1 k2 + 2 k2²)`.
pub const LKL_CM_PRECISION: [[f64; 2]; 2] = [[1.0, 1.0], [1.0, 2.0]];

/// `|amplitude(k1, k2)|²`, unnormalised.
pub fn lkl_cm_momentum_density(k1: f64, k2: f64) -> f64 {
    let s = k1 + k2;
    libm::exp(-0.5 * (k2 * k2 + s * s))
}

/// Covariance and correlation from inverting [`LKL_CM_PRECISION`].
pub fn lkl_cm_momentum_covariance() -> MomentumCovariance {
    let [[a, b], [c, d]] = LKL_CM_PRECISION;
    let det = a * d - b * c;
    MomentumCovariance::from_cov([[d / det, -b / det], [-c / det, a / det]])
}

/// The same statistics by direct moment integration of
/// [`lkl_cm_momentum_density`] over `[-half_width, half_width]²`.
pub fn lkl_cm_momentum_moments(half_width: f64, tol: Tolerance) -> Result<MomentumCovariance, GaussianError> {
    let w = half_width;
    let moment = |g: &dyn Fn(f64, f64) -> f64| {
        integrate_2d_product(|k1, k2| g(k1, k2) * lkl_cm_momentum_density(k1, k2), -w, w, -w, w, tol)
            .map(|r| r.value)
    };
    let mass = moment(&|_, _| 1.0)?;
    let m1 = moment(&|k1, _| k1)? / mass;
    let m2 = moment(&|_, k2| k2)? / mass;
    let c11 = moment(&|k1, _| k1 * k1)? / mass - m1 * m1;
    let c22 = moment(&|_, k2| k2 * k2)? / mass - m2 * m2;
    let c12 = moment(&|k1, k2| k1 * k2)? / mass - m1 * m2;
    Ok(MomentumCovariance::from_cov([[c11, c12], [c12, c22]]))
}

/// Momentum pair of the two-body state: `k₂ = -k₁` holds on every term, so
/// the correlation is exactly −1.
pub fn lk_momentum_correlation() -> f64 {
    -1.0
}
