//! Localised energy-momentum eigenstates of free bodies.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the
//! computations:
//!
//! * [`numerics`]: adaptive Gauss-Kronrod quadrature in one and two
//!   dimensions and composite Simpson over tabulated samples.
//! * [`gaussian_states`]: Gaussian momentum-anticorrelated states of two and
//!   `n` bodies, their position forms and the centre-of-mass-localised
//!   counterexample.
//! * [`lke_kernel`]: the two- and three-body kernels that add residual-energy
//!   standing waves, their grids and traced-out position densities.
//! * [`spin_algebra`]: exact spin-½ tensor algebra over [`qsqrt2::QSqrt2`].
//! * [`measurement`]: densities after a residual-energy measurement and the
//!   width metric used to quantify delocalisation.
//!
//! File formats, the command line and thread-pool sweeps live in the `lke`
//! crate.

#![no_std]

extern crate alloc;

pub mod gaussian_states;
pub mod grid;
pub mod lke_kernel;
pub mod measurement;
pub mod numerics;
pub mod qsqrt2;
pub mod spin_algebra;
pub mod sweep;

pub use grid::{Axis, Grid2D};
pub use lke_kernel::KernelParams;
pub use numerics::{QuadratureResult, Tolerance};
pub use qsqrt2::QSqrt2;
pub use spin_algebra::SpinState;
pub use sweep::{Serial, Sweep};
