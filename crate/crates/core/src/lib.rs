//! Allocation-only numerical core for the quasilinear Klein-Gordon laboratory
//! on `R^2 x T`.
//!
//! Everything here is a pure function of its inputs: Fourier symbols of
//! `Lambda = sqrt(1 - Delta)`, the smooth dyadic cutoffs, resonance phases,
//! the bilinear multiplier of the quadratic nonlinearity, adaptive
//! quadrature for the radial oscillatory kernels, and log-log decay fits.
//! Grid-backed fields, FFTs, IO and the CLI live in the `kgsim` crate.
#![no_std]

extern crate alloc;

pub mod bessel;
pub mod coeffs;
pub mod cutoff;
pub mod fit;
pub mod kernel;
pub mod multiplier;
pub mod phase;
pub mod quadrature;
pub mod symbol;

pub use num_complex::Complex64;

pub use coeffs::{NonlinearityCoeffs, Preset};
pub use cutoff::DyadicCutoffs;
pub use fit::{fit_decay, DecayFit, FitError};
pub use kernel::{BoundReport, KernelError, KernelQuery, Shell};
pub use multiplier::{BilinearSymbol, LinearFactor};
pub use phase::{PhaseQuery, Sign};
pub use symbol::lambda;
