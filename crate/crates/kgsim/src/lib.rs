//! Spectral laboratory for quasilinear Klein-Gordon equations on `R^2 x T`:
//! FFT-backed fields, Littlewood-Paley projections, norms and energies, the
//! Lawson integrator, linear decay checks, and the experiment harness behind
//! the `kgsim` binary. Pure symbol/kernel math lives in [`kgsim_core`].

pub mod config;
pub mod dyadic;
pub mod dynamics;
pub mod field;
pub mod fieldfile;
pub mod grid;
pub mod harness;
pub mod linear;
pub mod norms;

pub use kgsim_core as core;

pub use dynamics::{evaluate_nonlinearity, normalize_initial_data, Integrator, StateU};
pub use field::{Derivative, Field};
pub use grid::{Grid, GridSpec};
pub use norms::{NormReport, ThetaTracker};
