//! Exact linear Klein-Gordon flow, its decay certification, and the
//! composite dispersive estimate on random data.

use std::sync::Arc;

use kgsim_core::cutoff::dyadic;
use kgsim_core::{fit_decay, DecayFit, DyadicCutoffs, FitError, Sign};
use num_complex::Complex64;
use rand::Rng;

use crate::dyadic::{project_frequency, Band};
use crate::dynamics::recover;
use crate::field::{lp_norm, wrap_horizon, Field};
use crate::grid::Grid;
use crate::norms::theta_integrand;

/// `(u(t), u_t(t))` from the half-wave decomposition
/// `u^ = ((u0^ - i u1^/Lambda) e^{it Lambda} + (u0^ + i u1^/Lambda) e^{-it Lambda}) / 2`.
pub fn linear_kg_solve(u0: &Field, u1: &Field, t: f64) -> (Field, Field) {
    let i = Complex64::new(0.0, 1.0);
    let w = u1.apply_lambda(-1.0);
    let plus = u0.axpy(-i, &w).propagate(t, Sign::Plus);
    let minus = u0.axpy(i, &w).propagate(t, Sign::Minus);
    let u = (&plus + &minus) * 0.5;
    // u_t^ = i Lambda (plus - minus) / 2
    let udot = (&plus - &minus).apply_lambda(1.0).scale(i * 0.5);
    (u, udot)
}

/// Same solution through `U(t) = e^{-it Lambda} U_0`.
pub fn linear_via_propagator(u0: &Field, u1: &Field, t: f64) -> (Field, Field) {
    let big_u = u1.axpy(Complex64::new(0.0, -1.0), &u0.apply_lambda(1.0));
    recover(&big_u.propagate(t, Sign::Minus))
}

/// `||u_t||^2 + ||grad u||^2 + ||u||^2`.
pub fn linear_energy(u: &Field, udot: &Field) -> f64 {
    let lam = u.grid().lambda_table();
    u.coeffs()
        .iter()
        .zip(udot.coeffs())
        .zip(lam)
        .map(|((a, b), l)| b.norm_sqr() + l * l * a.norm_sqr())
        .sum()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecayError {
    #[error("window [{0}, {1}] leaves the wrap-around horizon [1, {2}]")]
    Window(f64, f64, f64),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Distance kept from the half-period when fitting decay.
pub const HORIZON_MARGIN: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearDecay {
    pub fit: DecayFit,
    /// `(t, S(t))` with `S` the theta integrand.
    pub series: Vec<(f64, f64)>,
}

/// Fits the decay exponent of the theta integrand of the exact linear flow.
pub fn certify_linear_decay(u0: &Field, u1: &Field, times: &[f64], window: (f64, f64), oversample: usize) -> Result<LinearDecay, DecayError> {
    let horizon = wrap_horizon(u0.grid()) - HORIZON_MARGIN;
    if !(window.0 >= 1.0 && window.1 <= horizon && window.1 > window.0) {
        return Err(DecayError::Window(window.0, window.1, horizon));
    }
    let series: Vec<(f64, f64)> = times
        .iter()
        .filter(|t| **t >= window.0 && **t <= window.1)
        .map(|&t| {
            let (u, udot) = linear_kg_solve(u0, u1, t);
            (t, theta_integrand(&u, &udot, oversample))
        })
        .collect();
    let fit = fit_decay(&series, window)?;
    Ok(LinearDecay { fit, series })
}

/// `||R_{[-1,k]} e^{it Lambda} S_l g||_inf (1 + t) / (2^{2(k+l)} ||g||_{L^1})`.
pub fn composite_ratio(g: &Field, c: &DyadicCutoffs, k: i32, l: i32, t: f64, oversample: usize) -> f64 {
    let l1 = lp_norm(g.grid(), &g.to_real(), 1.0);
    composite_ratio_with_l1(g, l1, c, k, l, t, oversample)
}

fn composite_ratio_with_l1(g: &Field, l1: f64, c: &DyadicCutoffs, k: i32, l: i32, t: f64, oversample: usize) -> f64 {
    let p = project_frequency(g, c, Band::Interval(-1, k), Band::Shell(l)).propagate(t, Sign::Plus);
    p.sup_norm(oversample) * (1.0 + t) / (dyadic(2 * (k + l)) * l1)
}

/// Random real datum: a few Gaussian bumps near the origin, each with its
/// own random profile in `y` over `|n| <= n_max`.
pub fn random_localized<R: Rng>(grid: &Arc<Grid>, rng: &mut R, n_max: usize) -> Field {
    let bumps: Vec<([f64; 2], f64, f64, Vec<(f64, f64)>)> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let centre = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let sigma = rng.gen_range(0.6..1.5);
            let amp = rng.gen_range(-1.0..1.0);
            let ys = (0..=n_max).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            (centre, sigma, amp, ys)
        })
        .collect();
    Field::from_fn(grid, |x1, x2, y| {
        bumps
            .iter()
            .map(|(c, s, a, ys)| {
                let r2 = (x1 - c[0]).powi(2) + (x2 - c[1]).powi(2);
                let prof: f64 = ys.iter().enumerate().map(|(n, (p, q))| p * (n as f64 * y).cos() + q * (n as f64 * y).sin()).sum();
                a * (-r2 / (2.0 * s * s)).exp() * prof
            })
            .sum()
    })
    .truncate()
    .real_part()
}

/// Random real band-limited field with coefficients of size
/// `exp(-|xi|^2 / 2)` on kept modes.
pub fn random_band_limited<R: Rng>(grid: &Arc<Grid>, rng: &mut R) -> Field {
    let mut f = Field::zeros(grid);
    for (i, c) in f.coeffs_mut().iter_mut().enumerate() {
        if grid.kept()[i] {
            let (a, b, n) = grid.frequency(i);
            let w = (-(a * a + b * b + 0.1 * n * n) / 2.0).exp();
            *c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * w;
        }
    }
    f.real_part()
}

/// Composite-estimate sweep: per `t`, the max ratio over data and shells.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSweep {
    pub per_t: Vec<(f64, f64)>,
    pub constant: f64,
    pub spread: f64,
}

pub fn composite_sweep(data: &[Field], c: &DyadicCutoffs, shells: &[(i32, i32)], times: &[f64], oversample: usize) -> CompositeSweep {
    let l1: Vec<f64> = data.iter().map(|g| lp_norm(g.grid(), &g.to_real(), 1.0)).collect();
    let per_t: Vec<(f64, f64)> = times
        .iter()
        .map(|&t| {
            let m = data
                .iter()
                .zip(&l1)
                .flat_map(|(g, &n1)| shells.iter().map(move |&(k, l)| composite_ratio_with_l1(g, n1, c, k, l, t, oversample)))
                .fold(0.0, f64::max);
            (t, m)
        })
        .collect();
    let constant = per_t.iter().map(|p| p.1).fold(0.0, f64::max);
    let min = per_t.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    CompositeSweep { per_t, constant, spread: constant / min }
}
