//! The quasilinear system `(d_t + i Lambda) U = F(u, du, d^2 u)` in the
//! normalized variable `U = u_t - i Lambda u`.
//!
//! `G^{00} = 0`, so the only second derivatives containing time are
//! `d_k d_t u = d_k u_t`, which are read off `U` directly; no `d_t^2 u`
//! ever has to be solved for.

use std::sync::Arc;

use kgsim_core::coeffs::CoeffError;
use kgsim_core::multiplier::BilinearSymbol;
use kgsim_core::{NonlinearityCoeffs, Sign};
use num_complex::Complex64;

use crate::field::{real_forward, real_samples, Field};
use crate::grid::{Grid, GridSpec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("initial data must be real (imaginary defect {0:e})")]
    ComplexData(f64),
    #[error("grid {0} cannot resolve quadratic products without aliasing")]
    Aliasing(GridSpec),
    #[error(transparent)]
    Coeffs(#[from] CoeffError),
    #[error("step size {h} outside (0, {h_max}]")]
    StepSize { h: f64, h_max: f64 },
    #[error("blow-up at t = {t}: ||U|| went from {before:e} to {after:e} in one step of {h}")]
    BlowUp { t: f64, h: f64, before: f64, after: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
}

/// Normalized solution at time `t`.
#[derive(Debug, Clone)]
pub struct StateU {
    pub u: Field,
    pub t: f64,
}

/// Realness tolerance for initial data.
const REAL_TOL: f64 = 1e-12;

/// `U_0 = u_1 - i Lambda u_0`.
pub fn normalize_initial_data(u0: &Field, u1: &Field) -> Result<StateU, DynamicsError> {
    if !Arc::ptr_eq(u0.grid(), u1.grid()) {
        return Err(DynamicsError::GridMismatch);
    }
    let defect = u0.imaginary_defect().max(u1.imaginary_defect());
    if defect > REAL_TOL {
        return Err(DynamicsError::ComplexData(defect));
    }
    Ok(StateU { u: u1.axpy(Complex64::new(0.0, -1.0), &u0.apply_lambda(1.0)), t: 0.0 })
}

/// `(u, u_t) = (i (U - conj U) / (2 Lambda), (U + conj U) / 2)`.
pub fn recover(big_u: &Field) -> (Field, Field) {
    let c = big_u.conj_reflect();
    let u = (big_u - &c).apply_lambda(-1.0).scale(Complex64::new(0.0, 0.5));
    let udot = (big_u + &c) * 0.5;
    (u, udot)
}

impl StateU {
    pub fn recover(&self) -> (Field, Field) {
        recover(&self.u)
    }

    /// `V = e^{it Lambda} U`.
    pub fn profile(&self) -> Field {
        self.u.propagate(self.t, Sign::Plus)
    }
}

/// Pairs `(j, k)`, `j <= k`, `(j, k) != (0, 0)`, whose `G^{jk}` can be nonzero.
fn active_pairs(coeffs: &NonlinearityCoeffs) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for j in 0..4 {
        for k in j..4 {
            if (j, k) != (0, 0) && coeffs.g_pair_active(j, k) {
                out.push((j, k));
            }
        }
    }
    out
}

/// `d_j d_k u` with index 0 meaning time (only one side may be time).
fn second_derivative(u: &Field, udot: &Field, j: usize, k: usize) -> Field {
    let axis = |s: usize| -> [u32; 3] {
        let mut o = [0; 3];
        o[s - 1] = 1;
        o
    };
    match (j, k) {
        (0, s) | (s, 0) => udot.partial(axis(s)),
        (a, b) => {
            let (x, y) = (axis(a), axis(b));
            u.partial([x[0] + y[0], x[1] + y[1], x[2] + y[2]])
        }
    }
}

/// Physical-space assembly of
/// `F = sum_{j,k} G^{jk}(u, du) d_jk u + Q(u, du)`, returned dealiased.
pub fn evaluate_nonlinearity(u: &Field, udot: &Field, coeffs: &NonlinearityCoeffs) -> Result<Field, DynamicsError> {
    coeffs.validate()?;
    let grid = u.grid();
    if coeffs.is_zero() {
        return Ok(Field::zeros(grid));
    }
    if !grid.spec().alias_free() {
        return Err(DynamicsError::Aliasing(*grid.spec()));
    }
    let pairs = active_pairs(coeffs);
    let d = [u.partial([1, 0, 0]), u.partial([0, 1, 0]), u.partial([0, 0, 1])];
    let seconds: Vec<Field> = pairs.iter().map(|&(j, k)| second_derivative(u, udot, j, k)).collect();
    let mut refs: Vec<&Field> = vec![u, udot, &d[0], &d[1], &d[2]];
    refs.extend(seconds.iter());
    let s = real_samples(&refs);
    let npts = grid.len();
    let mut out = vec![0.0; npts];
    for (p, o) in out.iter_mut().enumerate() {
        let w = [s[0][p], s[1][p], s[2][p], s[3][p], s[4][p]];
        let mut f = coeffs.quadratic_form(&w);
        for (i, &(j, k)) in pairs.iter().enumerate() {
            let mult = if j == k { 1.0 } else { 2.0 };
            f += mult * coeffs.g_matrix_entry(j, k, &w) * s[5 + i][p];
        }
        *o = f;
    }
    Ok(real_forward(grid, &out).truncate())
}

/// `F` assembled in frequency from the bilinear symbol:
///
/// ```text
/// F^(xi, n) = Vol^{-1/2} sum_{eta, m} sum_{mu, nu} M^{mu nu}_{n,m}(xi, eta) U_mu^(xi - eta, n - m) U_nu^(eta, m)
/// ```
///
/// with `U_+ = U`, `U_- = conj U`, all frequencies restricted to the kept
/// band. Quadratic in the number of kept modes; meant for small grids.
pub fn spectral_nonlinearity(big_u: &Field, coeffs: &NonlinearityCoeffs) -> Result<Field, DynamicsError> {
    coeffs.validate()?;
    let grid = big_u.grid();
    let symbol = BilinearSymbol::from_coeffs(coeffs);
    let mut out = Field::zeros(grid);
    if symbol.is_zero() {
        return Ok(out);
    }
    let plus = big_u.coeffs();
    let minus_field = big_u.conj_reflect();
    let minus = minus_field.coeffs();
    let kept: Vec<usize> = (0..grid.len()).filter(|&i| grid.kept()[i]).collect();
    let dk = grid.spec().plane_step();
    let norm = 1.0 / grid.volume().sqrt();
    let pick = |s: Sign, i: usize| if s == Sign::Plus { plus[i] } else { minus[i] };
    let coeffs_out = out.coeffs_mut();
    for &xi_i in &kept {
        let (a1, a2, n) = grid.lattice(xi_i);
        let mut acc = Complex64::default();
        for &eta_i in &kept {
            let (b1, b2, m) = grid.lattice(eta_i);
            let Some(d_i) = grid.index_of(a1 - b1, a2 - b2, n - m) else { continue };
            if !grid.kept()[d_i] {
                continue;
            }
            let xi = [a1 as f64 * dk, a2 as f64 * dk];
            let eta = [b1 as f64 * dk, b2 as f64 * dk];
            for mu in Sign::BOTH {
                let f1 = pick(mu, d_i);
                if f1 == Complex64::default() {
                    continue;
                }
                for nu in Sign::BOTH {
                    let f2 = pick(nu, eta_i);
                    acc += symbol.eval(mu, nu, n, m, xi, eta) * f1 * f2;
                }
            }
        }
        coeffs_out[xi_i] = acc * norm;
    }
    Ok(out)
}

/// Interaction-picture (Lawson) RK4 for `d_t U + i Lambda U = F`.
pub struct Integrator {
    coeffs: NonlinearityCoeffs,
    grid: Arc<Grid>,
    cached_h: f64,
    half_step: Vec<Complex64>,
}

impl Integrator {
    pub fn new(grid: &Arc<Grid>, coeffs: NonlinearityCoeffs) -> Result<Self, DynamicsError> {
        coeffs.validate()?;
        if !coeffs.is_zero() && !grid.spec().alias_free() {
            return Err(DynamicsError::Aliasing(*grid.spec()));
        }
        Ok(Self { coeffs, grid: grid.clone(), cached_h: f64::NAN, half_step: Vec::new() })
    }

    pub fn coeffs(&self) -> &NonlinearityCoeffs {
        &self.coeffs
    }

    /// `N(U) = F^(u(U), u_t(U))`.
    pub fn rhs(&self, big_u: &Field) -> Result<Field, DynamicsError> {
        let (u, udot) = recover(big_u);
        evaluate_nonlinearity(&u, &udot, &self.coeffs)
    }

    /// `e^{-i (h/2) Lambda}` applied coefficient-wise.
    fn half(&mut self, f: &Field, h: f64) -> Field {
        if self.cached_h != h {
            self.half_step = self
                .grid
                .lambda_table()
                .iter()
                .map(|l| Complex64::from_polar(1.0, -0.5 * h * l))
                .collect();
            self.cached_h = h;
        }
        let coeffs = f.coeffs().iter().zip(&self.half_step).map(|(c, e)| c * e).collect();
        Field::from_coeffs(&self.grid, coeffs).expect("same grid")
    }

    pub fn step(&mut self, state: &StateU, h: f64) -> Result<StateU, DynamicsError> {
        let h_max = self.grid.spec().h_max();
        if !(h > 0.0 && h <= h_max * (1.0 + 1e-12)) {
            return Err(DynamicsError::StepSize { h, h_max });
        }
        let u0 = &state.u;
        if self.coeffs.is_zero() {
            return Ok(StateU { u: u0.propagate(h, Sign::Minus), t: state.t + h });
        }
        let c = |x: f64| Complex64::new(x, 0.0);
        let a = self.rhs(u0)?;
        let eu = self.half(u0, h);
        let ua = self.half(&u0.axpy(c(h / 2.0), &a), h);
        let b = self.rhs(&ua)?;
        let ub = eu.axpy(c(h / 2.0), &b);
        let cc = self.rhs(&ub)?;
        let uc = self.half(&eu.axpy(c(h), &cc), h);
        let d = self.rhs(&uc)?;
        // E_h U + h/6 [E_h a + 2 E_{h/2}(b + c) + d]
        //   = E_{h/2}[E_{h/2}(U + h/6 a) + h/3 (b + c)] + h/6 d
        let inner = self.half(&u0.axpy(c(h / 6.0), &a), h).axpy(c(h / 3.0), &(&b + &cc));
        let next = self.half(&inner, h).axpy(c(h / 6.0), &d);
        let before = u0.l2_norm();
        let after = next.l2_norm();
        if !next.is_finite() || (before > 0.0 && after > 10.0 * before) {
            return Err(DynamicsError::BlowUp { t: state.t, h, before, after });
        }
        Ok(StateU { u: next, t: state.t + h })
    }

    /// Advances by `steps` steps of size `h`.
    pub fn advance(&mut self, state: &StateU, h: f64, steps: usize) -> Result<StateU, DynamicsError> {
        let mut s = state.clone();
        for _ in 0..steps {
            s = self.step(&s, h)?;
        }
        Ok(s)
    }
}

/// Single step, convenience wrapper over [`Integrator`].
pub fn step(state: &StateU, h: f64, coeffs: &NonlinearityCoeffs) -> Result<StateU, DynamicsError> {
    Integrator::new(state.u.grid(), coeffs.clone())?.step(state, h)
}

/// Profile of a state.
pub fn profile(state: &StateU) -> Field {
    state.profile()
}
