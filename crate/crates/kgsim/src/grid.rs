//! Discretization of `R^2 x T`: a periodic square of side `L` in the plane
//! times the circle of length `2 pi`.
//!
//! Physical samples are stored with the origin at index 0 and periodic
//! coordinates centred on it, layout `(i1 * N + i2) * ny + iy`. Spectral
//! coefficients use the same layout in FFT index order and are normalized so
//! that Parseval holds with unit constant:
//!
//! ```text
//! c = sqrt(Vol) / Npts * DFT(f),     f = IDFT(c) / sqrt(Vol),     Vol = 2 pi L^2.
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use kgsim_core::symbol::lambda;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("box_period must be positive and finite, got {0}")]
    BoxPeriod(f64),
    #[error("plane_points must be even and >= 4, got {0}")]
    PlanePoints(usize),
    #[error("mode_cutoff must be >= 1, got {0}")]
    ModeCutoff(usize),
    #[error("dealias_fraction must lie in (0, 1], got {0}")]
    DealiasFraction(f64),
    #[error("sample array has {found} entries, grid needs {expected}")]
    Shape { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub box_period: f64,
    pub plane_points: usize,
    pub mode_cutoff: usize,
    pub dealias_fraction: f64,
}

impl GridSpec {
    pub fn new(box_period: f64, plane_points: usize, mode_cutoff: usize, dealias_fraction: f64) -> Result<Self, GridError> {
        let s = Self { box_period, plane_points, mode_cutoff, dealias_fraction };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if !(self.box_period.is_finite() && self.box_period > 0.0) {
            return Err(GridError::BoxPeriod(self.box_period));
        }
        if self.plane_points < 4 || self.plane_points % 2 != 0 {
            return Err(GridError::PlanePoints(self.plane_points));
        }
        if self.mode_cutoff < 1 {
            return Err(GridError::ModeCutoff(self.mode_cutoff));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(GridError::DealiasFraction(self.dealias_fraction));
        }
        Ok(())
    }

    /// Largest kept plane index `|k|`. The Nyquist index is never kept so
    /// that real fields stay exactly Hermitian.
    pub fn plane_kmax(&self) -> usize {
        let half = self.plane_points / 2;
        ((self.dealias_fraction * half as f64 + 1e-9).floor() as usize).min(half - 1)
    }

    /// Samples along `y`, enough that `mode_cutoff` sits at the same
    /// fraction of the resolvable band as in the plane.
    pub fn y_points(&self) -> usize {
        (2.0 * self.mode_cutoff as f64 / self.dealias_fraction + 1e-9).floor() as usize + 1
    }

    /// Quadratic products of kept modes cannot alias back onto kept modes.
    pub fn alias_free(&self) -> bool {
        3 * self.plane_kmax() < self.plane_points && 3 * self.mode_cutoff < self.y_points()
    }

    pub fn total_points(&self) -> usize {
        self.plane_points * self.plane_points * self.y_points()
    }

    pub fn plane_step(&self) -> f64 {
        2.0 * PI / self.box_period
    }

    /// `Lambda` at the largest kept frequency.
    pub fn lambda_max(&self) -> f64 {
        let k = self.plane_kmax() as f64 * self.plane_step();
        lambda([k, k], self.mode_cutoff as f64)
    }

    /// Step-size budget of the integrator: `pi / Lambda_max`.
    pub fn h_max(&self) -> f64 {
        PI / self.lambda_max()
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "L={} {}^2 x {} (|n|<={}, dealias {})",
            self.box_period,
            self.plane_points,
            self.y_points(),
            self.mode_cutoff,
            self.dealias_fraction
        )
    }
}

/// A [`GridSpec`] with its frequency tables and FFT plans. Shared by
/// reference between all fields on it.
pub struct Grid {
    spec: GridSpec,
    n: usize,
    ny: usize,
    /// Signed plane index per FFT index.
    plane_index: Vec<i64>,
    /// Signed mode per FFT index along `y`.
    modes: Vec<i64>,
    kept: Vec<bool>,
    lambda: Vec<f64>,
    fwd_plane: Arc<dyn Fft<f64>>,
    inv_plane: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("spec", &self.spec).finish_non_exhaustive()
    }
}

fn signed(i: usize, n: usize) -> i64 {
    if i < (n + 1) / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Arc<Self>, GridError> {
        spec.validate()?;
        let n = spec.plane_points;
        let ny = spec.y_points();
        let plane_index: Vec<i64> = (0..n).map(|i| signed(i, n)).collect();
        let modes: Vec<i64> = (0..ny).map(|i| signed(i, ny)).collect();
        let kmax = spec.plane_kmax() as i64;
        let m = spec.mode_cutoff as i64;
        let dk = spec.plane_step();
        let total = n * n * ny;
        let mut kept = vec![false; total];
        let mut lam = vec![0.0; total];
        for i1 in 0..n {
            for i2 in 0..n {
                for iy in 0..ny {
                    let idx = (i1 * n + i2) * ny + iy;
                    let (a, b, c) = (plane_index[i1], plane_index[i2], modes[iy]);
                    kept[idx] = a.abs() <= kmax && b.abs() <= kmax && c.abs() <= m;
                    lam[idx] = lambda([a as f64 * dk, b as f64 * dk], c as f64);
                }
            }
        }
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Self {
            spec,
            n,
            ny,
            plane_index,
            modes,
            kept,
            lambda: lam,
            fwd_plane: planner.plan_fft_forward(n),
            inv_plane: planner.plan_fft_inverse(n),
            fwd_y: planner.plan_fft_forward(ny),
            inv_y: planner.plan_fft_inverse(ny),
        }))
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn plane_points(&self) -> usize {
        self.n
    }

    pub fn y_points(&self) -> usize {
        self.ny
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, iy: usize) -> usize {
        (i1 * self.n + i2) * self.ny + iy
    }

    #[inline]
    pub fn unindex(&self, idx: usize) -> (usize, usize, usize) {
        let iy = idx % self.ny;
        let p = idx / self.ny;
        (p / self.n, p % self.n, iy)
    }

    pub fn volume(&self) -> f64 {
        2.0 * PI * self.spec.box_period * self.spec.box_period
    }

    /// Physical volume element `Vol / Npts`.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    pub fn dx(&self) -> f64 {
        self.spec.box_period / self.n as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * PI / self.ny as f64
    }

    /// Centred periodic plane coordinate of index `i`.
    #[inline]
    pub fn x_coord(&self, i: usize) -> f64 {
        let s = if i < self.n / 2 { i as f64 } else { i as f64 - self.n as f64 };
        s * self.dx()
    }

    #[inline]
    pub fn y_coord(&self, iy: usize) -> f64 {
        iy as f64 * self.dy()
    }

    /// `(xi_1, xi_2, n)` of coefficient `idx`.
    #[inline]
    pub fn frequency(&self, idx: usize) -> (f64, f64, f64) {
        let (i1, i2, iy) = self.unindex(idx);
        let dk = self.spec.plane_step();
        (self.plane_index[i1] as f64 * dk, self.plane_index[i2] as f64 * dk, self.modes[iy] as f64)
    }

    /// Signed integer indices `(k1, k2, n)` of coefficient `idx`.
    #[inline]
    pub fn lattice(&self, idx: usize) -> (i64, i64, i64) {
        let (i1, i2, iy) = self.unindex(idx);
        (self.plane_index[i1], self.plane_index[i2], self.modes[iy])
    }

    /// Flat index of the lattice point `(k1, k2, n)`, if representable.
    pub fn index_of(&self, k1: i64, k2: i64, n: i64) -> Option<usize> {
        let wrap = |k: i64, len: usize| -> Option<usize> {
            let i = k.rem_euclid(len as i64) as usize;
            (signed(i, len) == k).then_some(i)
        };
        Some(self.index(wrap(k1, self.n)?, wrap(k2, self.n)?, wrap(n, self.ny)?))
    }

    pub fn lambda_table(&self) -> &[f64] {
        &self.lambda
    }

    pub fn kept(&self) -> &[bool] {
        &self.kept
    }

    pub fn lambda_max_kept(&self) -> f64 {
        self.lambda
            .iter()
            .zip(&self.kept)
            .filter(|(_, k)| **k)
            .map(|(l, _)| *l)
            .fold(1.0, f64::max)
    }

    /// In-place unnormalized 3D DFT (`inverse` selects the sign).
    pub(crate) fn fft3(&self, data: &mut [Complex64], inverse: bool) {
        let (n, ny) = (self.n, self.ny);
        debug_assert_eq!(data.len(), n * n * ny);
        let (plane, yfft) = if inverse { (&self.inv_plane, &self.inv_y) } else { (&self.fwd_plane, &self.fwd_y) };
        // y lines are contiguous
        let mut scratch = vec![Complex64::default(); yfft.get_inplace_scratch_len().max(plane.get_inplace_scratch_len())];
        yfft.process_with_scratch(data, &mut scratch);
        // i2 lines: stride ny inside each i1 slab; batch all iy of one i1
        let mut buf = vec![Complex64::default(); n * ny];
        for i1 in 0..n {
            let slab = &mut data[i1 * n * ny..(i1 + 1) * n * ny];
            for i2 in 0..n {
                for iy in 0..ny {
                    buf[iy * n + i2] = slab[i2 * ny + iy];
                }
            }
            plane.process_with_scratch(&mut buf, &mut scratch);
            for i2 in 0..n {
                for iy in 0..ny {
                    slab[i2 * ny + iy] = buf[iy * n + i2];
                }
            }
        }
        // i1 lines: stride n * ny; batch over iy for each i2
        for i2 in 0..n {
            for i1 in 0..n {
                let base = (i1 * n + i2) * ny;
                for iy in 0..ny {
                    buf[iy * n + i1] = data[base + iy];
                }
            }
            plane.process_with_scratch(&mut buf, &mut scratch);
            for i1 in 0..n {
                let base = (i1 * n + i2) * ny;
                for iy in 0..ny {
                    data[base + iy] = buf[iy * n + i1];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(1.0, 6, 1, 1.0).is_ok());
        assert_eq!(GridSpec::new(0.0, 8, 1, 1.0), Err(GridError::BoxPeriod(0.0)));
        assert_eq!(GridSpec::new(1.0, 7, 1, 1.0), Err(GridError::PlanePoints(7)));
        assert_eq!(GridSpec::new(1.0, 2, 1, 1.0), Err(GridError::PlanePoints(2)));
        assert_eq!(GridSpec::new(1.0, 8, 0, 1.0), Err(GridError::ModeCutoff(0)));
        assert_eq!(GridSpec::new(1.0, 8, 1, 1.5), Err(GridError::DealiasFraction(1.5)));
    }

    #[test]
    fn two_thirds_rule_is_alias_free() {
        let s = GridSpec::new(64.0 * PI, 256, 8, 2.0 / 3.0).unwrap();
        assert_eq!(s.plane_kmax(), 85);
        assert_eq!(s.y_points(), 25);
        assert!(s.alias_free());
        let full = GridSpec { dealias_fraction: 1.0, ..s };
        assert_eq!(full.y_points(), 17);
        assert!(!full.alias_free());
    }

    #[test]
    fn lattice_round_trip() {
        let g = Grid::new(GridSpec::new(2.0 * PI, 8, 2, 1.0).unwrap()).unwrap();
        for idx in 0..g.len() {
            let (a, b, c) = g.lattice(idx);
            assert_eq!(g.index_of(a, b, c), Some(idx));
        }
        assert_eq!(g.index_of(4, 0, 0), None);
        assert_eq!(g.index_of(-4, 0, 0), Some(g.index(4, 0, 0)));
        assert_eq!(g.lambda_table()[0], 1.0);
    }
}
