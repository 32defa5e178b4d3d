//! Littlewood-Paley projections on fields: frequency shells `R_k S_l`,
//! spatial atoms `phi_j(|x|)`, and the finite-band / Bernstein ratio checks.

use std::sync::Arc;

use kgsim_core::cutoff::dyadic;
use kgsim_core::DyadicCutoffs;

use crate::field::{lp_norm, physical_nodes, real_samples, Field};
use crate::grid::Grid;

/// A single shell or an inclusive interval of shells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Shell(i32),
    Interval(i32, i32),
}

impl Band {
    #[inline]
    pub fn weight(self, c: &DyadicCutoffs, r: f64) -> f64 {
        match self {
            Band::Shell(k) => c.psi(k, r),
            Band::Interval(lo, hi) => c.psi_interval(lo, hi, r),
        }
    }
}

/// `R_k S_l f`: multiplication by `psi_k(|xi|) psi_l(|n|)`.
pub fn project_frequency(f: &Field, c: &DyadicCutoffs, k: Band, l: Band) -> Field {
    f.map_real_symbol(|a, b, n, _| {
        let wl = l.weight(c, n);
        if wl == 0.0 {
            0.0
        } else {
            wl * k.weight(c, (a * a + b * b).sqrt())
        }
    })
}

/// Largest plane shell with nonzero weight somewhere on the grid.
pub fn top_plane_shell(grid: &Grid, c: &DyadicCutoffs) -> i32 {
    let s = grid.spec();
    let r = s.plane_kmax() as f64 * s.plane_step() * std::f64::consts::SQRT_2;
    c.top_shell_for(r) + 1
}

/// Largest mode shell with nonzero weight at some kept `|n|`.
pub fn top_mode_shell(grid: &Grid, c: &DyadicCutoffs) -> i32 {
    c.top_shell_for(grid.spec().mode_cutoff as f64) + 1
}

/// Largest spatial shell with `2^j <= L / 2`.
pub fn top_spatial_shell(grid: &Grid) -> i32 {
    let half = grid.spec().box_period / 2.0;
    let mut j = 0;
    while dyadic(j + 1) <= half {
        j += 1;
    }
    j
}

/// Spatial atom weights `phi_j(|x|)` at every physical node.
pub fn atom_weights(grid: &Arc<Grid>, c: &DyadicCutoffs, j: i32) -> Vec<f64> {
    physical_nodes(grid).map(|(x1, x2, _)| c.spatial_atom(j, (x1 * x1 + x2 * x2).sqrt())).collect()
}

/// `phi_j(|x|) f`, or `None` when the shell does not fit in the box.
pub fn project_space(f: &Field, c: &DyadicCutoffs, j: i32) -> Option<Field> {
    let grid = f.grid();
    if j > top_spatial_shell(grid) {
        return None;
    }
    let w = atom_weights(grid, c, j);
    let vals: Vec<_> = f.inverse_transform().iter().zip(&w).map(|(v, w)| v * *w).collect();
    Some(Field::forward_transform(grid, &vals).expect("same grid"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandRatios {
    /// `|| |grad_x| R_k S_l f ||_p / (2^k || R_k S_l f ||_p)`.
    pub x: f64,
    /// `|| d_y R_k S_l f ||_p / (2^l || R_k S_l f ||_p)`.
    pub y: f64,
}

/// Finite-band ratios of a real field; `None` if the projection vanishes.
pub fn verify_finite_band(f: &Field, c: &DyadicCutoffs, k: i32, l: i32, p: f64) -> Option<BandRatios> {
    let g = project_frequency(f, c, Band::Shell(k), Band::Shell(l));
    // an empty shell holds only transform roundoff
    if g.l2_norm() <= 1e-13 * f.l2_norm() {
        return None;
    }
    let grid = f.grid();
    let (d1, d2, dy) = (g.partial([1, 0, 0]), g.partial([0, 1, 0]), g.partial([0, 0, 1]));
    let s = real_samples(&[&g, &d1, &d2, &dy]);
    let base = lp_norm(grid, &s[0], p);
    if base == 0.0 {
        return None;
    }
    let grad: Vec<f64> = s[1].iter().zip(&s[2]).map(|(a, b)| (a * a + b * b).sqrt()).collect();
    Some(BandRatios {
        x: lp_norm(grid, &grad, p) / (dyadic(k) * base),
        y: lp_norm(grid, &s[3], p) / (dyadic(l) * base),
    })
}

/// `|| R_k S_l f ||_{L^r} / (2^{(k + l/2)(1 - 2/r)} || f ||_{L^2})`.
pub fn verify_bernstein(f: &Field, c: &DyadicCutoffs, k: i32, l: i32, r: f64) -> Option<f64> {
    let norm = f.l2_norm();
    if norm == 0.0 {
        return None;
    }
    let g = project_frequency(f, c, Band::Shell(k), Band::Shell(l));
    let vals = g.to_real();
    let expo = (k as f64 + l as f64 / 2.0) * (1.0 - 2.0 / r);
    Some(lp_norm(f.grid(), &vals, r) / (2f64.powf(expo) * norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn single_plane_mode_ratios() {
        // |xi| = 2 with box 2 pi: shell k = 1 carries it with weight 1.
        let g = Grid::new(GridSpec::new(2.0 * std::f64::consts::PI, 16, 2, 1.0).unwrap()).unwrap();
        let c = DyadicCutoffs::default();
        let f = Field::from_fn(&g, |x, _, _| (2.0 * x).cos());
        let r = verify_finite_band(&f, &c, 1, -1, f64::INFINITY).unwrap();
        assert!(r.x <= 1.6 + 1e-12 && r.y == 0.0, "{r:?}");
        assert!(verify_finite_band(&f, &c, 3, -1, 2.0).is_none());
        let b = verify_bernstein(&f, &c, 1, -1, 2.0).unwrap();
        assert!((b - 1.0).abs() < 1e-12);
        assert!(verify_bernstein(&Field::zeros(&g), &c, 1, -1, 2.0).is_none());
    }
}
