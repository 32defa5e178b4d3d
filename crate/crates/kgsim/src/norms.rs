//! Scalar functionals: Sobolev norms, the Z and Z_J norms, the modified
//! energy, the decay functional theta, and the flat `NormReport` record.

use std::collections::BTreeMap;
use std::sync::Arc;

use kgsim_core::cutoff::dyadic;
use kgsim_core::{DyadicCutoffs, NonlinearityCoeffs};
use num_complex::Complex64;
use serde_json::{Map, Value};

use crate::dyadic::{atom_weights, project_frequency, top_mode_shell, top_plane_shell, top_spatial_shell, Band};
use crate::field::{real_samples, real_sup_norms, Field};
use crate::grid::Grid;

/// `(sum Lambda^{2N} |f^|^2)^{1/2}`.
pub fn sobolev_norm(f: &Field, order: u32) -> f64 {
    let lam = f.grid().lambda_table();
    f.coeffs()
        .iter()
        .zip(lam)
        .map(|(c, l)| c.norm_sqr() * l.powi(2 * order as i32))
        .sum::<f64>()
        .sqrt()
}

/// Shell ranges for the Z-type norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub k_max: i32,
    pub l_max: i32,
    pub j_max: i32,
}

impl Truncation {
    /// Largest shells the grid resolves.
    pub fn for_grid(grid: &Grid, c: &DyadicCutoffs) -> Self {
        Self { k_max: top_plane_shell(grid, c), l_max: top_mode_shell(grid, c), j_max: top_spatial_shell(grid) }
    }
}

/// `||R_k S_l f||_2` and `||phi_j R_k S_l f||_2` for `j = 1..=j_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellAtoms {
    pub k: i32,
    pub l: i32,
    pub l2: f64,
    pub atoms: Vec<f64>,
}

impl ShellAtoms {
    fn weighted(&self, weight: impl Fn(i32) -> f64) -> f64 {
        let tail: f64 = self.atoms.iter().enumerate().map(|(i, a)| weight(i as i32 + 1) * a).sum();
        dyadic(9 * (self.k + self.l)) * (self.l2 + tail)
    }
}

/// Every `(k, l)` shell of `f` split over spatial atoms.
pub fn atom_table(f: &Field, c: &DyadicCutoffs, t: Truncation) -> Vec<ShellAtoms> {
    let grid = f.grid();
    let weights: Vec<Vec<f64>> = (1..=t.j_max).map(|j| atom_weights(grid, c, j)).collect();
    let dv = grid.cell_volume();
    let mut out = Vec::new();
    for k in -1..=t.k_max {
        for l in -1..=t.l_max {
            let p = project_frequency(f, c, Band::Shell(k), Band::Shell(l));
            let l2 = p.l2_norm();
            let atoms = if l2 == 0.0 {
                vec![0.0; weights.len()]
            } else {
                let vals = p.inverse_transform();
                weights
                    .iter()
                    .map(|w| (vals.iter().zip(w).map(|(v, w)| v.norm_sqr() * w * w).sum::<f64>() * dv).sqrt())
                    .collect()
            };
            out.push(ShellAtoms { k, l, l2, atoms });
        }
    }
    out
}

/// A Z-type norm with the shell attaining the supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZValue {
    pub value: f64,
    pub k: i32,
    pub l: i32,
}

fn sup_over(table: &[ShellAtoms], weight: impl Fn(i32) -> f64 + Copy) -> ZValue {
    let mut best = ZValue { value: 0.0, k: -1, l: -1 };
    for s in table {
        let v = s.weighted(weight);
        if v > best.value {
            best = ZValue { value: v, k: s.k, l: s.l };
        }
    }
    best
}

pub fn z_from_table(table: &[ShellAtoms]) -> ZValue {
    sup_over(table, dyadic)
}

pub fn z_j_from_table(table: &[ShellAtoms], big_j: u32) -> ZValue {
    let jj = 2 * big_j as i32;
    sup_over(table, move |j| dyadic(j.min(jj - j)))
}

pub fn z_norm(f: &Field, c: &DyadicCutoffs, t: Truncation) -> ZValue {
    z_from_table(&atom_table(f, c, t))
}

pub fn z_j_norm(f: &Field, c: &DyadicCutoffs, big_j: u32, t: Truncation) -> ZValue {
    z_j_from_table(&atom_table(f, c, t), big_j)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnergyError {
    #[error("quasilinear correction makes the energy indefinite: pivot {pivot:e} at node {node}")]
    Indefinite { pivot: f64, node: usize },
    #[error("fields live on different grids")]
    GridMismatch,
}

/// Multi-indices `rho = (rho_1, rho_2, rho_3)` with `|rho| <= order`.
pub fn multi_indices(order: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in 0..=order {
        for b in 0..=order - a {
            for c in 0..=order - a - b {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// `w_N = sum_{|rho| <= N} xi_1^{2 rho_1} xi_2^{2 rho_2} n^{2 rho_3}`.
fn energy_weight(order: u32, a: f64, b: f64, n: f64) -> f64 {
    multi_indices(order)
        .iter()
        .map(|r| a.powi(2 * r[0] as i32) * b.powi(2 * r[1] as i32) * n.powi(2 * r[2] as i32))
        .sum()
}

/// The five first-order fields `(u, u_t, d_1 u, d_2 u, d_3 u)` in physical space.
pub fn first_order_samples(u: &Field, udot: &Field) -> Vec<Vec<f64>> {
    let d = [u.partial([1, 0, 0]), u.partial([0, 1, 0]), u.partial([0, 0, 1])];
    real_samples(&[u, udot, &d[0], &d[1], &d[2]])
}

/// Sylvester check that `I + G` (spatial block) is positive definite.
/// Returns the smallest leading-minor ratio.
fn spatial_pivot(g: &[[f64; 3]; 3]) -> f64 {
    let m = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 } + g[i][j];
    let d1 = m(0, 0);
    let d2 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    let d3 = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    if d1 <= 0.0 || d2 <= 0.0 {
        return d1.min(d2);
    }
    (d1).min(d2 / d1).min(d3 / d2)
}

/// Modified energy of order `N`:
///
/// ```text
/// sum_{|rho| <= N} int (d_t u_rho)^2 + sum_j (d_j u_rho)^2 + u_rho^2
///                   + sum_{j,k=1}^{3} G^{jk}(u, du) d_j u_rho d_k u_rho.
/// ```
pub fn modified_energy(u: &Field, udot: &Field, order: u32, coeffs: &NonlinearityCoeffs) -> Result<f64, EnergyError> {
    if !Arc::ptr_eq(u.grid(), udot.grid()) {
        return Err(EnergyError::GridMismatch);
    }
    let grid = u.grid();
    let lam = grid.lambda_table();
    let mut quad = 0.0;
    for (i, (cu, cv)) in u.coeffs().iter().zip(udot.coeffs()).enumerate() {
        if *cu == Complex64::default() && *cv == Complex64::default() {
            continue;
        }
        let (a, b, n) = grid.frequency(i);
        quad += energy_weight(order, a, b, n) * (cv.norm_sqr() + lam[i] * lam[i] * cu.norm_sqr());
    }
    let spatial_active = (1..4).any(|j| (1..4).any(|k| coeffs.g_pair_active(j, k)));
    if !spatial_active {
        return Ok(quad);
    }
    let w = first_order_samples(u, udot);
    let npts = grid.len();
    let mut gm = vec![[[0.0; 3]; 3]; npts];
    for (p, g) in gm.iter_mut().enumerate() {
        let w5 = [w[0][p], w[1][p], w[2][p], w[3][p], w[4][p]];
        for j in 0..3 {
            for k in 0..3 {
                g[j][k] = coeffs.g_matrix_entry(j + 1, k + 1, &w5);
            }
        }
        let pivot = spatial_pivot(g);
        if !(pivot > 0.0) {
            return Err(EnergyError::Indefinite { pivot, node: p });
        }
    }
    let dv = grid.cell_volume();
    let mut corr = 0.0;
    for rho in multi_indices(order) {
        let ur = u.partial(rho);
        let d = [ur.partial([1, 0, 0]), ur.partial([0, 1, 0]), ur.partial([0, 0, 1])];
        let s = real_samples(&[&d[0], &d[1], &d[2]]);
        for (p, g) in gm.iter().enumerate() {
            let v = [s[0][p], s[1][p], s[2][p]];
            for j in 0..3 {
                for k in 0..3 {
                    corr += g[j][k] * v[j] * v[k];
                }
            }
        }
    }
    Ok(quad + corr * dv)
}

/// The 14 fields whose sup norms make up the theta integrand:
/// `d^rho u` for `|rho| <= 2` and `d^rho u_t` for `|rho| <= 1`.
pub fn theta_fields(u: &Field, udot: &Field) -> Vec<Field> {
    let mut out: Vec<Field> = multi_indices(2).into_iter().map(|r| u.partial(r)).collect();
    out.extend(multi_indices(1).into_iter().map(|r| udot.partial(r)));
    out
}

/// `sum_{|rho| <= 2} ||d^rho u||_inf + sum_{|rho| <= 1} ||d^rho u_t||_inf`.
pub fn theta_integrand(u: &Field, udot: &Field, oversample: usize) -> f64 {
    let fields = theta_fields(u, udot);
    let refs: Vec<&Field> = fields.iter().collect();
    real_sup_norms(&refs, oversample).iter().sum()
}

/// Running `sup_tau (1 + tau) S(tau)` over an append-only history.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ThetaTracker {
    value: f64,
    last_t: Option<f64>,
    samples: Vec<(f64, f64)>,
}

impl ThetaTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `S(t)`; times must increase.
    pub fn push(&mut self, t: f64, integrand: f64) -> f64 {
        if let Some(prev) = self.last_t {
            assert!(t > prev, "theta history must advance in time ({t} after {prev})");
        }
        self.last_t = Some(t);
        self.samples.push((t, integrand));
        self.value = self.value.max((1.0 + t) * integrand);
        self.value
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// `(t, S(t))` pairs pushed so far.
    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// `theta(t_end) / theta(t_end / 2)`; near 1 once the integrand decays
    /// like `(1 + t)^{-1}`.
    pub fn plateau_ratio(&self) -> Option<f64> {
        let t_end = self.last_t?;
        let half = self
            .samples
            .iter()
            .filter(|(t, _)| *t <= t_end / 2.0)
            .map(|(t, s)| (1.0 + t) * s)
            .fold(0.0, f64::max);
        (half > 0.0).then(|| self.value / half)
    }
}

/// One row of diagnostics. Serialized flat, keys in this order:
/// `t, h{N}..., z, z_k, z_l, zJ{J}..., energy, theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub t: f64,
    pub sobolev: BTreeMap<u32, f64>,
    pub z: ZValue,
    pub z_j: BTreeMap<u32, f64>,
    pub energy: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReportError {
    #[error("missing key {0}")]
    Missing(String),
    #[error("key {0} is not a finite number")]
    NotNumber(String),
    #[error("unexpected key {0}")]
    Unexpected(String),
}

impl NormReport {
    pub fn keys(&self) -> Vec<String> {
        let mut k = vec!["t".to_string()];
        k.extend(self.sobolev.keys().map(|n| format!("h{n}")));
        k.extend(["z", "z_k", "z_l"].map(String::from));
        k.extend(self.z_j.keys().map(|j| format!("zJ{j}")));
        k.extend(["energy", "theta"].map(String::from));
        k
    }

    pub fn values(&self) -> Vec<f64> {
        let mut v = vec![self.t];
        v.extend(self.sobolev.values());
        v.extend([self.z.value, self.z.k as f64, self.z.l as f64]);
        v.extend(self.z_j.values());
        v.extend([self.energy, self.theta]);
        v
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (k, v) in self.keys().into_iter().zip(self.values()) {
            let num = if k == "z_k" || k == "z_l" { Value::from(v as i64) } else { Value::from(v) };
            m.insert(k, num);
        }
        Value::Object(m)
    }

    pub fn from_json(v: &Value) -> Result<Self, ReportError> {
        let obj = v.as_object().ok_or_else(|| ReportError::NotNumber("<root>".into()))?;
        let num = |k: &str| -> Result<f64, ReportError> {
            obj.get(k)
                .ok_or_else(|| ReportError::Missing(k.into()))?
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| ReportError::NotNumber(k.into()))
        };
        let mut sobolev = BTreeMap::new();
        let mut z_j = BTreeMap::new();
        for (k, _) in obj {
            if let Some(n) = k.strip_prefix('h').and_then(|s| s.parse::<u32>().ok()) {
                sobolev.insert(n, num(k)?);
            } else if let Some(j) = k.strip_prefix("zJ").and_then(|s| s.parse::<u32>().ok()) {
                z_j.insert(j, num(k)?);
            } else if !["t", "z", "z_k", "z_l", "energy", "theta"].contains(&k.as_str()) {
                return Err(ReportError::Unexpected(k.clone()));
            }
        }
        Ok(Self {
            t: num("t")?,
            sobolev,
            z: ZValue { value: num("z")?, k: num("z_k")? as i32, l: num("z_l")? as i32 },
            z_j,
            energy: num("energy")?,
            theta: num("theta")?,
        })
    }

    pub fn csv_header(&self) -> Vec<String> {
        self.keys()
    }

    pub fn csv_row(&self) -> Vec<String> {
        self.keys()
            .iter()
            .zip(self.values())
            .map(|(k, v)| if k == "z_k" || k == "z_l" { format!("{}", v as i64) } else { format!("{v:e}") })
            .collect()
    }

    pub fn all_finite_nonnegative(&self) -> bool {
        self.values()
            .iter()
            .zip(self.keys())
            .all(|(v, k)| v.is_finite() && (*v >= 0.0 || k == "z_k" || k == "z_l"))
    }
}

/// Everything that goes into one [`NormReport`].
#[derive(Debug, Clone)]
pub struct ReportSpec {
    pub sobolev_orders: Vec<u32>,
    pub z_j_orders: Vec<u32>,
    pub energy_order: u32,
    pub oversample: usize,
}

impl Default for ReportSpec {
    fn default() -> Self {
        Self { sobolev_orders: vec![0, 1, 2], z_j_orders: vec![1, 2, 4], energy_order: 1, oversample: 2 }
    }
}

/// Norms of the state `(u, u_t)` at time `t`. Sobolev norms are of
/// `U = u_t - i Lambda u`, Z norms of the profile `V = e^{it Lambda} U`, and
/// theta is the single-snapshot value `(1 + t) S(t)` unless a tracker value
/// is supplied.
pub fn norm_report(
    t: f64,
    u: &Field,
    udot: &Field,
    coeffs: &NonlinearityCoeffs,
    cutoffs: &DyadicCutoffs,
    spec: &ReportSpec,
    theta: Option<f64>,
) -> Result<NormReport, EnergyError> {
    let big_u = udot.axpy(Complex64::new(0.0, -1.0), &u.apply_lambda(1.0));
    let v = big_u.propagate(t, kgsim_core::Sign::Plus);
    let trunc = Truncation::for_grid(u.grid(), cutoffs);
    let table = atom_table(&v, cutoffs, trunc);
    let energy = modified_energy(u, udot, spec.energy_order, coeffs)?;
    let theta = match theta {
        Some(th) => th,
        None => (1.0 + t) * theta_integrand(u, udot, spec.oversample),
    };
    Ok(NormReport {
        t,
        sobolev: spec.sobolev_orders.iter().map(|&n| (n, sobolev_norm(&big_u, n))).collect(),
        z: z_from_table(&table),
        z_j: spec.z_j_orders.iter().map(|&j| (j, z_j_from_table(&table, j).value)).collect(),
        energy,
        theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(0).len(), 1);
        assert_eq!(multi_indices(1).len(), 4);
        assert_eq!(multi_indices(2).len(), 10);
    }

    #[test]
    fn energy_weight_order_one_is_lambda_squared() {
        // w_1 = 1 + xi_1^2 + xi_2^2 + n^2 = Lambda^2
        assert_eq!(energy_weight(1, 1.0, 2.0, 3.0), 15.0);
    }

    #[test]
    fn theta_tracker_is_monotone() {
        let mut th = ThetaTracker::new();
        assert_eq!(th.push(0.0, 3.0), 3.0);
        let a = th.push(1.0, 1.0);
        let b = th.push(2.0, 0.1);
        assert!(b >= a && a >= 3.0);
    }

    #[test]
    fn report_round_trip() {
        let r = NormReport {
            t: 1.5,
            sobolev: [(0, 1.0), (2, 3.0)].into_iter().collect(),
            z: ZValue { value: 0.25, k: -1, l: 2 },
            z_j: [(1, 0.1)].into_iter().collect(),
            energy: 2.0,
            theta: 4.0,
        };
        let j = r.to_json();
        let keys: Vec<_> = j.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["t", "h0", "h2", "z", "z_k", "z_l", "zJ1", "energy", "theta"]);
        assert_eq!(NormReport::from_json(&j).unwrap(), r);
    }

    #[test]
    fn pivot_detects_indefinite() {
        assert!(spatial_pivot(&[[0.0; 3]; 3]) == 1.0);
        let mut g = [[0.0; 3]; 3];
        g[1][1] = -1.5;
        assert!(spatial_pivot(&g) < 0.0);
    }
}
