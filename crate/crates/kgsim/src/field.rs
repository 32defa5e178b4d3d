//! Spectral fields on a [`Grid`] and the diagonal multipliers acting on them.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use kgsim_core::Sign;
use num_complex::Complex64;

use crate::grid::{Grid, GridError};

#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    coeffs: Vec<Complex64>,
}

/// Derivative-type multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivative {
    /// `d_{x_j} / Lambda`, `j` in 1..=2.
    PlaneOverLambda(u8),
    /// `n / Lambda`.
    ModeOverLambda,
    /// `d_{x_j}`, `j` in 1..=2.
    Plane(u8),
    /// `d_y`.
    Y,
}

impl Field {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self { grid: grid.clone(), coeffs: vec![Complex64::default(); grid.len()] }
    }

    pub fn from_coeffs(grid: &Arc<Grid>, coeffs: Vec<Complex64>) -> Result<Self, GridError> {
        if coeffs.len() != grid.len() {
            return Err(GridError::Shape { expected: grid.len(), found: coeffs.len() });
        }
        Ok(Self { grid: grid.clone(), coeffs })
    }

    /// Spectral coefficients of physical samples (full band, no truncation).
    pub fn forward_transform(grid: &Arc<Grid>, samples: &[Complex64]) -> Result<Self, GridError> {
        if samples.len() != grid.len() {
            return Err(GridError::Shape { expected: grid.len(), found: samples.len() });
        }
        let mut c = samples.to_vec();
        grid.fft3(&mut c, false);
        let s = grid.volume().sqrt() / grid.len() as f64;
        c.iter_mut().for_each(|v| *v *= s);
        Ok(Self { grid: grid.clone(), coeffs: c })
    }

    pub fn from_real(grid: &Arc<Grid>, samples: &[f64]) -> Result<Self, GridError> {
        let c: Vec<Complex64> = samples.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        Self::forward_transform(grid, &c)
    }

    /// Samples `f(x, y)` at the physical nodes.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let samples = physical_nodes(grid).map(|(x1, x2, y)| f(x1, x2, y)).collect::<Vec<_>>();
        Self::from_real(grid, &samples).expect("shape matches by construction")
    }

    pub fn inverse_transform(&self) -> Vec<Complex64> {
        let mut c = self.coeffs.clone();
        self.grid.fft3(&mut c, true);
        let s = 1.0 / self.grid.volume().sqrt();
        c.iter_mut().for_each(|v| *v *= s);
        c
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.inverse_transform().into_iter().map(|v| v.re).collect()
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Coefficient-wise multiplication by `m(xi_1, xi_2, n, Lambda)`.
    pub fn map_symbol(&self, m: impl Fn(f64, f64, f64, f64) -> Complex64) -> Self {
        let lam = self.grid.lambda_table();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if *c == Complex64::default() {
                    return *c;
                }
                let (a, b, n) = self.grid.frequency(i);
                c * m(a, b, n, lam[i])
            })
            .collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    /// Real multiplier version of [`Self::map_symbol`].
    pub fn map_real_symbol(&self, m: impl Fn(f64, f64, f64, f64) -> f64) -> Self {
        self.map_symbol(|a, b, n, l| Complex64::new(m(a, b, n, l), 0.0))
    }

    /// `Lambda^power`.
    pub fn apply_lambda(&self, power: f64) -> Self {
        if power == 1.0 {
            let lam = self.grid.lambda_table();
            let coeffs = self.coeffs.iter().zip(lam).map(|(c, l)| c * l).collect();
            return Self { grid: self.grid.clone(), coeffs };
        }
        if power == -1.0 {
            let lam = self.grid.lambda_table();
            let coeffs = self.coeffs.iter().zip(lam).map(|(c, l)| c / l).collect();
            return Self { grid: self.grid.clone(), coeffs };
        }
        self.map_real_symbol(|_, _, _, l| l.powf(power))
    }

    /// `e^{i sign t Lambda}`.
    pub fn propagate(&self, t: f64, sign: Sign) -> Self {
        let s = sign.value() * t;
        let lam = self.grid.lambda_table();
        let coeffs = self
            .coeffs
            .iter()
            .zip(lam)
            .map(|(c, l)| c * Complex64::from_polar(1.0, s * l))
            .collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    pub fn weighted_derivative(&self, which: Derivative) -> Self {
        let i = Complex64::new(0.0, 1.0);
        match which {
            Derivative::PlaneOverLambda(j) => self.map_symbol(|a, b, _, l| i * (if j == 1 { a } else { b }) / l),
            Derivative::ModeOverLambda => self.map_real_symbol(|_, _, n, l| n / l),
            Derivative::Plane(j) => self.map_symbol(|a, b, _, _| i * (if j == 1 { a } else { b })),
            Derivative::Y => self.map_symbol(|_, _, n, _| i * n),
        }
    }

    /// `d_1^{a} d_2^{b} d_y^{c}`.
    pub fn partial(&self, order: [u32; 3]) -> Self {
        if order == [0, 0, 0] {
            return self.clone();
        }
        let i = Complex64::new(0.0, 1.0);
        self.map_symbol(|a, b, n, _| (i * a).powu(order[0]) * (i * b).powu(order[1]) * (i * n).powu(order[2]))
    }

    /// Zeroes every coefficient outside the grid's kept band.
    pub fn truncate(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.grid.kept())
            .map(|(c, k)| if *k { *c } else { Complex64::default() })
            .collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    /// Largest coefficient magnitude outside the kept band.
    pub fn out_of_band(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(self.grid.kept())
            .filter(|(_, k)| !**k)
            .map(|(c, _)| c.norm())
            .fold(0.0, f64::max)
    }

    /// Coefficients of the complex conjugate physical field:
    /// `conj(f)^(xi, n) = conj(f^(-xi, -n))`.
    pub fn conj_reflect(&self) -> Self {
        let g = &self.grid;
        let (n, ny) = (g.plane_points(), g.y_points());
        let mut out = vec![Complex64::default(); g.len()];
        for i1 in 0..n {
            let r1 = (n - i1) % n;
            for i2 in 0..n {
                let r2 = (n - i2) % n;
                for iy in 0..ny {
                    let ry = (ny - iy) % ny;
                    out[g.index(i1, i2, iy)] = self.coeffs[g.index(r1, r2, ry)].conj();
                }
            }
        }
        Self { grid: g.clone(), coeffs: out }
    }

    /// Real part `(f + conj f) / 2` in coefficient form.
    pub fn real_part(&self) -> Self {
        (self + &self.conj_reflect()) * 0.5
    }

    /// Distance from Hermitian symmetry, relative to the L2 norm.
    pub fn imaginary_defect(&self) -> f64 {
        let d = (self - &self.conj_reflect()).l2_norm();
        let n = self.l2_norm();
        if n == 0.0 {
            0.0
        } else {
            0.5 * d / n
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<f, g> = int f conj(g)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { grid: self.grid.clone(), coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: Complex64, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + s * b).collect();
        Self { grid: self.grid.clone(), coeffs }
    }

    /// Supremum of `|f|` over the physical nodes refined `oversample` times
    /// per direction (by half-cell phase shifts, so no larger FFT is needed).
    pub fn sup_norm(&self, oversample: usize) -> f64 {
        let mut buf = vec![Complex64::default(); self.coeffs.len()];
        let mut best = 0.0f64;
        for shift in shifts(oversample) {
            shifted_into(&mut buf, self, None, shift);
            self.grid.fft3(&mut buf, true);
            best = buf.iter().map(|v| v.norm_sqr()).fold(best, f64::max);
        }
        best.sqrt() / self.grid.volume().sqrt()
    }
}

/// Physical node coordinates `(x1, x2, y)` in storage order.
pub fn physical_nodes(grid: &Arc<Grid>) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
    (0..grid.len()).map(move |idx| {
        let (i1, i2, iy) = grid.unindex(idx);
        (grid.x_coord(i1), grid.x_coord(i2), grid.y_coord(iy))
    })
}

fn shifts(oversample: usize) -> Vec<[f64; 3]> {
    let q = oversample.max(1);
    let mut out = Vec::with_capacity(q * q * q);
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                out.push([a as f64 / q as f64, b as f64 / q as f64, c as f64 / q as f64]);
            }
        }
    }
    out
}

/// Coefficients of `(a + i b)(x + s dx)` written into `buf`. The shift
/// phase factorizes per axis, so only three short tables are needed.
fn shifted_into(buf: &mut [Complex64], a: &Field, b: Option<&Field>, s: [f64; 3]) {
    let g = a.grid();
    let (n, ny) = (g.plane_points(), g.y_points());
    let table = |len: usize, step: f64, freq: &dyn Fn(usize) -> f64| -> Vec<Complex64> {
        (0..len).map(|i| Complex64::from_polar(1.0, freq(i) * step)).collect()
    };
    let p1 = table(n, s[0] * g.dx(), &|i| g.frequency(g.index(i, 0, 0)).0);
    let p2 = table(n, s[1] * g.dx(), &|i| g.frequency(g.index(0, i, 0)).1);
    let py = table(ny, s[2] * g.dy(), &|i| g.frequency(g.index(0, 0, i)).2);
    let i = Complex64::new(0.0, 1.0);
    let mut idx = 0;
    for e1 in &p1 {
        for e2 in &p2 {
            let e12 = e1 * e2;
            for ey in &py {
                let c = match b {
                    Some(b) => a.coeffs[idx] + i * b.coeffs[idx],
                    None => a.coeffs[idx],
                };
                buf[idx] = c * (e12 * ey);
                idx += 1;
            }
        }
    }
}

/// Sup norms of several real fields, packing two per inverse transform.
pub fn real_sup_norms(fields: &[&Field], oversample: usize) -> Vec<f64> {
    let mut out = vec![0.0f64; fields.len()];
    let Some(first) = fields.first() else { return out };
    let mut buf = vec![Complex64::default(); first.coeffs.len()];
    for (pair, chunk) in fields.chunks(2).enumerate() {
        for shift in shifts(oversample) {
            shifted_into(&mut buf, chunk[0], chunk.get(1).copied(), shift);
            first.grid.fft3(&mut buf, true);
            let (mut ma, mut mb) = (0.0f64, 0.0f64);
            for v in &buf {
                ma = ma.max(v.re.abs());
                mb = mb.max(v.im.abs());
            }
            out[2 * pair] = out[2 * pair].max(ma);
            if chunk.len() == 2 {
                out[2 * pair + 1] = out[2 * pair + 1].max(mb);
            }
        }
    }
    let s = 1.0 / first.grid.volume().sqrt();
    out.iter_mut().for_each(|v| *v *= s);
    out
}

/// Physical samples of several real fields, two per inverse transform.
pub fn real_samples(fields: &[&Field]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(fields.len());
    let i = Complex64::new(0.0, 1.0);
    for chunk in fields.chunks(2) {
        match chunk {
            [a, b] => {
                let vals = a.axpy(i, b).inverse_transform();
                out.push(vals.iter().map(|v| v.re).collect());
                out.push(vals.iter().map(|v| v.im).collect());
            }
            [a] => out.push(a.to_real()),
            _ => unreachable!(),
        }
    }
    out
}

/// Transform of a real physical field.
pub fn real_forward(grid: &Arc<Grid>, samples: &[f64]) -> Field {
    Field::from_real(grid, samples).expect("shape matches grid")
}

/// `L^p` norm of physical samples (`p = inf` for the max).
pub fn lp_norm(grid: &Grid, samples: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    }
    let dv = grid.cell_volume();
    (samples.iter().map(|v| v.abs().powf(p)).sum::<f64>() * dv).powf(1.0 / p)
}

/// Gaussian bump `exp(-|x|^2 / (2 sigma^2)) (1 + a cos y)`.
pub fn gaussian_bump(grid: &Arc<Grid>, sigma: f64, y_modulation: f64) -> Field {
    Field::from_fn(grid, |x1, x2, y| (-(x1 * x1 + x2 * x2) / (2.0 * sigma * sigma)).exp() * (1.0 + y_modulation * y.cos()))
        .truncate()
        .real_part()
}

/// Largest plane radius at which the periodic box still looks like `R^2`.
pub fn wrap_horizon(grid: &Grid) -> f64 {
    grid.spec().box_period / 2.0
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.axpy(Complex64::new(1.0, 0.0), rhs)
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.axpy(Complex64::new(-1.0, 0.0), rhs)
    }
}

impl Mul<f64> for Field {
    type Output = Field;
    fn mul(mut self, rhs: f64) -> Field {
        self.coeffs.iter_mut().for_each(|c| *c *= rhs);
        self
    }
}
