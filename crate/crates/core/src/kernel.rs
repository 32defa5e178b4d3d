//! Radial oscillatory kernels of the half Klein-Gordon group
//!
//! ```text
//! K(x) = int_{R^2} e^{i x.xi} e^{+- i t Lambda_n(xi)} chi(|xi|) d xi
//!      = 2 pi int_0^inf J_0(r |x|) e^{+- i t Lambda_n(r)} chi(r) r dr,
//! ```
//!
//! with `chi` either the low-frequency cutoff `psi_{-1}` or a dyadic shell
//! `phi_k`. Values are computed by adaptive Gauss-Kronrod panels whose
//! initial width resolves both the phase `t Lambda` and the Bessel
//! oscillation, then certified by a rerun at half the initial width.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::bessel::BesselJ0;
use crate::cutoff::{dyadic, DyadicCutoffs};
use crate::phase::Sign;
use crate::quadrature::{integrate, QuadratureError};
use crate::symbol::{group_velocity, lambda_radial};

/// Panels allowed per radial integral.
pub const PANEL_BUDGET: usize = 400_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shell {
    /// `psi_{-1}`, printed as `k = -1`.
    Low,
    /// `phi_k`, `k >= 0`.
    Dyadic(u32),
}

impl Shell {
    pub fn index(self) -> i32 {
        match self {
            Shell::Low => -1,
            Shell::Dyadic(k) => k as i32,
        }
    }

    pub fn from_index(k: i32) -> Self {
        if k < 0 {
            Shell::Low
        } else {
            Shell::Dyadic(k as u32)
        }
    }

    fn cutoff(self, c: &DyadicCutoffs, r: f64) -> f64 {
        match self {
            Shell::Low => c.psi(-1, r),
            Shell::Dyadic(k) => c.phi_k(k as i32, r),
        }
    }

    fn support(self, c: &DyadicCutoffs) -> (f64, f64) {
        c.shell_support(self.index())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelQuery {
    pub shell: Shell,
    pub n: i64,
    pub t: f64,
    pub sign: Sign,
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("kernel query invalid: {0}")]
    InvalidQuery(&'static str),
    #[error("tolerance {0:e} outside (0, 1e-4]")]
    InvalidTolerance(f64),
    #[error("radial quadrature failed at |x| = {radius}: {source}")]
    Quadrature { radius: f64, source: QuadratureError },
    #[error("half-width rerun disagrees at |x| = {radius}: |delta| = {delta:e} > {tol:e}")]
    NotCertified { radius: f64, delta: f64, tol: f64 },
}

/// Evaluator for one `(shell, n, t, sign)` family over arbitrary radii.
#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    cutoffs: DyadicCutoffs,
    shell: Shell,
    n: f64,
    t: f64,
    sign: f64,
    lo: f64,
    hi: f64,
    bessel: BesselJ0,
    /// Absolute tolerance actually enforced.
    abs_tol: f64,
}

impl KernelEvaluator {
    /// `tol` is relative to the trivial bound `int |chi| d xi`, which
    /// dominates `|K|` for every `x` and `t`.
    pub fn new(cutoffs: DyadicCutoffs, shell: Shell, n: i64, t: f64, sign: Sign, tol: f64, max_radius: f64) -> Result<Self, KernelError> {
        if !(tol > 0.0 && tol <= 1e-4) {
            return Err(KernelError::InvalidTolerance(tol));
        }
        if !t.is_finite() || t < 0.0 {
            return Err(KernelError::InvalidQuery("t must be finite and >= 0"));
        }
        let (lo, hi) = shell.support(&cutoffs);
        let mut ev = Self {
            cutoffs,
            shell,
            n: n as f64,
            t,
            sign: sign.value(),
            lo,
            hi,
            bessel: BesselJ0::new(hi * max_radius.max(1.0)),
            abs_tol: 0.0,
        };
        ev.abs_tol = tol * ev.trivial_bound()?;
        Ok(ev)
    }

    /// `2 pi int chi(r) r dr`.
    pub fn trivial_bound(&self) -> Result<f64, KernelError> {
        let c = self.cutoffs;
        let shell = self.shell;
        let q = integrate(
            |r| Complex64::new(2.0 * PI * r * shell.cutoff(&c, r), 0.0),
            self.lo,
            self.hi,
            (self.hi - self.lo) / 16.0,
            1e-13 * dyadic(2 * shell.index().max(0)),
            10_000,
        )
        .map_err(|source| KernelError::Quadrature { radius: 0.0, source })?;
        Ok(q.value.re)
    }

    fn initial_width(&self, radius: f64, refine: f64) -> f64 {
        let span = self.hi - self.lo;
        let mut w = span / 8.0;
        let phase_rate = self.t * group_velocity(self.hi, self.n);
        if phase_rate > 0.0 {
            w = w.min(PI / (4.0 * phase_rate));
        }
        if radius > 0.0 {
            w = w.min(PI / (4.0 * radius));
        }
        w / refine
    }

    fn integrate_at(&self, radius: f64, refine: f64) -> Result<Complex64, KernelError> {
        let c = self.cutoffs;
        let shell = self.shell;
        let (n, t, s) = (self.n, self.t, self.sign);
        let bessel = &self.bessel;
        let f = |r: f64| {
            let amp = 2.0 * PI * r * shell.cutoff(&c, r) * bessel.eval(r * radius);
            if amp == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let ph = s * t * lambda_radial(r, n);
            Complex64::new(amp * libm::cos(ph), amp * libm::sin(ph))
        };
        integrate(f, self.lo, self.hi, self.initial_width(radius, refine), self.abs_tol, PANEL_BUDGET)
            .map(|q| q.value)
            .map_err(|source| KernelError::Quadrature { radius, source })
    }

    /// Kernel value at `|x| = radius`, adaptive but not cross-certified.
    pub fn value(&self, radius: f64) -> Result<Complex64, KernelError> {
        self.integrate_at(radius, 1.0)
    }

    /// Kernel value certified by a rerun at half the initial panel width.
    pub fn certified_value(&self, radius: f64) -> Result<Complex64, KernelError> {
        let coarse = self.integrate_at(radius, 1.0)?;
        let fine = self.integrate_at(radius, 2.0)?;
        let delta = (coarse - fine).norm();
        if delta > self.abs_tol {
            return Err(KernelError::NotCertified { radius, delta, tol: self.abs_tol });
        }
        Ok(fine)
    }

    /// Radius beyond which no stationary point exists, padded by a few
    /// wavelengths of the lowest frequency in the shell.
    pub fn search_radius(&self) -> f64 {
        self.t * group_velocity(self.hi, self.n) + 6.0 / self.hi.max(0.5)
    }

    /// `(radius, |K|)` at the maximum over a uniform scan of
    /// `[0, search_radius]` followed by golden-section refinement.
    pub fn sup_abs(&self, samples: usize) -> Result<(f64, f64), KernelError> {
        let rmax = self.search_radius();
        let samples = samples.max(8);
        let h = rmax / (samples - 1) as f64;
        let mut best = (0.0, -1.0);
        let mut best_i = 0;
        for i in 0..samples {
            let r = h * i as f64;
            let v = self.value(r)?.norm();
            if v > best.1 {
                best = (r, v);
                best_i = i;
            }
        }
        let mut a = if best_i == 0 { 0.0 } else { h * (best_i - 1) as f64 };
        let mut b = h * (best_i + 1).min(samples - 1) as f64;
        let gr = 0.5 * (libm::sqrt(5.0) - 1.0);
        let mut c = b - gr * (b - a);
        let mut d = a + gr * (b - a);
        let mut fc = self.value(c)?.norm();
        let mut fd = self.value(d)?.norm();
        for _ in 0..16 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = self.value(c)?.norm();
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = self.value(d)?.norm();
            }
        }
        for (r, v) in [(c, fc), (d, fd)] {
            if v > best.1 {
                best = (r, v);
            }
        }
        // certify the reported maximum
        let certified = self.certified_value(best.0)?.norm();
        Ok((best.0, certified))
    }
}

/// Values of the kernel at `q.radii`, each certified by the half-width rerun.
pub fn eval_kernel(q: &KernelQuery, cutoffs: DyadicCutoffs, tol: f64) -> Result<Vec<Complex64>, KernelError> {
    if q.radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(KernelError::InvalidQuery("radii must be finite and >= 0"));
    }
    let max_r = q.radii.iter().cloned().fold(0.0, f64::max);
    let ev = KernelEvaluator::new(cutoffs, q.shell, q.n, q.t, q.sign, tol, max_r)?;
    q.radii.iter().map(|&r| ev.certified_value(r)).collect()
}

/// Which dispersive bound a report is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `(1 + |n|) (1 + t)^{-1}` for the low-frequency cutoff.
    LowFrequency,
    /// `(2^{2k} + n^2) / sqrt(1 + n^2) * t^{-1}` for dyadic shells.
    DyadicShell,
    /// Deliberately wrong bound (the `t^{-1}` factor dropped), for negative controls.
    Corrupted,
}

impl BoundKind {
    pub fn value(self, shell: Shell, n: i64, t: f64) -> f64 {
        let nf = n as f64;
        match self {
            BoundKind::LowFrequency => (1.0 + libm::fabs(nf)) / (1.0 + t),
            BoundKind::DyadicShell => {
                let k = shell.index().max(0);
                (dyadic(2 * k) + nf * nf) / libm::sqrt(1.0 + nf * nf) / t
            }
            BoundKind::Corrupted => match shell {
                Shell::Low => 1.0 + libm::fabs(nf),
                Shell::Dyadic(k) => (dyadic(2 * k as i32) + nf * nf) / libm::sqrt(1.0 + nf * nf),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub shell: Shell,
    pub n: i64,
    pub t: f64,
    pub sign: Sign,
    /// Radius attaining `sup_abs`.
    pub radius: f64,
    pub sup_abs: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Default radius samples for sup searches.
pub const SUP_SAMPLES: usize = 40;

/// `sup_x |K|` against `bound` for one query.
pub fn bound_report(cutoffs: DyadicCutoffs, shell: Shell, n: i64, t: f64, sign: Sign, tol: f64, bound: BoundKind) -> Result<BoundReport, KernelError> {
    let probe = KernelEvaluator::new(cutoffs, shell, n, t, sign, tol, 1.0)?;
    let rmax = probe.search_radius();
    let ev = KernelEvaluator::new(cutoffs, shell, n, t, sign, tol, rmax)?;
    let (radius, sup_abs) = ev.sup_abs(SUP_SAMPLES)?;
    let b = bound.value(shell, n, t);
    Ok(BoundReport { shell, n, t, sign, radius, sup_abs, bound: b, ratio: sup_abs / b })
}

/// Low-frequency sweep over `n` and `t`.
pub fn certify_low_frequency(cutoffs: DyadicCutoffs, ns: &[i64], ts: &[f64], tol: f64, bound: BoundKind) -> Result<Vec<BoundReport>, KernelError> {
    let mut out = Vec::with_capacity(ns.len() * ts.len());
    for &n in ns {
        for &t in ts {
            out.push(bound_report(cutoffs, Shell::Low, n, t, Sign::Plus, tol, bound)?);
        }
    }
    Ok(out)
}

/// Dyadic-shell sweep over `k`, `n` and `t > 0`.
pub fn certify_dyadic_shells(cutoffs: DyadicCutoffs, ks: &[u32], ns: &[i64], ts: &[f64], tol: f64, bound: BoundKind) -> Result<Vec<BoundReport>, KernelError> {
    if ts.iter().any(|t| *t <= 0.0) {
        return Err(KernelError::InvalidQuery("dyadic-shell bound needs t > 0"));
    }
    let mut out = Vec::with_capacity(ks.len() * ns.len() * ts.len());
    for &k in ks {
        for &n in ns {
            for &t in ts {
                out.push(bound_report(cutoffs, Shell::Dyadic(k), n, t, Sign::Plus, tol, bound)?);
            }
        }
    }
    Ok(out)
}

/// One doubling check: `sup(2t) / sup(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Halving {
    pub shell: Shell,
    pub n: i64,
    pub t: f64,
    pub factor: f64,
}

/// Scalar summary of a sweep, used for pass/fail decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub all_finite: bool,
    pub max_ratio: f64,
    /// `max(upper / lower, lower / upper)` of the max ratios over
    /// `t in [1, 10]` and `t in [10, 100]`, taken over the whole sweep.
    pub decade_stability: f64,
    /// Same factor for the worst individual `(shell, n)` series.
    pub worst_series_stability: f64,
    pub halvings: Vec<Halving>,
}

impl SweepSummary {
    pub fn from_reports(reports: &[BoundReport]) -> Self {
        let all_finite = reports.iter().all(|r| r.ratio.is_finite() && r.sup_abs.is_finite());
        let max_ratio = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
        let decade = |rs: &mut dyn Iterator<Item = &BoundReport>| -> f64 {
            let (mut lo, mut hi) = (0.0f64, 0.0f64);
            for r in rs {
                if (1.0..=10.0).contains(&r.t) {
                    lo = lo.max(r.ratio);
                }
                if (10.0..=100.0).contains(&r.t) {
                    hi = hi.max(r.ratio);
                }
            }
            if lo == 0.0 || hi == 0.0 {
                1.0
            } else {
                (hi / lo).max(lo / hi)
            }
        };
        let decade_stability = decade(&mut reports.iter());
        let mut series: Vec<(Shell, i64)> = reports.iter().map(|r| (r.shell, r.n)).collect();
        series.sort();
        series.dedup();
        let worst_series_stability = series
            .iter()
            .map(|key| decade(&mut reports.iter().filter(|r| (r.shell, r.n) == *key)))
            .fold(1.0, f64::max);
        let mut halvings = Vec::new();
        for r in reports.iter().filter(|r| r.t >= 10.0) {
            if let Some(d) = reports
                .iter()
                .find(|d| d.shell == r.shell && d.n == r.n && d.sign == r.sign && libm::fabs(d.t - 2.0 * r.t) < 1e-9)
            {
                halvings.push(Halving { shell: r.shell, n: r.n, t: r.t, factor: d.sup_abs / r.sup_abs });
            }
        }
        Self { all_finite, max_ratio, decade_stability, worst_series_stability, halvings }
    }

    /// Doubling `t` multiplies the sup by `1/2` within `rel` (e.g. 0.25).
    pub fn halvings_within(&self, rel: f64) -> bool {
        self.halvings.iter().all(|h| libm::fabs(h.factor - 0.5) <= rel * 0.5)
    }
}
