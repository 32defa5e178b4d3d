//! Experiment drivers behind the `kgsim` subcommands.
//!
//! Every driver is deterministic given its inputs: there is no wall-clock or
//! thread-order dependence, so repeated runs give byte-identical output.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use kgsim_core::kernel::{certify_dyadic_shells, certify_low_frequency, BoundKind, SweepSummary};
use kgsim_core::{fit_decay, BoundReport, DecayFit, DyadicCutoffs, FitError, KernelError, NonlinearityCoeffs};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, InitialData, RunConfig};
use crate::dynamics::{normalize_initial_data, DynamicsError, Integrator, StateU};
use crate::field::{gaussian_bump, Field};
use crate::fieldfile::{FieldFile, FieldFileError};
use crate::grid::{Grid, GridError};
use crate::linear::random_localized;
use crate::norms::{modified_energy, norm_report, theta_integrand, EnergyError, NormReport, ReportSpec, ThetaTracker};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Input(#[from] FieldFileError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("{source}{}", snapshot.as_ref().map(|p| format!(" (last good state: {})", p.display())).unwrap_or_default())]
    Dynamics { source: DynamicsError, snapshot: Option<PathBuf> },
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error("fit failed: {0}")]
    Fit(#[from] FitError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("check failed: {0}")]
    Assertion(String),
}

impl From<DynamicsError> for HarnessError {
    fn from(source: DynamicsError) -> Self {
        HarnessError::Dynamics { source, snapshot: None }
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Io(io::Error::other(e))
    }
}

impl HarnessError {
    /// 2 for bad configuration or input, 3 for numerical failure, 4 for a failed check.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Usage(_) | HarnessError::Input(_) | HarnessError::Grid(_) => 2,
            HarnessError::Assertion(_) => 4,
            _ => 3,
        }
    }
}

/// Initial data `(u0, u1)` for a run.
pub fn initial_data(grid: &std::sync::Arc<Grid>, cfg: &RunConfig) -> (Field, Field) {
    let u0 = match cfg.initial_data {
        InitialData::Gaussian => gaussian_bump(grid, cfg.sigma, cfg.y_modulation),
        InitialData::RandomBumps => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            random_localized(grid, &mut rng, cfg.grid.mode_cutoff.min(4))
        }
    };
    let peak = u0.sup_norm(1).max(f64::MIN_POSITIVE);
    (u0 * (cfg.epsilon0 / peak), Field::zeros(grid))
}

/// Flags summarizing a run; the drift flags are meaningful for the linear
/// (`coeffs = zero`) reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFlags {
    /// `max_t ||V(t) - V(0)||_2 / ||V(0)||_2`.
    pub profile_drift: f64,
    /// `max_t |E(t) - E(0)| / E(0)`.
    pub energy_drift: f64,
    /// `theta(end) / theta(end / 2)`, when defined.
    pub theta_plateau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub window: (f64, f64),
    pub exponent: f64,
    pub amplitude: f64,
    pub residual: f64,
    pub samples: usize,
}

impl From<DecayFit> for FitSummary {
    fn from(f: DecayFit) -> Self {
        Self { window: f.window, exponent: f.exponent, amplitude: f.amplitude, residual: f.residual, samples: f.samples }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub grid: String,
    pub coeffs: String,
    pub epsilon0: f64,
    pub t_end: f64,
    pub dt: f64,
    pub steps: usize,
    pub theta: f64,
    /// Fitted exponent of the sup-norm sum `S(t)` (linear theory: -1).
    pub decay: FitSummary,
    /// Fitted exponent of the running max of `E^{1/2}`.
    pub energy_growth: FitSummary,
    pub flags: RunFlags,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub rows: Vec<NormReport>,
    /// `(t, S(t))` at every diagnostic time.
    pub integrand: Vec<(f64, f64)>,
    pub summary: RunSummary,
}

/// Running max of `sqrt(E)` against `t` from `t0` on, the envelope fitted
/// for energy growth. Starting at `t0` skips the initial layer where `u_t`
/// switches on from zero and the modified energy dips by `O(eps)`.
pub fn energy_envelope(energies: &[(f64, f64)], t0: f64) -> Vec<(f64, f64)> {
    let mut top = 0.0f64;
    energies
        .iter()
        .filter(|(t, _)| *t >= t0)
        .map(|&(t, e)| {
            top = top.max(e.max(0.0).sqrt());
            (t, top)
        })
        .collect()
}

/// Fit window `[2, t_end]`, shrunk for short runs.
fn fit_window(t_end: f64) -> (f64, f64) {
    (2.0f64.min(t_end / 2.0).max(1.0), t_end)
}

/// What one diagnostic step measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagnostics {
    /// Full [`NormReport`] rows, theta and decay fit.
    Full,
    /// Modified energy only.
    EnergyOnly,
}

fn write_snapshot(cfg: &RunConfig, state: &StateU) -> Option<PathBuf> {
    let dir = cfg.output_dir.clone().unwrap_or_else(std::env::temp_dir);
    fs::create_dir_all(&dir).ok()?;
    let path = dir.join("last_good.json");
    let (u, udot) = state.recover();
    fs::write(&path, FieldFile::from_fields(state.t, &u.real_part(), &udot.real_part()).to_json()).ok()?;
    Some(path)
}

/// Time-steps the configured problem and collects diagnostics. Nothing is
/// written to disk except the last-good snapshot on integrator failure.
pub fn run(cfg: &RunConfig, mode: Diagnostics) -> Result<RunOutput, HarnessError> {
    cfg.validate()?;
    let grid = Grid::new(cfg.grid)?;
    let (u0, u1) = initial_data(&grid, cfg);
    let mut state = normalize_initial_data(&u0, &u1)?;
    let mut integrator = Integrator::new(&grid, cfg.coeffs.clone())?;
    let cutoffs = DyadicCutoffs::default();
    let spec = ReportSpec { energy_order: cfg.energy_order, oversample: cfg.oversample, ..ReportSpec::default() };

    let v0 = state.profile();
    let v0_norm = v0.l2_norm();
    let mut tracker = ThetaTracker::new();
    let mut rows = Vec::new();
    let mut integrand = Vec::new();
    let mut energies = Vec::new();
    let mut profile_drift = 0.0f64;

    let steps = cfg.steps();
    for step in 0..=steps {
        if step % cfg.diagnostics_every == 0 || step == steps {
            let (u, udot) = state.recover();
            let v = state.profile();
            if v0_norm > 0.0 {
                profile_drift = profile_drift.max((&v - &v0).l2_norm() / v0_norm);
            }
            match mode {
                Diagnostics::Full => {
                    let s = theta_integrand(&u, &udot, cfg.oversample);
                    tracker.push(state.t, s);
                    integrand.push((state.t, s));
                    let row = norm_report(state.t, &u, &udot, &cfg.coeffs, &cutoffs, &spec, Some(tracker.value()))?;
                    energies.push((state.t, row.energy));
                    rows.push(row);
                }
                Diagnostics::EnergyOnly => {
                    energies.push((state.t, modified_energy(&u, &udot, cfg.energy_order, &cfg.coeffs)?));
                }
            }
        }
        if step == steps {
            break;
        }
        state = integrator.step(&state, cfg.dt).map_err(|source| HarnessError::Dynamics {
            snapshot: write_snapshot(cfg, &state),
            source,
        })?;
    }

    let t_end = state.t;
    let window = fit_window(t_end);
    let decay = match mode {
        Diagnostics::Full => fit_decay(&integrand, window)?.into(),
        Diagnostics::EnergyOnly => FitSummary { window: (0.0, 0.0), exponent: f64::NAN, amplitude: f64::NAN, residual: f64::NAN, samples: 0 },
    };
    let energy_growth = fit_decay(&energy_envelope(&energies, window.0), window)?.into();
    let e0 = energies[0].1;
    let energy_drift = if e0 > 0.0 { energies.iter().map(|(_, e)| (e - e0).abs() / e0).fold(0.0, f64::max) } else { 0.0 };
    let summary = RunSummary {
        grid: cfg.grid.to_string(),
        coeffs: cfg.preset.to_string(),
        epsilon0: cfg.epsilon0,
        t_end,
        dt: cfg.dt,
        steps,
        theta: tracker.value(),
        decay,
        energy_growth,
        flags: RunFlags { profile_drift, energy_drift, theta_plateau: tracker.plateau_ratio() },
    };
    Ok(RunOutput { rows, integrand, summary })
}

/// Tidy CSV of report rows, one row per diagnostic time.
pub fn norms_csv(rows: &[NormReport]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = rows.first() {
        w.write_record(first.csv_header())?;
    }
    for r in rows {
        w.write_record(r.csv_row())?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| io::Error::other(e.to_string()))?).expect("csv is utf-8"))
}

/// `simulate`: runs and writes `norms.csv` and `summary.json` into the output directory.
pub fn simulate(cfg: &RunConfig) -> Result<RunOutput, HarnessError> {
    let out = run(cfg, Diagnostics::Full)?;
    if let Some(dir) = &cfg.output_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("norms.csv"), norms_csv(&out.rows)?)?;
        fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&out.summary).expect("plain data") + "\n")?;
        // the directory itself stays out of the record, so reruns elsewhere compare equal
        fs::write(dir.join("config.txt"), RunConfig { output_dir: None, ..cfg.clone() }.to_text())?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub epsilon0: f64,
    pub exponent: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayScan {
    /// Ordered by decreasing `epsilon0`.
    pub rows: Vec<ScanRow>,
    /// Same run with all coefficients zero, at the largest `epsilon0`.
    pub control: ScanRow,
    /// Adjacent pairs where a smaller `epsilon0` gave a larger exponent.
    pub inversions: usize,
}

impl DecayScan {
    /// Exponents shrink toward zero with `epsilon0` (one inversion allowed),
    /// and the linear control shows no growth.
    pub fn trend_ok(&self, control_tol: f64) -> bool {
        let ends = match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => self.rows.len() == 1 || a.exponent > b.exponent,
            _ => false,
        };
        ends && self.inversions <= 1 && self.control.exponent.abs() < control_tol
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["epsilon0", "exponent", "residual", "control"])?;
        for (r, ctl) in self.rows.iter().map(|r| (r, 0)).chain([(&self.control, 1)]) {
            w.write_record([format!("{:e}", r.epsilon0), format!("{:e}", r.exponent), format!("{:e}", r.residual), ctl.to_string()])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| io::Error::other(e.to_string()))?).expect("csv is utf-8"))
    }
}

/// `decay-scan`: energy-growth exponent per `epsilon0` plus a linear control.
pub fn decay_scan(base: &RunConfig, epsilons: &[f64]) -> Result<DecayScan, HarnessError> {
    if epsilons.is_empty() {
        return Err(HarnessError::Usage("decay-scan needs at least one epsilon0".into()));
    }
    if epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(HarnessError::Usage("epsilon0 values must be positive".into()));
    }
    let mut eps = epsilons.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    let one = |e: f64, coeffs: NonlinearityCoeffs| -> Result<ScanRow, HarnessError> {
        let cfg = RunConfig { epsilon0: e, coeffs, output_dir: None, ..base.clone() };
        let fit = run(&cfg, Diagnostics::EnergyOnly)?.summary.energy_growth;
        Ok(ScanRow { epsilon0: e, exponent: fit.exponent, residual: fit.residual })
    };
    let rows = eps.iter().map(|&e| one(e, base.coeffs.clone())).collect::<Result<Vec<_>, _>>()?;
    let control = one(eps[0], NonlinearityCoeffs::zero())?;
    let inversions = rows.windows(2).filter(|w| w[1].exponent > w[0].exponent).count();
    Ok(DecayScan { rows, control, inversions })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSweep {
    pub ks: Vec<u32>,
    pub ns: Vec<i64>,
    pub ts: Vec<f64>,
    pub tol: f64,
    /// Replace both bounds by [`BoundKind::Corrupted`].
    pub corrupt_bound: bool,
    /// Also require the doubling check for `t >= 10`.
    pub strict_halving: bool,
    /// Largest admissible decade-stability factor.
    pub max_stability: f64,
}

impl Default for KernelSweep {
    fn default() -> Self {
        Self {
            ks: (0..=4).collect(),
            ns: (0..=4).collect(),
            ts: vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
            tol: 1e-6,
            corrupt_bound: false,
            strict_halving: false,
            max_stability: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelOutcome {
    pub reports: Vec<BoundReport>,
    pub low: SweepSummary,
    pub dyadic: Option<SweepSummary>,
    /// Failed hard checks, empty on success.
    pub failures: Vec<String>,
}

/// `kernel-verify`: low-frequency sweep over `ns x ts`, dyadic sweep over `ks x ns x ts`.
pub fn kernel_verify(sweep: &KernelSweep) -> Result<KernelOutcome, HarnessError> {
    if sweep.ns.is_empty() || sweep.ts.is_empty() {
        return Err(HarnessError::Usage("kernel-verify needs nonempty n and t ranges".into()));
    }
    let c = DyadicCutoffs::default();
    let (lo_kind, dy_kind) = if sweep.corrupt_bound {
        (BoundKind::Corrupted, BoundKind::Corrupted)
    } else {
        (BoundKind::LowFrequency, BoundKind::DyadicShell)
    };
    let low_reports = certify_low_frequency(c, &sweep.ns, &sweep.ts, sweep.tol, lo_kind)?;
    let dy_reports = if sweep.ks.is_empty() { Vec::new() } else { certify_dyadic_shells(c, &sweep.ks, &sweep.ns, &sweep.ts, sweep.tol, dy_kind)? };
    let low = SweepSummary::from_reports(&low_reports);
    let dyadic = (!dy_reports.is_empty()).then(|| SweepSummary::from_reports(&dy_reports));
    let mut failures = Vec::new();
    for (name, s) in [("low-frequency", Some(&low)), ("dyadic", dyadic.as_ref())] {
        let Some(s) = s else { continue };
        if !s.all_finite {
            failures.push(format!("{name}: non-finite ratio"));
        }
        if s.decade_stability > sweep.max_stability {
            failures.push(format!("{name}: decade stability {:.3} > {}", s.decade_stability, sweep.max_stability));
        }
        if sweep.strict_halving && !s.halvings_within(0.25) {
            let worst = s.halvings.iter().map(|h| h.factor).fold(0.5f64, |w, f| if (f - 0.5).abs() > (w - 0.5).abs() { f } else { w });
            failures.push(format!("{name}: doubling t scaled the sup by {worst:.3}, not 1/2 within 25%"));
        }
    }
    let mut reports = low_reports;
    reports.extend(dy_reports);
    Ok(KernelOutcome { reports, low, dyadic, failures })
}

/// Frozen kernel CSV columns: `k, n, t, sup_abs, bound, ratio`, with
/// `k = -1` for the low-frequency cutoff.
pub fn kernel_csv(reports: &[BoundReport]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "n", "t", "sup_abs", "bound", "ratio"])?;
    for r in reports {
        w.write_record([
            r.shell.index().to_string(),
            r.n.to_string(),
            format!("{:?}", r.t),
            format!("{:e}", r.sup_abs),
            format!("{:e}", r.bound),
            format!("{:e}", r.ratio),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| io::Error::other(e.to_string()))?).expect("csv is utf-8"))
}

/// `norm-report`: parses a field file and returns the report as pretty JSON.
/// Coefficients enter only through the modified energy.
pub fn norm_report_json(text: &str, coeffs: &NonlinearityCoeffs, spec: &ReportSpec) -> Result<String, HarnessError> {
    let file = FieldFile::parse(text)?;
    let (_, u, udot) = file.to_fields()?;
    let report = norm_report(file.t, &u, &udot, coeffs, &DyadicCutoffs::default(), spec, None)?;
    Ok(serde_json::to_string_pretty(&report.to_json()).expect("plain data") + "\n")
}

/// Writes `contents` to `path` through a sibling temp file, so a failure
/// never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_is_running_max_of_root() {
        let e = energy_envelope(&[(0.0, 100.0), (1.0, 4.0), (2.0, 1.0), (3.0, 9.0)], 1.0);
        assert_eq!(e, vec![(1.0, 2.0), (2.0, 2.0), (3.0, 3.0)]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Usage("x".into()).exit_code(), 2);
        assert_eq!(HarnessError::Assertion("x".into()).exit_code(), 4);
        assert_eq!(HarnessError::from(DynamicsError::GridMismatch).exit_code(), 3);
    }

    #[test]
    fn empty_scan_is_usage_error() {
        assert_eq!(decay_scan(&RunConfig::default(), &[]).unwrap_err().exit_code(), 2);
    }
}
