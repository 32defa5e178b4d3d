//! Flat `key = value` run configuration.
//!
//! Precedence, lowest first: built-in defaults, the config file, `KGSIM_*`
//! environment variables (key upper-cased, dots as underscores), and `--set
//! key=value` overrides on the command line.
//!
//! Nonlinearity coefficients are a preset name (`coeffs = mixed`) optionally
//! followed by explicit entries `g.j.k.l`, `h.j.k`, `q.a.b`; each entry also
//! sets its symmetric partner.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use kgsim_core::{NonlinearityCoeffs, Preset};

use crate::grid::GridSpec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{origin}: line {line}: expected `key = value`, got {text:?}")]
    Syntax { origin: String, line: usize, text: String },
    #[error("{origin}: unknown key {key:?}")]
    UnknownKey { origin: String, key: String },
    #[error("{origin}: bad value {value:?} for {key}: {reason}")]
    BadValue { origin: String, key: String, value: String, reason: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialData {
    /// `eps exp(-|x|^2 / (2 sigma^2)) (1 + a cos y)`, `u_t = 0`.
    Gaussian,
    /// Seeded random localized bumps (see [`crate::linear::random_localized`]).
    RandomBumps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub preset: Preset,
    pub coeffs: NonlinearityCoeffs,
    pub epsilon0: f64,
    pub t_end: f64,
    pub dt: f64,
    pub diagnostics_every: usize,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub energy_order: u32,
    pub oversample: usize,
    pub initial_data: InitialData,
    pub sigma: f64,
    pub y_modulation: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec { box_period: 64.0 * PI, plane_points: 256, mode_cutoff: 8, dealias_fraction: 2.0 / 3.0 },
            preset: Preset::Mixed,
            coeffs: NonlinearityCoeffs::mixed(),
            epsilon0: 1e-3,
            t_end: 40.0,
            dt: 0.25,
            diagnostics_every: 8,
            output_dir: None,
            seed: 0,
            energy_order: 1,
            oversample: 2,
            initial_data: InitialData::Gaussian,
            sigma: 1.25,
            y_modulation: 0.5,
        }
    }
}

/// Keys accepted besides the coefficient entries.
pub const KEYS: [&str; 17] = [
    "box_period",
    "plane_points",
    "mode_cutoff",
    "dealias_fraction",
    "coeffs",
    "epsilon0",
    "t_end",
    "dt",
    "diagnostics_every",
    "output_dir",
    "seed",
    "energy_order",
    "oversample",
    "initial_data",
    "sigma",
    "y_modulation",
    "box_period_over_pi",
];

fn parse_num<T: std::str::FromStr>(origin: &str, key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| ConfigError::BadValue {
        origin: origin.into(),
        key: key.into(),
        value: value.into(),
        reason: e.to_string(),
    })
}

fn parse_indices(origin: &str, key: &str, parts: &[&str], bound: usize) -> Result<Vec<usize>, ConfigError> {
    parts
        .iter()
        .map(|p| {
            let i: usize = parse_num(origin, key, p)?;
            if i >= bound {
                return Err(ConfigError::UnknownKey { origin: origin.into(), key: key.into() });
            }
            Ok(i)
        })
        .collect()
}

impl RunConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, origin: &str, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim();
        let value = value.trim();
        let bad = |reason: &str| ConfigError::BadValue {
            origin: origin.into(),
            key: key.into(),
            value: value.into(),
            reason: reason.into(),
        };
        match key {
            "box_period" => self.grid.box_period = parse_num(origin, key, value)?,
            "box_period_over_pi" => self.grid.box_period = parse_num::<f64>(origin, key, value)? * PI,
            "plane_points" => self.grid.plane_points = parse_num(origin, key, value)?,
            "mode_cutoff" => self.grid.mode_cutoff = parse_num(origin, key, value)?,
            "dealias_fraction" => {
                self.grid.dealias_fraction = match value.split_once('/') {
                    Some((a, b)) => parse_num::<f64>(origin, key, a.trim())? / parse_num::<f64>(origin, key, b.trim())?,
                    None => parse_num(origin, key, value)?,
                }
            }
            "coeffs" => {
                self.preset = Preset::parse(value).map_err(|e| bad(&e.to_string()))?;
                self.coeffs = NonlinearityCoeffs::preset(self.preset);
            }
            "epsilon0" => self.epsilon0 = parse_num(origin, key, value)?,
            "t_end" => self.t_end = parse_num(origin, key, value)?,
            "dt" => self.dt = parse_num(origin, key, value)?,
            "diagnostics_every" => self.diagnostics_every = parse_num(origin, key, value)?,
            "output_dir" => self.output_dir = if value.is_empty() { None } else { Some(PathBuf::from(value)) },
            "seed" => self.seed = parse_num(origin, key, value)?,
            "energy_order" => self.energy_order = parse_num(origin, key, value)?,
            "oversample" => self.oversample = parse_num(origin, key, value)?,
            "initial_data" => {
                self.initial_data = match value {
                    "gaussian" => InitialData::Gaussian,
                    "random-bumps" => InitialData::RandomBumps,
                    _ => return Err(bad("expected gaussian or random-bumps")),
                }
            }
            "sigma" => self.sigma = parse_num(origin, key, value)?,
            "y_modulation" => self.y_modulation = parse_num(origin, key, value)?,
            _ => {
                let parts: Vec<&str> = key.split('.').collect();
                let v: f64 = parse_num(origin, key, value)?;
                match parts.as_slice() {
                    ["g", rest @ ..] if rest.len() == 3 => {
                        let i = parse_indices(origin, key, rest, 4)?;
                        self.coeffs.g[i[0]][i[1]][i[2]] = v;
                        self.coeffs.g[i[1]][i[0]][i[2]] = v;
                    }
                    ["h", rest @ ..] if rest.len() == 2 => {
                        let i = parse_indices(origin, key, rest, 4)?;
                        self.coeffs.h[i[0]][i[1]] = v;
                        self.coeffs.h[i[1]][i[0]] = v;
                    }
                    ["q", rest @ ..] if rest.len() == 2 => {
                        let i = parse_indices(origin, key, rest, 5)?;
                        self.coeffs.q[i[0]][i[1]] = v;
                        self.coeffs.q[i[1]][i[0]] = v;
                    }
                    _ => return Err(ConfigError::UnknownKey { origin: origin.into(), key: key.into() }),
                }
            }
        }
        Ok(())
    }

    /// Applies a config file's text. `#` starts a comment.
    pub fn apply_text(&mut self, origin: &str, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { origin: origin.into(), line: i + 1, text: raw.into() });
            };
            self.set(origin, k, v)?;
        }
        Ok(())
    }

    /// Applies `KGSIM_<KEY>` variables from `vars`.
    pub fn apply_env(&mut self, vars: impl IntoIterator<Item = (String, String)>) -> Result<(), ConfigError> {
        let mut pairs: Vec<(String, String)> = vars
            .into_iter()
            .filter_map(|(k, v)| k.strip_prefix("KGSIM_").map(|rest| (rest.to_ascii_lowercase(), v)))
            .collect();
        // coefficient entries use dots; accept underscores in the environment
        pairs.sort();
        for (k, v) in pairs {
            let key = if KEYS.contains(&k.as_str()) { k } else { k.replace('_', ".") };
            self.set("environment", &key, &v)?;
        }
        Ok(())
    }

    /// Applies `key=value` overrides.
    pub fn apply_overrides(&mut self, sets: &[String]) -> Result<(), ConfigError> {
        for s in sets {
            let Some((k, v)) = s.split_once('=') else {
                return Err(ConfigError::Syntax { origin: "--set".into(), line: 0, text: s.clone() });
            };
            self.set("--set", k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.coeffs.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let half = self.grid.box_period / 2.0;
        if !(self.t_end > 0.0 && self.t_end < half) {
            return Err(ConfigError::Invalid(format!("t_end = {} must lie in (0, box_period/2 = {half})", self.t_end)));
        }
        let h_max = self.grid.h_max();
        if !(self.dt > 0.0 && self.dt <= h_max) {
            return Err(ConfigError::Invalid(format!("dt = {} must lie in (0, h_max = {h_max:.4}]", self.dt)));
        }
        if !(self.epsilon0 > 0.0 && self.epsilon0.is_finite()) {
            return Err(ConfigError::Invalid(format!("epsilon0 = {} must be positive", self.epsilon0)));
        }
        if self.diagnostics_every == 0 {
            return Err(ConfigError::Invalid("diagnostics_every must be >= 1".into()));
        }
        if self.oversample == 0 {
            return Err(ConfigError::Invalid("oversample must be >= 1".into()));
        }
        if !(self.sigma > 0.0) {
            return Err(ConfigError::Invalid("sigma must be positive".into()));
        }
        Ok(())
    }

    /// Steps needed to reach `t_end` (the last step may overshoot by < dt).
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil() as usize
    }

    /// Canonical text form; re-parses to the same config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let g = &self.grid;
        let _ = writeln!(s, "box_period = {:?}", g.box_period);
        let _ = writeln!(s, "plane_points = {}", g.plane_points);
        let _ = writeln!(s, "mode_cutoff = {}", g.mode_cutoff);
        let _ = writeln!(s, "dealias_fraction = {:?}", g.dealias_fraction);
        let _ = writeln!(s, "coeffs = {}", self.preset);
        let base = NonlinearityCoeffs::preset(self.preset);
        for j in 0..4 {
            for k in j..4 {
                for l in 0..4 {
                    if self.coeffs.g[j][k][l] != base.g[j][k][l] {
                        let _ = writeln!(s, "g.{j}.{k}.{l} = {:?}", self.coeffs.g[j][k][l]);
                    }
                }
                if self.coeffs.h[j][k] != base.h[j][k] {
                    let _ = writeln!(s, "h.{j}.{k} = {:?}", self.coeffs.h[j][k]);
                }
            }
        }
        for a in 0..5 {
            for b in a..5 {
                if self.coeffs.q[a][b] != base.q[a][b] {
                    let _ = writeln!(s, "q.{a}.{b} = {:?}", self.coeffs.q[a][b]);
                }
            }
        }
        let _ = writeln!(s, "epsilon0 = {:?}", self.epsilon0);
        let _ = writeln!(s, "t_end = {:?}", self.t_end);
        let _ = writeln!(s, "dt = {:?}", self.dt);
        let _ = writeln!(s, "diagnostics_every = {}", self.diagnostics_every);
        if let Some(d) = &self.output_dir {
            let _ = writeln!(s, "output_dir = {}", d.display());
        }
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "energy_order = {}", self.energy_order);
        let _ = writeln!(s, "oversample = {}", self.oversample);
        let kind = match self.initial_data {
            InitialData::Gaussian => "gaussian",
            InitialData::RandomBumps => "random-bumps",
        };
        let _ = writeln!(s, "initial_data = {kind}");
        let _ = writeln!(s, "sigma = {:?}", self.sigma);
        let _ = writeln!(s, "y_modulation = {:?}", self.y_modulation);
        s
    }
}
