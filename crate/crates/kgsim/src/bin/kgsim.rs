use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kgsim::config::RunConfig;
use kgsim::harness::{self, HarnessError, KernelSweep};
use kgsim::norms::ReportSpec;

/// Quasilinear Klein-Gordon experiments on R^2 x T.
///
/// Exit codes: 0 success, 2 configuration or input error, 3 numerical
/// failure, 4 failed check.
#[derive(Parser)]
#[command(name = "kgsim", version)]
struct Cli {
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// `key=value` override, applied after the file and KGSIM_* variables.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    sets: Vec<String>,
    #[command(flatten)]
    fields: FieldFlags,
    #[command(subcommand)]
    cmd: Command,
}

/// Shorthands for the most used config keys.
#[derive(Args)]
struct FieldFlags {
    #[arg(long, global = true)]
    epsilon0: Option<String>,
    #[arg(long, global = true)]
    t_end: Option<String>,
    #[arg(long, global = true)]
    dt: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    coeffs: Option<String>,
    #[arg(long, global = true)]
    output_dir: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Time-step the configured run; writes norms.csv and summary.json to output_dir.
    Simulate,
    /// Kernel sup-norm sweeps against the dispersive bounds; CSV on stdout or --out.
    KernelVerify {
        /// Dyadic shells, `a..b` or a comma list; empty for none.
        #[arg(long, default_value = "0..4")]
        k: String,
        #[arg(long, default_value = "0..4")]
        n: String,
        #[arg(long, default_value = "1,2,5,10,20,50,100")]
        t: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Test mode: measure against a deliberately wrong bound.
        #[arg(long)]
        corrupt_bound: bool,
        /// Also require sup|K| to halve (within 25%) when t doubles, t >= 10.
        #[arg(long)]
        strict_halving: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Norm report of a JSON field file.
    NormReport {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Energy-growth exponent for each epsilon0, plus a coeffs = zero control.
    DecayScan {
        /// Comma-separated epsilon0 values.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        eps: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, HarnessError>
where
    T: TryFrom<i64>,
{
    let bad = || HarnessError::Usage(format!("bad range {s:?}"));
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        return (a..=b).map(|v| T::try_from(v).map_err(|_| bad())).collect();
    }
    s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect()
}

fn load_config(cli: &Cli) -> Result<RunConfig, HarnessError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Usage(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&path.display().to_string(), &text)?;
    }
    cfg.apply_env(std::env::vars())?;
    let f = &cli.fields;
    for (key, v) in [
        ("epsilon0", &f.epsilon0),
        ("t_end", &f.t_end),
        ("dt", &f.dt),
        ("seed", &f.seed),
        ("coeffs", &f.coeffs),
        ("output_dir", &f.output_dir),
    ] {
        if let Some(v) = v {
            cfg.set("flag", key, v)?;
        }
    }
    cfg.apply_overrides(&cli.sets)?;
    Ok(cfg)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(p) => Ok(harness::write_atomic(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), HarnessError> {
    let cfg = load_config(cli)?;
    match &cli.cmd {
        Command::Simulate => {
            let out = harness::simulate(&cfg)?;
            let s = &out.summary;
            println!("decay exponent {:.4}, energy growth {:.3e}, theta {:.4e}", s.decay.exponent, s.energy_growth.exponent, s.theta);
            if cfg.output_dir.is_none() {
                print!("{}", harness::norms_csv(&out.rows)?);
            }
            Ok(())
        }
        Command::KernelVerify { k, n, t, tol, corrupt_bound, strict_halving, out } => {
            let sweep = KernelSweep {
                ks: parse_list(k)?,
                ns: parse_list(n)?,
                ts: t.split(',').map(|x| x.trim().parse().map_err(|_| HarnessError::Usage(format!("bad t list {t:?}")))).collect::<Result<_, _>>()?,
                tol: *tol,
                corrupt_bound: *corrupt_bound,
                strict_halving: *strict_halving,
                ..KernelSweep::default()
            };
            let outcome = harness::kernel_verify(&sweep)?;
            emit(out, &harness::kernel_csv(&outcome.reports)?)?;
            match outcome.failures.is_empty() {
                true => Ok(()),
                false => Err(HarnessError::Assertion(outcome.failures.join("; "))),
            }
        }
        Command::NormReport { input, out } => {
            let text = std::fs::read_to_string(input).map_err(|e| HarnessError::Usage(format!("{}: {e}", input.display())))?;
            let spec = ReportSpec { energy_order: cfg.energy_order, oversample: cfg.oversample, ..ReportSpec::default() };
            let json = harness::norm_report_json(&text, &cfg.coeffs, &spec).map_err(|e| match e {
                HarnessError::Input(inner) => HarnessError::Usage(format!("{}: {inner}", input.display())),
                other => other,
            })?;
            emit(out, &json)
        }
        Command::DecayScan { eps, out } => {
            let scan = harness::decay_scan(&cfg, eps)?;
            emit(out, &scan.to_csv()?)?;
            match scan.trend_ok(1e-3) {
                true => Ok(()),
                false => Err(HarnessError::Assertion("energy-growth exponents do not shrink with epsilon0".into())),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kgsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
