//! Power-law fits `value ~ A (1 + t)^p` by least squares in log-log space.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("need at least {needed} samples inside the window, found {found}")]
    TooFewSamples { needed: usize, found: usize },
    #[error("nonpositive value {value} at t = {t}")]
    NonPositive { t: f64, value: f64 },
    #[error("window [{0}, {1}] is empty or starts before t = 1")]
    BadWindow(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub window: (f64, f64),
    pub exponent: f64,
    pub amplitude: f64,
    /// RMS residual of `log(value)` about the fitted line.
    pub residual: f64,
    pub samples: usize,
}

pub const MIN_SAMPLES: usize = 8;

/// Fits `log(value) = log(A) + p log(1 + t)` over samples with `t` in `window`.
pub fn fit_decay(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit, FitError> {
    let (t0, t1) = window;
    if !(t0 >= 1.0 && t1 > t0) {
        return Err(FitError::BadWindow(t0, t1));
    }
    let pts: Vec<(f64, f64)> = series.iter().copied().filter(|(t, _)| *t >= t0 && *t <= t1).collect();
    if pts.len() < MIN_SAMPLES {
        return Err(FitError::TooFewSamples { needed: MIN_SAMPLES, found: pts.len() });
    }
    if let Some(&(t, value)) = pts.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(FitError::NonPositive { t, value });
    }
    let xs: Vec<f64> = pts.iter().map(|(t, _)| libm::log(1.0 + t)).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, v)| libm::log(*v)).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| { let r = y - intercept - exponent * x; r * r }).sum();
    Ok(DecayFit {
        window,
        exponent,
        amplitude: libm::exp(intercept),
        residual: libm::sqrt(ss / n),
        samples: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let s: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, 1.0 / (1.0 + i as f64))).collect();
        let f = fit_decay(&s, (2.0, 40.0)).unwrap();
        assert!((f.exponent + 1.0).abs() < 1e-6);
        assert!((f.amplitude - 1.0).abs() < 1e-9);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn constant_series() {
        let s: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, 3.0)).collect();
        let f = fit_decay(&s, (1.0, 19.0)).unwrap();
        assert!(f.exponent.abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let s: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, if i == 5 { 0.0 } else { 1.0 })).collect();
        assert!(matches!(fit_decay(&s, (1.0, 19.0)), Err(FitError::NonPositive { .. })));
        assert!(matches!(fit_decay(&s[..4], (1.0, 19.0)), Err(FitError::TooFewSamples { .. })));
        assert!(matches!(fit_decay(&s, (0.5, 19.0)), Err(FitError::BadWindow(..))));
    }
}
