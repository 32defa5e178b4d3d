//! Adaptive Gauss-Kronrod (7/15) quadrature for complex integrands on a
//! finite interval, with a caller-imposed maximum initial panel width so
//! that oscillatory integrands start out resolved.

use alloc::vec::Vec;
use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: Complex64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("quadrature did not reach {tol:e} within {budget} panels (estimate {error:e}, worst panel [{}, {}])", worst.a, worst.b)]
pub struct QuadratureError {
    pub tol: f64,
    pub budget: usize,
    pub error: f64,
    pub worst: Panel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
}

/// One 15-point Kronrod panel with the embedded 7-point Gauss estimate.
pub fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[i];
        if i % 2 == 1 {
            gauss += s * WG[i / 2];
        }
    }
    let value = kron * h;
    let error = ((kron - gauss) * h).norm();
    Panel { a, b, value, error }
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`. The interval is
/// first split into equal panels no wider than `max_width`; the panel with the
/// largest error estimate is bisected until the summed estimate is below
/// `tol` or `budget` panels are in use.
pub fn integrate<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    max_width: f64,
    tol: f64,
    budget: usize,
) -> Result<Quadrature, QuadratureError> {
    if b <= a {
        return Ok(Quadrature { value: Complex64::new(0.0, 0.0), error: 0.0, panels: 0 });
    }
    let count = libm::ceil((b - a) / max_width.max(f64::MIN_POSITIVE)).max(1.0) as usize;
    let width = (b - a) / count as f64;
    let mut panels: Vec<Panel> = (0..count)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == count { b } else { lo + width };
            gk15(&mut f, lo, hi)
        })
        .collect();
    loop {
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= tol {
            let value = panels.iter().map(|p| p.value).sum();
            return Ok(Quadrature { value, error, panels: panels.len() });
        }
        let (worst_idx, worst) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, p)| (i, *p))
            .expect("nonempty");
        if panels.len() >= budget || !(worst.b - worst.a > 4.0 * f64::EPSILON * libm::fabs(worst.a).max(1.0)) {
            return Err(QuadratureError { tol, budget, error, worst });
        }
        let mid = 0.5 * (worst.a + worst.b);
        panels[worst_idx] = gk15(&mut f, worst.a, mid);
        panels.push(gk15(&mut f, mid, worst.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| Complex64::new(x * x * x - x, 1.0), 0.0, 2.0, 10.0, 1e-14, 10).unwrap();
        assert!((q.value - Complex64::new(2.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn oscillatory_exponential() {
        let w = 200.0;
        let q = integrate(|x| Complex64::new(0.0, w * x).exp(), 0.0, 1.0, core::f64::consts::PI / (4.0 * w), 1e-12, 10_000)
            .unwrap();
        let exact = (Complex64::new(0.0, w).exp() - 1.0) / Complex64::new(0.0, w);
        assert!((q.value - exact).norm() < 1e-12);
    }

    #[test]
    fn reports_budget_exhaustion() {
        let err = integrate(|x| Complex64::new(libm::sqrt(x), 0.0), 0.0, 1.0, 1.0, 1e-300, 3).unwrap_err();
        assert_eq!(err.budget, 3);
        assert!(err.worst.a == 0.0);
    }
}
