//! Smooth dyadic cutoffs.
//!
//! The base bump `phi` equals 1 on `[-5/4, 5/4]` and vanishes outside
//! `[-8/5, 8/5]`. In between it is a normalized `exp(-1/s)` smoothstep, so it
//! is `C^inf` and both endpoints are hit exactly (no floating tails).
//!
//! Derived families:
//!
//! * `phi_k(r) = phi(r / 2^k) - phi(r / 2^(k-1))` for any integer `k`,
//! * `psi_{-1}(r) = phi(2r)`, `psi_l = phi_l` for `l >= 0`,
//! * interval sums `psi_[a,b]`, evaluated by telescoping so that they are
//!   exactly 1 wherever the partition says so.

/// Lower edge of the plateau where `phi == 1`.
pub const PLATEAU: f64 = 5.0 / 4.0;
/// Upper edge of the support of `phi`.
pub const SUPPORT: f64 = 8.0 / 5.0;

/// Inner and outer radius factors of the annulus carrying `phi_k`, in units of `2^k`.
pub const ANNULUS_INNER: f64 = 5.0 / 8.0;
pub const ANNULUS_OUTER: f64 = 8.0 / 5.0;

#[inline]
fn exp_neg_inv(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        libm::exp(-1.0 / s)
    }
}

/// `C^inf` smoothstep: 0 for `s <= 0`, 1 for `s >= 1`.
#[inline]
pub fn smoothstep(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = exp_neg_inv(s);
        let b = exp_neg_inv(1.0 - s);
        a / (a + b)
    }
}

/// `2^k` for possibly negative `k`.
#[inline]
pub fn dyadic(k: i32) -> f64 {
    libm::ldexp(1.0, k)
}

/// Named recipe for the base bump. Only one mollifier ships today; the enum
/// keeps the constructor signature stable if more are added.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mollifier {
    /// `phi(r) = S((8/5 - |r|) / (8/5 - 5/4))` with the `exp(-1/s)` smoothstep.
    #[default]
    ExpSmoothstep,
}

/// The dyadic cutoff families. Immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DyadicCutoffs {
    mollifier: Mollifier,
}

impl DyadicCutoffs {
    pub fn build(mollifier: Mollifier) -> Self {
        Self { mollifier }
    }

    pub fn mollifier(&self) -> Mollifier {
        self.mollifier
    }

    /// Base bump `phi(r)`; even in `r`.
    #[inline]
    pub fn phi(&self, r: f64) -> f64 {
        match self.mollifier {
            Mollifier::ExpSmoothstep => {
                let a = libm::fabs(r);
                if a <= PLATEAU {
                    1.0
                } else if a >= SUPPORT {
                    0.0
                } else {
                    smoothstep((SUPPORT - a) / (SUPPORT - PLATEAU))
                }
            }
        }
    }

    /// `phi_k(r) = phi(r/2^k) - phi(r/2^(k-1))`, any integer `k`.
    #[inline]
    pub fn phi_k(&self, k: i32, r: f64) -> f64 {
        let a = libm::fabs(r);
        self.phi(a / dyadic(k)) - self.phi(a / dyadic(k - 1))
    }

    /// Frequency shell `psi_k`: `phi(2|r|)` for `k = -1`, `phi_k` for `k >= 0`.
    #[inline]
    pub fn psi(&self, k: i32, r: f64) -> f64 {
        debug_assert!(k >= -1);
        if k < 0 {
            self.phi(2.0 * libm::fabs(r))
        } else {
            self.phi_k(k, r)
        }
    }

    /// Interval sum `psi_[lo, hi]` over integer shells `lo..=hi` (clamped to
    /// `lo >= -1`). Computed by telescoping, so it is exactly 1 on the
    /// plateau of the union and exactly 0 outside its support.
    #[inline]
    pub fn psi_interval(&self, lo: i32, hi: i32, r: f64) -> f64 {
        let lo = lo.max(-1);
        if hi < lo {
            return 0.0;
        }
        let a = libm::fabs(r);
        let outer = self.phi(a / dyadic(hi));
        if lo == -1 {
            outer
        } else {
            outer - self.phi(a / dyadic(lo - 1))
        }
    }

    /// Spatial atom with floor index 0: `phi(|x|)` at `j = 0` (it absorbs all
    /// `j <= 0`), `phi_j(|x|)` for `j >= 1`. `sum_{j >= 0}` is exactly 1.
    #[inline]
    pub fn spatial_atom(&self, j: i32, radius: f64) -> f64 {
        if j <= 0 {
            self.phi(radius)
        } else {
            self.phi_k(j, radius)
        }
    }

    /// Closed support `[inner, outer]` of `psi_k` in `|r|`.
    pub fn shell_support(&self, k: i32) -> (f64, f64) {
        if k < 0 {
            (0.0, SUPPORT / 2.0)
        } else {
            (ANNULUS_INNER * dyadic(k), ANNULUS_OUTER * dyadic(k))
        }
    }

    /// Smallest shell index whose support reaches radius `r` from below, i.e.
    /// the largest `k` with `psi_k(r) != 0` can be at most this plus one.
    pub fn top_shell_for(&self, r: f64) -> i32 {
        let mut k = -1;
        while self.shell_support(k + 1).0 < r {
            k += 1;
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cut() -> DyadicCutoffs {
        DyadicCutoffs::build(Mollifier::ExpSmoothstep)
    }

    #[test]
    fn plateau_and_support() {
        let c = cut();
        assert_eq!(c.phi(1.0), 1.0);
        assert_eq!(c.phi(1.7), 0.0);
        assert_eq!(c.phi(-1.25), 1.0);
        assert_eq!(c.phi(1.6), 0.0);
        assert!(c.phi(1.4) > 0.0 && c.phi(1.4) < 1.0);
        // monotone on the transition
        let mut prev = 1.0;
        for i in 0..=100 {
            let r = PLATEAU + (SUPPORT - PLATEAU) * i as f64 / 100.0;
            let v = c.phi(r);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn finite_differences_stay_bounded() {
        // fourth differences on a fine grid are O(h^4) for a smooth bump
        let c = cut();
        let h = 1e-3;
        let mut max4: f64 = 0.0;
        let mut r = 1.2;
        while r < 1.65 {
            let d4 = c.phi(r + 2.0 * h) - 4.0 * c.phi(r + h) + 6.0 * c.phi(r) - 4.0 * c.phi(r - h)
                + c.phi(r - 2.0 * h);
            max4 = max4.max(libm::fabs(d4) / (h * h * h * h));
            r += h / 3.0;
        }
        assert!(max4.is_finite() && max4 < 1e6, "fourth derivative estimate {max4}");
    }

    #[test]
    fn partition_of_unity_random() {
        let c = cut();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let top = 12;
        for _ in 0..10_000 {
            let r = rng.gen_range(0.0..dyadic(top - 1));
            let mut s = c.psi(-1, r);
            for j in 0..=top {
                s += c.psi(j, r);
            }
            assert!(libm::fabs(s - 1.0) <= 1e-12, "r = {r}, sum = {s}");
        }
    }

    #[test]
    fn shells_live_in_their_annulus() {
        let c = cut();
        for k in 0..6 {
            let (lo, hi) = c.shell_support(k);
            assert_eq!(c.psi(k, lo * 0.999), 0.0);
            assert_eq!(c.psi(k, hi * 1.001), 0.0);
            assert!(c.psi(k, dyadic(k)) > 0.0);
        }
        assert_eq!(c.psi(-1, 0.81), 0.0);
        assert_eq!(c.psi(-1, 0.6), 1.0);
    }

    #[test]
    fn separated_shells_have_disjoint_support() {
        let c = cut();
        for k in -1..6 {
            for kk in (k + 2)..8 {
                for i in 0..2000 {
                    let r = i as f64 * 0.05;
                    assert_eq!(c.psi(k, r) * c.psi(kk, r), 0.0);
                }
            }
        }
    }

    #[test]
    fn interval_is_exactly_one_on_inner_shell() {
        let c = cut();
        for k in -1..6 {
            for i in 0..4000 {
                let r = i as f64 * 0.01;
                if c.psi(k, r) != 0.0 {
                    assert_eq!(c.psi_interval(k - 2, k + 2, r), 1.0, "k={k} r={r}");
                }
            }
        }
    }

    #[test]
    fn spatial_atoms_sum_to_one() {
        let c = cut();
        for i in 0..5000 {
            let r = i as f64 * 0.02;
            let s: f64 = (0..10).map(|j| c.spatial_atom(j, r)).sum();
            assert!(libm::fabs(s - 1.0) < 1e-14);
        }
        // bump at radius 8 sits in shell 3
        assert_eq!(c.spatial_atom(3, 8.0), 1.0);
    }

    #[test]
    fn low_shell_on_integers_is_zero_mode_projector() {
        let c = cut();
        assert_eq!(c.psi(-1, 0.0), 1.0);
        for n in 1..20 {
            assert_eq!(c.psi(-1, n as f64), 0.0);
        }
        for l in 1..5 {
            assert_eq!(c.psi(l, 0.0), 0.0);
        }
    }
}
