//! Resonance phases of quadratic interactions.
//!
//! For signs `mu, nu` the phase is
//! `Phi(xi, eta) = Lambda_n(xi) - mu Lambda_{n-m}(xi - eta) - nu Lambda_m(eta)`,
//! a function of the four real variables `(xi_1, xi_2, eta_1, eta_2)` at
//! fixed integer modes `n, m`.

use crate::symbol::{lambda, lambda_gradient, lambda_hessian};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseQuery {
    pub xi: [f64; 2],
    pub eta: [f64; 2],
    pub n: i64,
    pub m: i64,
    pub mu: Sign,
    pub nu: Sign,
}

impl PhaseQuery {
    #[inline]
    fn diff(&self) -> [f64; 2] {
        [self.xi[0] - self.eta[0], self.xi[1] - self.eta[1]]
    }

    /// Phase value.
    pub fn value(&self) -> f64 {
        let n = self.n as f64;
        let m = self.m as f64;
        lambda(self.xi, n) - self.mu.value() * lambda(self.diff(), n - m) - self.nu.value() * lambda(self.eta, m)
    }

    /// Gradient in `(xi_1, xi_2, eta_1, eta_2)`.
    pub fn gradient(&self) -> [f64; 4] {
        let n = self.n as f64;
        let m = self.m as f64;
        let g1 = lambda_gradient(self.xi, n);
        let g2 = lambda_gradient(self.diff(), n - m);
        let g3 = lambda_gradient(self.eta, m);
        let mu = self.mu.value();
        let nu = self.nu.value();
        [
            g1[0] - mu * g2[0],
            g1[1] - mu * g2[1],
            mu * g2[0] - nu * g3[0],
            mu * g2[1] - nu * g3[1],
        ]
    }

    /// Hessian in `(xi_1, xi_2, eta_1, eta_2)`.
    pub fn hessian(&self) -> [[f64; 4]; 4] {
        let n = self.n as f64;
        let m = self.m as f64;
        let h1 = lambda_hessian(self.xi, n);
        let h2 = lambda_hessian(self.diff(), n - m);
        let h3 = lambda_hessian(self.eta, m);
        let mu = self.mu.value();
        let nu = self.nu.value();
        let mut out = [[0.0; 4]; 4];
        for a in 0..2 {
            for b in 0..2 {
                // d(xi - eta)/dxi = I, d(xi - eta)/deta = -I
                out[a][b] = h1[a][b] - mu * h2[a][b];
                out[a][b + 2] = mu * h2[a][b];
                out[a + 2][b] = mu * h2[a][b];
                out[a + 2][b + 2] = -mu * h2[a][b] - nu * h3[a][b];
            }
        }
        out
    }

    /// `|grad(1/Phi)|` and the Frobenius norm of `Hess(1/Phi)`, both
    /// multiplied by `|Phi|`. These stay bounded exactly when the
    /// derivatives of `1/Phi` are controlled by `1/|Phi|`.
    pub fn inverse_derivative_ratios(&self) -> (f64, f64) {
        let p = self.value();
        let g = self.gradient();
        let h = self.hessian();
        let ap = libm::fabs(p);
        // d(1/p) = -dp / p^2
        let g_norm = libm::sqrt(g.iter().map(|v| v * v).sum::<f64>());
        let first = g_norm / (p * p) * ap;
        // d2(1/p) = -H / p^2 + 2 g g^T / p^3
        let mut frob = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let v = -h[a][b] / (p * p) + 2.0 * g[a] * g[b] / (p * p * p);
                frob += v * v;
            }
        }
        (first, libm::sqrt(frob) * ap)
    }

    /// `|grad Phi| / |Phi|`.
    pub fn gradient_ratio(&self) -> f64 {
        let g = self.gradient();
        libm::sqrt(g.iter().map(|v| v * v).sum::<f64>()) / libm::fabs(self.value())
    }

    /// Squared magnitudes `(a, b, c)` of the three interacting waves:
    /// `a = |xi|^2 + n^2`, `b = |xi - eta|^2 + (n - m)^2`, `c = |eta|^2 + m^2`.
    pub fn magnitudes(&self) -> (f64, f64, f64) {
        let d = self.diff();
        let n = self.n as f64;
        let m = self.m as f64;
        (
            self.xi[0] * self.xi[0] + self.xi[1] * self.xi[1] + n * n,
            d[0] * d[0] + d[1] * d[1] + (n - m) * (n - m),
            self.eta[0] * self.eta[0] + self.eta[1] * self.eta[1] + m * m,
        )
    }

    /// Non-resonance lower bound `1 / (2 sqrt(1 + min(a, b, c)))` on `|Phi|`.
    pub fn lower_bound(&self) -> f64 {
        let (a, b, c) = self.magnitudes();
        1.0 / (2.0 * libm::sqrt(1.0 + a.min(b).min(c)))
    }

    /// Whether `|Phi| >= lower_bound()` holds.
    pub fn satisfies_lower_bound(&self) -> bool {
        libm::fabs(self.value()) >= self.lower_bound()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(mu: Sign, nu: Sign) -> PhaseQuery {
        PhaseQuery { xi: [0.0; 2], eta: [0.0; 2], n: 0, m: 0, mu, nu }
    }

    #[test]
    fn zero_frequency_values() {
        assert_eq!(q(Sign::Plus, Sign::Plus).value(), -1.0);
        assert_eq!(q(Sign::Plus, Sign::Minus).value(), 1.0);
        assert_eq!(q(Sign::Minus, Sign::Minus).value(), 3.0);
        assert_eq!(q(Sign::Plus, Sign::Plus).lower_bound(), 0.5);
        assert!(q(Sign::Plus, Sign::Plus).satisfies_lower_bound());
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let base = PhaseQuery { xi: [0.4, -1.1], eta: [2.0, 0.3], n: 3, m: -2, mu: Sign::Minus, nu: Sign::Plus };
        let h = 1e-5;
        let hs = base.hessian();
        for a in 0..4 {
            let mut p = base;
            let mut m = base;
            if a < 2 {
                p.xi[a] += h;
                m.xi[a] -= h;
            } else {
                p.eta[a - 2] += h;
                m.eta[a - 2] -= h;
            }
            let gp = p.gradient();
            let gm = m.gradient();
            for b in 0..4 {
                let fd = (gp[b] - gm[b]) / (2.0 * h);
                assert!(libm::fabs(fd - hs[a][b]) < 1e-8, "{a}{b}: {fd} vs {}", hs[a][b]);
            }
        }
    }
}
