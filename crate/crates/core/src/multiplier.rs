//! Bilinear Fourier symbol of the quadratic nonlinearity in the `U_+/U_-`
//! variables.
//!
//! With `U = u_t - i Lambda u` and `U_- = conj(U)`,
//!
//! ```text
//! u^   = i (U_+^ - U_-^) / (2 Lambda),     (u_t)^ = (U_+^ + U_-^) / 2,
//! ```
//!
//! so every linear functional of `(u, u_t)` appearing in `F` is a sum over
//! `mu in {+,-}` of a scalar symbol times `U_mu^`. A product of two such
//! functionals becomes a convolution whose kernel, per channel `(mu, nu)`, is
//!
//! ```text
//! M^{mu nu}_{n,m}(xi, eta) = sum_terms coef * c_first^mu(xi - eta, n - m) * c_second^nu(eta, m).
//! ```
//!
//! The terms are derived mechanically from the `(g, h, q)` tables; nothing is
//! transcribed by hand.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::coeffs::NonlinearityCoeffs;
use crate::phase::Sign;
use crate::symbol::lambda;

/// Linear functional of `(u, u_t)`. Spatial indices are 1, 2 (plane) and 3
/// (periodic).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinearFactor {
    Value,
    TimeDeriv,
    Space(u8),
    /// `d_j d_k u`, stored with `j <= k`.
    SpaceSpace(u8, u8),
    /// `d_j u_t`.
    SpaceTime(u8),
}

/// Which admissible symbol family a factor belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorFamily {
    /// `1, 1/Lambda, xi_l/Lambda, n/Lambda`: at most first order.
    FirstOrder,
    /// Additionally `eta_i, m, eta_i eta_j/Lambda, m eta_i/Lambda, m^2/Lambda`.
    SecondOrder,
}

impl LinearFactor {
    /// Normalizes index order of mixed second derivatives.
    pub fn space_space(j: u8, k: u8) -> Self {
        if j <= k {
            LinearFactor::SpaceSpace(j, k)
        } else {
            LinearFactor::SpaceSpace(k, j)
        }
    }

    pub fn family(self) -> FactorFamily {
        match self {
            LinearFactor::Value | LinearFactor::TimeDeriv | LinearFactor::Space(_) => FactorFamily::FirstOrder,
            LinearFactor::SpaceSpace(..) | LinearFactor::SpaceTime(_) => FactorFamily::SecondOrder,
        }
    }

    /// Element `w_a` of the 5-vector `(u, u_t, d_1 u, d_2 u, d_3 u)`.
    pub fn of_first_order_slot(a: usize) -> Self {
        match a {
            0 => LinearFactor::Value,
            1 => LinearFactor::TimeDeriv,
            j => LinearFactor::Space(j as u8 - 1),
        }
    }

    /// `d_j d_k u` with time index 0 allowed on at most one side.
    pub fn second_derivative(j: usize, k: usize) -> Option<Self> {
        match (j, k) {
            (0, 0) => None,
            (0, s) | (s, 0) => Some(LinearFactor::SpaceTime(s as u8)),
            (a, b) => Some(LinearFactor::space_space(a as u8, b as u8)),
        }
    }

    /// Symbol multiplying `U_mu^(xi, n)` to produce this functional's transform.
    pub fn symbol(self, mu: Sign, xi: [f64; 2], n: f64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        let spatial = |j: u8| -> Complex64 {
            match j {
                1 => i * xi[0],
                2 => i * xi[1],
                3 => i * n,
                _ => unreachable!("spatial index {j}"),
            }
        };
        // u^ = i (U_+ - U_-) / (2 Lambda)
        let value = || i * (mu.value() / (2.0 * lambda(xi, n)));
        let time = Complex64::new(0.5, 0.0);
        match self {
            LinearFactor::Value => value(),
            LinearFactor::TimeDeriv => time,
            LinearFactor::Space(j) => spatial(j) * value(),
            LinearFactor::SpaceSpace(j, k) => spatial(j) * spatial(k) * value(),
            LinearFactor::SpaceTime(j) => spatial(j) * time,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearTerm {
    pub coef: f64,
    pub first: LinearFactor,
    pub second: LinearFactor,
}

/// `M^{mu nu}_{n,m}(xi, eta)` as an explicit sum of factor products.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BilinearSymbol {
    terms: Vec<BilinearTerm>,
}

impl BilinearSymbol {
    /// Expands `sum G^{jk} d_jk u + Q` into factor products. The first slot
    /// always holds the first-order factor (the `G` coefficient or the left
    /// entry of `Q`).
    pub fn from_coeffs(coeffs: &NonlinearityCoeffs) -> Self {
        let mut raw: Vec<BilinearTerm> = Vec::new();
        for a in 0..5 {
            for b in 0..5 {
                let c = coeffs.q[a][b];
                if c != 0.0 {
                    raw.push(BilinearTerm {
                        coef: c,
                        first: LinearFactor::of_first_order_slot(a),
                        second: LinearFactor::of_first_order_slot(b),
                    });
                }
            }
        }
        for j in 0..4 {
            for k in 0..4 {
                let Some(second) = LinearFactor::second_derivative(j, k) else {
                    continue;
                };
                if coeffs.h[j][k] != 0.0 {
                    raw.push(BilinearTerm { coef: coeffs.h[j][k], first: LinearFactor::Value, second });
                }
                for l in 0..4 {
                    let c = coeffs.g[j][k][l];
                    if c != 0.0 {
                        raw.push(BilinearTerm { coef: c, first: LinearFactor::of_first_order_slot(l + 1), second });
                    }
                }
            }
        }
        // merge identical factor pairs
        let mut terms: Vec<BilinearTerm> = Vec::new();
        for t in raw {
            if let Some(e) = terms.iter_mut().find(|e| e.first == t.first && e.second == t.second) {
                e.coef += t.coef;
            } else {
                terms.push(t);
            }
        }
        terms.retain(|t| t.coef != 0.0);
        terms.sort_by(|a, b| (a.first, a.second).cmp(&(b.first, b.second)));
        Self { terms }
    }

    pub fn terms(&self) -> &[BilinearTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `M^{mu nu}_{n,m}(xi, eta)`: the first factor sees `(xi - eta, n - m)`,
    /// the second `(eta, m)`.
    pub fn eval(&self, mu: Sign, nu: Sign, n: i64, m: i64, xi: [f64; 2], eta: [f64; 2]) -> Complex64 {
        let d = [xi[0] - eta[0], xi[1] - eta[1]];
        let nd = (n - m) as f64;
        let mf = m as f64;
        self.terms
            .iter()
            .map(|t| t.first.symbol(mu, d, nd) * t.second.symbol(nu, eta, mf) * t.coef)
            .sum()
    }

    /// Every term pairs a first-order factor with one from the wider family.
    pub fn respects_factor_families(&self) -> bool {
        self.terms.iter().all(|t| t.first.family() == FactorFamily::FirstOrder)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::Preset;

    #[test]
    fn dt_squared_is_a_quarter_everywhere() {
        let s = BilinearSymbol::from_coeffs(&NonlinearityCoeffs::preset(Preset::DtSquared));
        for mu in Sign::BOTH {
            for nu in Sign::BOTH {
                for (n, m, xi, eta) in [(0, 0, [0.0, 0.0], [0.0, 0.0]), (3, -1, [0.3, 2.0], [-1.0, 0.5])] {
                    let v = s.eval(mu, nu, n, m, xi, eta);
                    assert!((v - Complex64::new(0.25, 0.0)).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn zero_coeffs_give_zero_symbol() {
        let s = BilinearSymbol::from_coeffs(&NonlinearityCoeffs::zero());
        assert!(s.is_zero());
        assert_eq!(s.eval(Sign::Plus, Sign::Minus, 1, 2, [1.0, 0.0], [0.0, 1.0]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn u_squared_symbol() {
        // (i mu / 2 L1)(i nu / 2 L2) = -mu nu / (4 L1 L2)
        let s = BilinearSymbol::from_coeffs(&NonlinearityCoeffs::preset(Preset::USquared));
        let v = s.eval(Sign::Plus, Sign::Minus, 0, 0, [0.0, 0.0], [0.0, 0.0]);
        assert!((v - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        let v = s.eval(Sign::Plus, Sign::Plus, 0, 0, [0.0, 0.0], [0.0, 0.0]);
        assert!((v - Complex64::new(-0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn mixed_terms_are_merged_and_admissible() {
        let s = BilinearSymbol::from_coeffs(&NonlinearityCoeffs::mixed());
        assert!(s.respects_factor_families());
        // h^{01} and h^{10} collapse into one u * d_1 u_t term with coefficient 1
        let t = s
            .terms()
            .iter()
            .find(|t| t.first == LinearFactor::Value && t.second == LinearFactor::SpaceTime(1))
            .unwrap();
        assert_eq!(t.coef, 1.0);
        let mut pairs: Vec<_> = s.terms().iter().map(|t| (t.first, t.second)).collect();
        pairs.dedup();
        assert_eq!(pairs.len(), s.terms().len());
    }
}
