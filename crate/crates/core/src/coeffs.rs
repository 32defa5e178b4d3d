//! Constant coefficients of the quadratic quasilinear nonlinearity
//!
//! `F = sum_{j,k=0}^{3} G^{jk}(u, du) d_j d_k u + Q(u, du)`,
//! `G^{jk} = sum_l g^{jkl} d_l u + h^{jk} u`,
//!
//! with index 0 the time direction, 1 and 2 the plane, 3 the periodic
//! direction. `Q` is a quadratic form on the 5-vector
//! `w = (u, d_0 u, d_1 u, d_2 u, d_3 u)`.

use core::fmt;

/// Invalid coefficient tables.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoeffError {
    #[error("g^{{{j}{k}{l}}} = {a} differs from g^{{{k}{j}{l}}} = {b}")]
    AsymmetricG { j: usize, k: usize, l: usize, a: f64, b: f64 },
    #[error("h^{{{j}{k}}} = {a} differs from h^{{{k}{j}}} = {b}")]
    AsymmetricH { j: usize, k: usize, a: f64, b: f64 },
    #[error("q[{a}][{b}] differs from q[{b}][{a}]")]
    AsymmetricQ { a: usize, b: usize },
    #[error("G^00 must vanish identically (found nonzero g^00{l:?} or h^00)")]
    NonzeroG00 { l: Option<usize> },
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("unknown nonlinearity preset `{0}`")]
    UnknownPreset(alloc::string::String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Zero,
    /// `Q = (d_t u)^2`.
    DtSquared,
    /// `Q = u^2`.
    USquared,
    /// Semilinear and quasilinear terms together; see [`NonlinearityCoeffs::mixed`].
    Mixed,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Zero, Preset::DtSquared, Preset::USquared, Preset::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Zero => "zero",
            Preset::DtSquared => "dt-squared",
            Preset::USquared => "u-squared",
            Preset::Mixed => "mixed",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CoeffError> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CoeffError::UnknownPreset(alloc::string::String::from(s)))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NonlinearityCoeffs {
    pub g: [[[f64; 4]; 4]; 4],
    pub h: [[f64; 4]; 4],
    pub q: [[f64; 5]; 5],
}

impl NonlinearityCoeffs {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn preset(p: Preset) -> Self {
        match p {
            Preset::Zero => Self::zero(),
            Preset::DtSquared => {
                let mut c = Self::zero();
                c.q[1][1] = 1.0;
                c
            }
            Preset::USquared => {
                let mut c = Self::zero();
                c.q[0][0] = 1.0;
                c
            }
            Preset::Mixed => Self::mixed(),
        }
    }

    /// `F = u_t (Delta_x u + d_y^2 u) + u d_1 u_t - u d_y^2 u
    ///      + u_t^2 + u u_t - |grad_x u|^2 / 2`.
    ///
    /// In coefficient form: `g^{jj0} = 1` (j = 1..3), `h^{01} = h^{10} = 1/2`,
    /// `h^{33} = -1`, and the quadratic form above.
    pub fn mixed() -> Self {
        let mut c = Self::zero();
        for j in 1..4 {
            c.g[j][j][0] = 1.0;
        }
        c.h[0][1] = 0.5;
        c.h[1][0] = 0.5;
        c.h[3][3] = -1.0;
        c.q[1][1] = 1.0;
        c.q[0][1] = 0.5;
        c.q[1][0] = 0.5;
        c.q[2][2] = -0.5;
        c.q[3][3] = -0.5;
        c
    }

    pub fn is_zero(&self) -> bool {
        self.g.iter().flatten().flatten().all(|v| *v == 0.0)
            && self.h.iter().flatten().all(|v| *v == 0.0)
            && self.q.iter().flatten().all(|v| *v == 0.0)
    }

    /// Checks symmetry, `G^00 = 0`, and finiteness.
    pub fn validate(&self) -> Result<(), CoeffError> {
        let all = self
            .g
            .iter()
            .flatten()
            .flatten()
            .chain(self.h.iter().flatten())
            .chain(self.q.iter().flatten());
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(CoeffError::NonFinite);
        }
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let (a, b) = (self.g[j][k][l], self.g[k][j][l]);
                    if a != b {
                        return Err(CoeffError::AsymmetricG { j, k, l, a, b });
                    }
                }
                let (a, b) = (self.h[j][k], self.h[k][j]);
                if a != b {
                    return Err(CoeffError::AsymmetricH { j, k, a, b });
                }
            }
        }
        for l in 0..4 {
            if self.g[0][0][l] != 0.0 {
                return Err(CoeffError::NonzeroG00 { l: Some(l) });
            }
        }
        if self.h[0][0] != 0.0 {
            return Err(CoeffError::NonzeroG00 { l: None });
        }
        for a in 0..5 {
            for b in 0..5 {
                if self.q[a][b] != self.q[b][a] {
                    return Err(CoeffError::AsymmetricQ { a, b });
                }
            }
        }
        Ok(())
    }

    /// `G^{jk}` evaluated from the pointwise 5-vector `w = (u, u_t, u_1, u_2, u_3)`.
    #[inline]
    pub fn g_matrix_entry(&self, j: usize, k: usize, w: &[f64; 5]) -> f64 {
        let mut s = self.h[j][k] * w[0];
        for l in 0..4 {
            s += self.g[j][k][l] * w[l + 1];
        }
        s
    }

    /// `Q(w)`.
    #[inline]
    pub fn quadratic_form(&self, w: &[f64; 5]) -> f64 {
        let mut s = 0.0;
        for a in 0..5 {
            for b in 0..5 {
                s += self.q[a][b] * w[a] * w[b];
            }
        }
        s
    }

    /// Whether `G^{jk}` can be nonzero for the given pair.
    pub fn g_pair_active(&self, j: usize, k: usize) -> bool {
        self.h[j][k] != 0.0 || self.g[j][k].iter().any(|v| *v != 0.0)
    }

    /// Whether the quasilinear part is present at all.
    pub fn has_quasilinear(&self) -> bool {
        (0..4).any(|j| (0..4).any(|k| self.g_pair_active(j, k)))
    }
}
