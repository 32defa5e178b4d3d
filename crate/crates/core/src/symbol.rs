//! Fourier symbol of `Lambda = sqrt(1 - Delta_{x,y})` on `R^2 x T`.

/// `Lambda_n(xi) = sqrt(1 + |xi|^2 + n^2)`.
#[inline]
pub fn lambda(xi: [f64; 2], n: f64) -> f64 {
    libm::sqrt(1.0 + xi[0] * xi[0] + xi[1] * xi[1] + n * n)
}

/// Radial form `sqrt(1 + r^2 + n^2)`.
#[inline]
pub fn lambda_radial(r: f64, n: f64) -> f64 {
    libm::sqrt(1.0 + r * r + n * n)
}

/// Radial group velocity `d/dr Lambda_n(r) = r / Lambda_n(r)`; always `< 1`.
#[inline]
pub fn group_velocity(r: f64, n: f64) -> f64 {
    r / lambda_radial(r, n)
}

/// Plane gradient `xi / Lambda_n(xi)`.
#[inline]
pub fn lambda_gradient(xi: [f64; 2], n: f64) -> [f64; 2] {
    let l = lambda(xi, n);
    [xi[0] / l, xi[1] / l]
}

/// Plane Hessian `(I - xi xi^T / Lambda^2) / Lambda`.
#[inline]
pub fn lambda_hessian(xi: [f64; 2], n: f64) -> [[f64; 2]; 2] {
    let l = lambda(xi, n);
    let l2 = l * l;
    [
        [(1.0 - xi[0] * xi[0] / l2) / l, -xi[0] * xi[1] / (l2 * l)],
        [-xi[0] * xi[1] / (l2 * l), (1.0 - xi[1] * xi[1] / l2) / l],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(lambda([0.0, 0.0], 0.0), 1.0);
        assert_eq!(lambda([1.0, 1.0], 1.0), 2.0);
        assert!(group_velocity(1e6, 0.0) < 1.0);
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let xi = [0.7, -1.3];
        let n = 2.0;
        let h = 1e-5;
        let hs = lambda_hessian(xi, n);
        for a in 0..2 {
            let mut p = xi;
            let mut m = xi;
            p[a] += h;
            m[a] -= h;
            let gp = lambda_gradient(p, n);
            let gm = lambda_gradient(m, n);
            for b in 0..2 {
                let fd = (gp[b] - gm[b]) / (2.0 * h);
                assert!(libm::fabs(fd - hs[a][b]) < 1e-9);
            }
        }
    }
}
