//! Lattice points of the truncation ellipsoid, in f64.

/// `Y = L D L^T` style decomposition: `Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2`.
pub(crate) fn cholesky(y: &[[f64; 4]; 4]) -> Option<[[f64; 4]; 4]> {
    let mut q = [[0.0; 4]; 4];
    for i in 0..4 {
        let mut d = y[i][i];
        for k in 0..i {
            d -= q[k][k] * q[k][i] * q[k][i];
        }
        if !(d > 0.0) {
            return None;
        }
        q[i][i] = d;
        for j in i + 1..4 {
            let mut s = y[i][j];
            for k in 0..i {
                s -= q[k][k] * q[k][i] * q[k][j];
            }
            q[i][j] = s / d;
        }
    }
    Some(q)
}

pub(crate) fn det_leading(y: &[[f64; 4]; 4], k: usize) -> f64 {
    let mut m: Vec<Vec<f64>> = (0..k).map(|i| y[i][..k].to_vec()).collect();
    let mut det = 1.0;
    for c in 0..k {
        let piv = (c..k)
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
            .unwrap();
        if m[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            m.swap(piv, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..k {
            let f = m[r][c] / m[c][c];
            for cc in c..k {
                m[r][cc] -= f * m[c][cc];
            }
        }
    }
    det
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
pub(crate) fn min_eigenvalue(y: &[[f64; 4]; 4]) -> f64 {
    let mut a = *y;
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..4 {
            for j in i + 1..4 {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..4 {
            for r in p + 1..4 {
                if a[p][r].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[r][r] - a[p][p]) / (2.0 * a[p][r]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..4 {
                    let akp = a[k][p];
                    let akr = a[k][r];
                    a[k][p] = c * akp - s * akr;
                    a[k][r] = s * akp + c * akr;
                }
                for k in 0..4 {
                    let apk = a[p][k];
                    let ark = a[r][k];
                    a[p][k] = c * apk - s * ark;
                    a[r][k] = s * apk + c * ark;
                }
            }
        }
    }
    (0..4).map(|i| a[i][i]).fold(f64::INFINITY, f64::min)
}

fn inverse_diag(q: &[[f64; 4]; 4]) -> [f64; 4] {
    // Y = U^T D U with U unit upper triangular (U_ij = q_ij)
    let mut uinv = [[0.0; 4]; 4];
    for i in (0..4).rev() {
        uinv[i][i] = 1.0;
        for j in i + 1..4 {
            let mut s = 0.0;
            for k in i + 1..=j {
                s += q[i][k] * uinv[k][j];
            }
            uinv[i][j] = -s;
        }
    }
    // Y^-1 = U^-1 D^-1 U^-T
    std::array::from_fn(|i| (i..4).map(|k| uinv[i][k] * uinv[i][k] / q[k][k]).sum())
}

/// One run of consecutive points along the first coordinate.
#[derive(Debug, Clone)]
pub(crate) struct Line {
    pub n: [i64; 4],
    pub lo: i64,
    pub hi: i64,
}

/// Truncation region `{x : x^T Y x < R^2/pi}` for a theta sum at `prec` bits.
///
/// The radius satisfies the lattice tail bound
/// `2 (2/rho)^4 (1 + t) e^{-t} < 2^-prec`, `t = (R - rho/2)^2`,
/// where `rho^2` is `pi` times a lower bound for the smallest eigenvalue of `Y`.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    q: [[f64; 4]; 4],
    bound: f64,
    inv_diag: [f64; 4],
}

impl Ellipsoid {
    pub fn new(y: &[[f64; 4]; 4], prec: u32, factor: f64) -> Option<Self> {
        let q = cholesky(y)?;
        let lmin = min_eigenvalue(y) * 0.999;
        if !(lmin > 0.0) {
            return None;
        }
        let rho = (std::f64::consts::PI * lmin).sqrt();
        let target = -(prec as f64) * std::f64::consts::LN_2;
        let log_bound = |r: f64| {
            let t = (r - rho / 2.0).powi(2);
            2f64.ln() + 4.0 * (2.0 / rho).ln() + (1.0 + t).ln() - t
        };
        let mut r = (2.0 + rho) / 2.0;
        while log_bound(r) >= target {
            r += 0.25;
        }
        let r = r * factor.max(1.0);
        let bound = r * r / std::f64::consts::PI;
        Some(Ellipsoid {
            q,
            bound,
            inv_diag: inverse_diag(&q),
        })
    }

    /// Largest `|n_i|` over the region for shift `a`.
    pub fn radius(&self, a: &[f64; 4]) -> u32 {
        (0..4)
            .map(|i| ((self.bound * self.inv_diag[i]).sqrt() + a[i].abs()).ceil() as u32)
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn lines(&self, a: &[f64; 4]) -> Vec<Line> {
        let mut out = Vec::new();
        let mut n = [0i64; 4];
        self.walk(3, self.bound, a, &mut n, &mut out);
        out
    }

    fn walk(&self, level: usize, budget: f64, a: &[f64; 4], n: &mut [i64; 4], out: &mut Vec<Line>) {
        let q = &self.q;
        let mut centre = 0.0;
        for j in level + 1..4 {
            centre -= q[level][j] * (n[j] as f64 + a[j]);
        }
        let half = (budget.max(0.0) / q[level][level]).sqrt();
        let slack = 1e-9 * (1.0 + half);
        let lo = (centre - half - a[level] - slack).ceil() as i64;
        let hi = (centre + half - a[level] + slack).floor() as i64;
        if lo > hi {
            return;
        }
        if level == 0 {
            out.push(Line { n: *n, lo, hi });
            return;
        }
        for k in lo..=hi {
            n[level] = k;
            let d = k as f64 + a[level] - centre;
            let rest = budget - q[level][level] * d * d;
            self.walk(level - 1, rest.max(0.0), a, n, out);
        }
        n[level] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> [[f64; 4]; 4] {
        [
            [2.0, 0.3, 0.1, 0.0],
            [0.3, 1.5, -0.2, 0.1],
            [0.1, -0.2, 1.0, 0.25],
            [0.0, 0.1, 0.25, 0.8],
        ]
    }

    #[test]
    fn decomposition_reproduces_form() {
        let y = sample();
        let q = cholesky(&y).unwrap();
        let x = [0.7, -1.2, 2.5, 0.3];
        let mut direct = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                direct += x[i] * y[i][j] * x[j];
            }
        }
        let mut via = 0.0;
        for i in 0..4 {
            let mut s = x[i];
            for j in i + 1..4 {
                s += q[i][j] * x[j];
            }
            via += q[i][i] * s * s;
        }
        assert!((direct - via).abs() < 1e-12);
    }

    #[test]
    fn jacobi_eigenvalue() {
        let y = [
            [2.0, 1.0, 0.0, 0.0],
            [1.0, 2.0, 0.0, 0.0],
            [0.0, 0.0, 5.0, 0.0],
            [0.0, 0.0, 0.0, 4.0],
        ];
        assert!((min_eigenvalue(&y) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let y = sample();
        let ell = Ellipsoid::new(&y, 64, 1.0).unwrap();
        let a = [0.1, 0.9, 0.1, 0.9];
        let mut count = 0usize;
        for l in ell.lines(&a) {
            count += (l.hi - l.lo + 1) as usize;
        }
        let r = ell.radius(&a) as i64;
        let mut brute = 0usize;
        for n0 in -r..=r {
            for n1 in -r..=r {
                for n2 in -r..=r {
                    for n3 in -r..=r {
                        let x = [
                            n0 as f64 + a[0],
                            n1 as f64 + a[1],
                            n2 as f64 + a[2],
                            n3 as f64 + a[3],
                        ];
                        let mut v = 0.0;
                        for i in 0..4 {
                            for j in 0..4 {
                                v += x[i] * y[i][j] * x[j];
                            }
                        }
                        if v <= ell.bound {
                            brute += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(count, brute);
    }
}
