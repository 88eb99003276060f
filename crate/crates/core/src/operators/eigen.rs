//! Symmetric eigendecomposition for n ≤ 3.
//!
//! n = 2 uses the closed form. n = 3 uses the trigonometric solution of the
//! characteristic cubic for the spectrum, a cross-product eigenvector for the
//! best-separated eigenvalue and a projected 2×2 problem for the other two.
//! Clustered spectra (gap below [`CLUSTER_TOL`]) go through cyclic Jacobi.

use super::sym::SymMatrix;

/// Relative eigenvalue gap below which the 3×3 closed form hands over to Jacobi.
pub const CLUSTER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen {
    n: usize,
    values: [f64; 3],
    /// `frame[k]` is the unit eigenvector belonging to `values[k]`.
    frame: [[f64; 3]; 3],
}

impl Eigen {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Ascending eigenvalues.
    pub fn values(&self) -> &[f64] {
        &self.values[..self.n]
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.frame[k][..self.n]
    }

    pub fn frame(&self) -> &[[f64; 3]; 3] {
        &self.frame
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.n - 1]
    }

    /// Q·diag(g(λ))·Qᵀ.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> SymMatrix {
        let d: Vec<f64> = self.values().iter().map(|&l| g(l)).collect();
        SymMatrix::from_spectral(&self.frame, &d)
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.map(|l| l)
    }

    fn sorted(n: usize, mut pairs: Vec<(f64, [f64; 3])>) -> Self {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut values = [0.0; 3];
        let mut frame = [[0.0; 3]; 3];
        for (k, (l, v)) in pairs.into_iter().enumerate() {
            values[k] = l;
            frame[k] = v;
        }
        Eigen { n, values, frame }
    }
}

pub fn eig_sym(a: &SymMatrix) -> Eigen {
    match a.dim() {
        1 => Eigen {
            n: 1,
            values: [a.get(0, 0), 0.0, 0.0],
            frame: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        },
        2 => {
            let (lo, hi, (c, s)) = eig2(a.get(0, 0), a.get(0, 1), a.get(1, 1));
            Eigen {
                n: 2,
                values: [lo, hi, 0.0],
                frame: [[-s, c, 0.0], [c, s, 0.0], [0.0, 0.0, 1.0]],
            }
        }
        _ => eig3(a),
    }
}

/// Eigenvalues `(lo, hi)` of [[a, b], [b, c]] and the unit vector `(cos θ, sin θ)`
/// of the larger one; the smaller one's vector is `(-sin θ, cos θ)`.
fn eig2(a: f64, b: f64, c: f64) -> (f64, f64, (f64, f64)) {
    let mean = 0.5 * (a + c);
    let half = 0.5 * (a - c);
    let r = half.hypot(b);
    let theta = 0.5 * b.atan2(half);
    (mean - r, mean + r, (theta.cos(), theta.sin()))
}

fn dot(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

fn cross(x: &[f64; 3], y: &[f64; 3]) -> [f64; 3] {
    [
        x[1] * y[2] - x[2] * y[1],
        x[2] * y[0] - x[0] * y[2],
        x[0] * y[1] - x[1] * y[0],
    ]
}

fn full(a: &SymMatrix) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a.get(i, j);
        }
    }
    m
}

fn eig3(a: &SymMatrix) -> Eigen {
    let scale = a.max_abs();
    if scale == 0.0 {
        return jacobi3(a);
    }
    let m = full(&a.scale(1.0 / scale));
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    let off = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    let spread = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * off;
    let p = (spread / 6.0).sqrt();
    if p < CLUSTER_TOL {
        return jacobi3(a);
    }
    let mut bm = m;
    for (i, row) in bm.iter_mut().enumerate() {
        row[i] -= q;
        row.iter_mut().for_each(|v| *v /= p);
    }
    let det_b = bm[0][0] * (bm[1][1] * bm[2][2] - bm[1][2] * bm[2][1])
        - bm[0][1] * (bm[1][0] * bm[2][2] - bm[1][2] * bm[2][0])
        + bm[0][2] * (bm[1][0] * bm[2][1] - bm[1][1] * bm[2][0]);
    let r = (0.5 * det_b).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let mid = 3.0 * q - hi - lo;
    if hi - mid < CLUSTER_TOL || mid - lo < CLUSTER_TOL {
        return jacobi3(a);
    }

    // eigenvector of the better separated extreme eigenvalue
    let isolated = if hi - mid >= mid - lo { hi } else { lo };
    let mut shifted = m;
    for (i, row) in shifted.iter_mut().enumerate() {
        row[i] -= isolated;
    }
    let candidates = [
        cross(&shifted[0], &shifted[1]),
        cross(&shifted[0], &shifted[2]),
        cross(&shifted[1], &shifted[2]),
    ];
    let best = candidates
        .iter()
        .max_by(|x, y| dot(x, x).total_cmp(&dot(y, y)))
        .copied()
        .unwrap();
    let norm = dot(&best, &best).sqrt();
    if norm < 1e-150 {
        return jacobi3(a);
    }
    let v = best.map(|c| c / norm);

    // orthonormal complement {u, w}
    let u = if v[0].abs() > v[1].abs() {
        let l = v[0].hypot(v[2]);
        [-v[2] / l, 0.0, v[0] / l]
    } else {
        let l = v[1].hypot(v[2]);
        [0.0, v[2] / l, -v[1] / l]
    };
    let w = cross(&v, &u);
    let mv = |x: &[f64; 3]| -> [f64; 3] {
        [dot(&m[0], x), dot(&m[1], x), dot(&m[2], x)]
    };
    let (mu, mw) = (mv(&u), mv(&w));
    let (l1, l2, (c, s)) = eig2(dot(&u, &mu), dot(&u, &mw), dot(&w, &mw));
    let e_hi = [0, 1, 2].map(|k| c * u[k] + s * w[k]);
    let e_lo = [0, 1, 2].map(|k| -s * u[k] + c * w[k]);
    let lv = dot(&v, &mv(&v));

    Eigen::sorted(
        3,
        vec![
            (lv * scale, v),
            (l1 * scale, e_lo),
            (l2 * scale, e_hi),
        ],
    )
}

/// Cyclic Jacobi for 3×3 symmetric input.
pub(crate) fn jacobi3(a: &SymMatrix) -> Eigen {
    let mut m = full(a);
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let norm2: f64 = m.iter().flatten().map(|x| x * x).sum();
    for _sweep in 0..64 {
        let off: f64 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
        if off <= 1e-34 * norm2 || off == 0.0 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = m[p][q];
            if apq == 0.0 {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
            let c = 1.0 / t.hypot(1.0);
            let s = t * c;
            for row in m.iter_mut() {
                let (kp, kq) = (row[p], row[q]);
                row[p] = c * kp - s * kq;
                row[q] = s * kp + c * kq;
            }
            for k in 0..3 {
                let (pk, qk) = (m[p][k], m[q][k]);
                m[p][k] = c * pk - s * qk;
                m[q][k] = s * pk + c * qk;
            }
            for row in v.iter_mut() {
                let (kp, kq) = (row[p], row[q]);
                row[p] = c * kp - s * kq;
                row[q] = s * kp + c * kq;
            }
        }
    }
    let pairs = (0..3)
        .map(|k| (m[k][k], [v[0][k], v[1][k], v[2][k]]))
        .collect();
    Eigen::sorted(3, pairs)
}
