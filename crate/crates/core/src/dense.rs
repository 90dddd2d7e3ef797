//! Small dense kernels: Cholesky solves for local least-squares fits and a
//! cyclic Jacobi eigensolver for the Rayleigh-Ritz blocks.

/// In-place Cholesky solve of an n x n SPD system (row-major `a`).
/// Returns false when a pivot drops below `eps` times the largest diagonal.
pub(crate) fn solve_spd_small(n: usize, a: &mut [f64], b: &mut [f64], eps: f64) -> bool {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let scale = (0..n).map(|i| a[i * n + i]).fold(0.0f64, f64::max);
    if scale <= 0.0 {
        return false;
    }
    // L overwrites the lower triangle
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= eps * scale {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[k * n + i] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    true
}

/// Cyclic Jacobi diagonalization of a small symmetric matrix (row-major,
/// destroyed). Returns eigenvalues ascending with matching eigenvector
/// columns in `v`.
pub(crate) fn jacobi_eigh(n: usize, a: &mut [f64]) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let evals: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut evecs = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            evecs[k * n + new] = v[k * n + old];
        }
    }
    (evals, evecs)
}

/// Eigenvalues of a symmetric 2x2 matrix [[xx, xy], [xy, yy]], (min, max).
pub(crate) fn eig_sym2(xx: f64, xy: f64, yy: f64) -> (f64, f64) {
    let tr = 0.5 * (xx + yy);
    let det = (0.5 * (xx - yy)).hypot(xy);
    (tr - det, tr + det)
}
