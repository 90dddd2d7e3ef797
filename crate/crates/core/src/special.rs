//! Bessel functions of the first kind and the scalar root-finding used by
//! the closed-form disk solutions.
//!
//! `J0`/`J1` are evaluated by the power series for small arguments and by
//! the Hankel asymptotic expansion beyond; both branches agree to ~1e-13
//! in the crossover region, which is far below every tolerance used here.

/// First zero of J0; `lambda_1^D` of the unit disk is its square.
pub const J0_ZERO_1: f64 = 2.404_825_557_695_772_8;

/// First zero of J1; `lambda_2^D` of the unit disk is its square.
pub const J1_ZERO_1: f64 = 3.831_705_970_207_512_3;

/// First Dirichlet eigenvalue of the unit disk, `J0_ZERO_1^2`.
pub const DISK_LAMBDA1_D: f64 = 5.783_185_962_946_785;

/// Second Dirichlet eigenvalue of the unit disk, `J1_ZERO_1^2`.
pub const DISK_LAMBDA2_D: f64 = 14.681_970_642_123_893;

const SERIES_CUTOFF: f64 = 12.0;

/// Bessel function J0(x).
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= SERIES_CUTOFF {
        // sum_m (-1)^m (x/2)^(2m) / (m!)^2
        let q = 0.25 * ax * ax;
        let mut term = 1.0;
        let mut sum = 1.0;
        for m in 1..200 {
            term *= -q / ((m * m) as f64);
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1.0) {
                break;
            }
        }
        sum
    } else {
        let (p, q) = hankel_pq(ax, 0);
        let chi = ax - std::f64::consts::FRAC_PI_4;
        (2.0 / (std::f64::consts::PI * ax)).sqrt() * (p * chi.cos() - q * chi.sin())
    }
}

/// Bessel function J1(x).
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    if ax <= SERIES_CUTOFF {
        // (x/2) sum_m (-1)^m (x/2)^(2m) / (m! (m+1)!)
        let half = 0.5 * ax;
        let q = half * half;
        let mut term = half;
        let mut sum = half;
        for m in 1..200 {
            term *= -q / ((m * (m + 1)) as f64);
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1.0) {
                break;
            }
        }
        sign * sum
    } else {
        let (p, q) = hankel_pq(ax, 1);
        let chi = ax - 3.0 * std::f64::consts::FRAC_PI_4;
        sign * (2.0 / (std::f64::consts::PI * ax)).sqrt() * (p * chi.cos() - q * chi.sin())
    }
}

/// J0'(x) = -J1(x).
pub fn bessel_j0_prime(x: f64) -> f64 {
    -bessel_j1(x)
}

/// Asymptotic amplitude/phase series P_nu, Q_nu for large argument.
/// Truncated where the terms start growing; for x > 12 the truncation
/// error is below 1e-14.
fn hankel_pq(x: f64, nu: u32) -> (f64, f64) {
    let mu = 4.0 * (nu as f64) * (nu as f64);
    let inv8x = 1.0 / (8.0 * x);
    let mut p = 1.0;
    let mut q = 0.0;
    // a_k(nu) = prod_{j=1..k} (mu - (2j-1)^2) / (k! 8^k x^k), alternating into P and Q
    let mut term = 1.0;
    let mut k = 1u32;
    let mut last = f64::INFINITY;
    while k < 30 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) * inv8x / k as f64;
        if term.abs() >= last {
            break; // divergent tail of the asymptotic series
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
        k += 1;
    }
    (p, q)
}

/// Robust 1D root bracketing + bisection/secant hybrid.
/// `f(lo)` and `f(hi)` must have opposite signs.
pub fn find_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    let fhi = f(hi);
    assert!(
        flo * fhi <= 0.0,
        "find_root: no sign change on [{lo}, {hi}] (f = {flo}, {fhi})"
    );
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < tol * (1.0 + mid.abs()) {
            return mid;
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if flo * fmid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    0.5 * (lo + hi)
}

/// First root of `-x J1(x) + beta J0(x) = 0` on (0, j_{0,1});
/// its square is the first Robin eigenvalue of the unit disk.
pub fn disk_robin_eig1_root(beta: f64) -> f64 {
    assert!(beta > 0.0);
    let f = |x: f64| -x * bessel_j1(x) + beta * bessel_j0(x);
    find_root(f, 1e-12, J0_ZERO_1 - 1e-12, 1e-14)
}

/// First root of `x J0(x) + (beta - 1) J1(x) = 0` on (0, j_{1,1});
/// its square is the second Robin eigenvalue of the unit disk
/// (the first angular mode).
pub fn disk_robin_eig2_root(beta: f64) -> f64 {
    assert!(beta > 0.0);
    let f = |x: f64| x * bessel_j0(x) + (beta - 1.0) * bessel_j1(x);
    find_root(f, 1e-12, J1_ZERO_1 - 1e-12, 1e-14)
}

/// First Robin eigenvalue of a disk of radius `r` (by scaling of the
/// unit-disk root: lambda(rB, beta) = x(r*beta)^2 / r^2).
pub fn disk_robin_lambda1(radius: f64, beta: f64) -> f64 {
    let x = disk_robin_eig1_root(beta * radius);
    (x / radius) * (x / radius)
}

/// L2-normalized Dirichlet ground state of the unit disk evaluated at radius r.
pub fn disk_ground_state_dirichlet(r: f64) -> f64 {
    let c = 1.0 / (std::f64::consts::PI.sqrt() * bessel_j1(J0_ZERO_1));
    c * bessel_j0(J0_ZERO_1 * r)
}

/// Boundary gradient modulus of the L2-normalized Dirichlet ground state
/// of the unit disk: j_{0,1} / sqrt(pi).
pub fn disk_q() -> f64 {
    J0_ZERO_1 / std::f64::consts::PI.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Reference values from standard tables (15+ digits).
    #[test]
    fn bessel_values_match_tables() {
        assert_relative_eq!(bessel_j0(1.0), 0.765_197_686_557_966_6, max_relative = 1e-13);
        assert_relative_eq!(bessel_j1(1.0), 0.440_050_585_744_933_5, max_relative = 1e-13);
        assert_relative_eq!(bessel_j0(5.0), -0.177_596_771_314_338_3, max_relative = 1e-12);
        assert_relative_eq!(bessel_j1(5.0), -0.327_579_137_591_465_2, max_relative = 1e-12);
        assert_relative_eq!(bessel_j0(20.0), 0.167_024_664_340_583_15, max_relative = 1e-12);
        assert_relative_eq!(bessel_j1(20.0), 0.066_833_124_175_850_05, max_relative = 1e-11);
    }

    #[test]
    fn branches_agree_at_crossover() {
        // both the series and the asymptotic expansion are valid near the cutoff
        for &x in &[11.5, 12.0, 12.5, 13.0] {
            let q = 0.25 * x * x;
            let mut term = 1.0;
            let mut series = 1.0;
            for m in 1..400 {
                term *= -q / ((m * m) as f64);
                series += term;
            }
            assert_relative_eq!(bessel_j0(x), series, epsilon = 1e-11);
        }
    }

    #[test]
    fn zeros_are_zeros() {
        assert!(bessel_j0(J0_ZERO_1).abs() < 1e-14);
        assert!(bessel_j1(J1_ZERO_1).abs() < 1e-14);
        assert_relative_eq!(J0_ZERO_1 * J0_ZERO_1, DISK_LAMBDA1_D, max_relative = 1e-15);
        assert_relative_eq!(J1_ZERO_1 * J1_ZERO_1, DISK_LAMBDA2_D, max_relative = 1e-15);
    }

    #[test]
    fn robin_roots_match_reference() {
        // mpmath reference roots of -x J1(x) + beta J0(x) = 0
        for (beta, x_ref) in [
            (0.1, 0.441_681_782_874_841_45),
            (1.0, 1.255_783_711_794_593_5),
            (2.0, 1.599_449_206_486_927_9),
            (10.0, 2.179_496_596_664_457_6),
            (100.0, 2.380_901_663_491_046_8),
            (10_000.0, 2.404_585_087_168_364_9),
        ] {
            assert_relative_eq!(disk_robin_eig1_root(beta), x_ref, max_relative = 1e-12);
        }
        // second eigenvalue roots of x J0(x) + (beta-1) J1(x) = 0
        for (beta, x_ref) in [
            (1.0, 2.404_825_557_695_772_8),
            (10.0, 3.479_759_322_864_655_7),
            (100.0, 3.793_596_870_154_505_8),
        ] {
            assert_relative_eq!(disk_robin_eig2_root(beta), x_ref, max_relative = 1e-12);
        }
    }

    #[test]
    fn robin_lambda_increases_with_beta_toward_dirichlet() {
        let mut prev = 0.0;
        for &beta in &[0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0] {
            let lam = disk_robin_lambda1(1.0, beta);
            assert!(lam > prev);
            assert!(lam < DISK_LAMBDA1_D);
            prev = lam;
        }
        assert!(DISK_LAMBDA1_D - disk_robin_lambda1(1.0, 1e4) < 2e-3);
    }

    #[test]
    fn normalized_ground_state_has_unit_l2_norm() {
        // Simpson quadrature of 2 pi int_0^1 u(r)^2 r dr, independent of the
        // closed-form normalization constant.
        let n = 2000;
        let h = 1.0 / n as f64;
        let f = |r: f64| {
            let u = disk_ground_state_dirichlet(r);
            u * u * r
        };
        let mut s = f(0.0) + f(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        let integral = 2.0 * std::f64::consts::PI * s * h / 3.0;
        assert_relative_eq!(integral, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn disk_q_value() {
        // |u'(1)| = c * j01 * |J0'(j01)| = j01 / sqrt(pi)
        assert_relative_eq!(disk_q(), 1.356_777_529_901_378_8, max_relative = 1e-13);
    }
}
