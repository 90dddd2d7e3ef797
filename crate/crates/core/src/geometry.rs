//! Uniformly convex planar domains encoded by trigonometric support
//! functions.
//!
//! A body is stored as the Fourier coefficients of its support function
//! h(theta) = a0 + sum_k (a_k cos k theta + b_k sin k theta). The outward
//! normal angle theta parameterizes the boundary: the touching point of the
//! supporting line with normal (cos theta, sin theta) is
//! x(theta) = h u(theta) + h' t(theta), and the radius of curvature there is
//! h + h''. Minkowski addition of bodies adds support functions, so the
//! continuity deformation from a ball to a target is exact coefficient
//! arithmetic, never a discretized approximation.

use crate::error::{Error, Result};
use crate::jet::Jet;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Samples used for validation, extrema scans and the boundary-distance
/// table.
const N_GRID: usize = 4096;

/// Angular tolerance for golden-section polish of extrema.
const THETA_TOL: f64 = 1e-10;

/// A uniformly convex planar body, origin at its Steiner point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvexDomain {
    a0: f64,
    /// a_k for k = 1..=K
    cos_coeffs: Vec<f64>,
    /// b_k for k = 1..=K
    sin_coeffs: Vec<f64>,
    #[serde(skip)]
    support_table: OnceLock<Vec<[f64; 3]>>,
}

impl PartialEq for ConvexDomain {
    fn eq(&self, other: &Self) -> bool {
        self.a0 == other.a0
            && self.cos_coeffs == other.cos_coeffs
            && self.sin_coeffs == other.sin_coeffs
    }
}

/// One boundary sample: touching point, outward unit normal, curvature.
#[derive(Clone, Copy, Debug)]
pub struct BoundarySample {
    pub theta: f64,
    pub point: [f64; 2],
    pub normal: [f64; 2],
    pub curvature: f64,
}

/// Geometric descriptors of a domain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub diameter: f64,
    pub inradius: f64,
    pub incenter: [f64; 2],
    /// Largest radius rho such that every boundary point is touched from
    /// inside by a ball of radius rho; 1/kappa_max, rounded down.
    pub interior_sphere_radius: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    /// Boundary regularity gauge per order m in {2, 3, 4}: cumulative maxima
    /// of the local-graph derivatives in principal coordinates.
    pub delta_m: BTreeMap<u32, f64>,
}

impl ConvexDomain {
    /// Disk of radius `r`: h == r.
    pub fn disk(radius: f64) -> Result<ConvexDomain> {
        if !(radius > 0.0) {
            return Err(Error::invalid_param("radius", "must be positive"));
        }
        ConvexDomain::from_coeffs(radius, vec![], vec![])
    }

    /// Ellipse with semi-axes `a` (x) and `b` (y):
    /// h(theta) = sqrt(a^2 cos^2 theta + b^2 sin^2 theta), projected on a
    /// truncated Fourier basis. The coefficients decay geometrically, so the
    /// truncation at order 64 is below double precision for moderate
    /// eccentricities.
    pub fn ellipse(a: f64, b: f64) -> Result<ConvexDomain> {
        if !(a > 0.0) || !(b > 0.0) {
            return Err(Error::invalid_param("a,b", "semi-axes must be positive"));
        }
        let h = |theta: f64| {
            let (s, c) = theta.sin_cos();
            (a * a * c * c + b * b * s * s).sqrt()
        };
        let m = N_GRID;
        let max_order = 64usize;
        let mut a0 = 0.0;
        for j in 0..m {
            a0 += h(2.0 * PI * j as f64 / m as f64);
        }
        a0 /= m as f64;
        let mut cos_coeffs = vec![0.0; max_order];
        let mut sin_coeffs = vec![0.0; max_order];
        for (k, (ak, bk)) in cos_coeffs.iter_mut().zip(sin_coeffs.iter_mut()).enumerate() {
            let k1 = (k + 1) as f64;
            let (mut sa, mut sb) = (0.0, 0.0);
            for j in 0..m {
                let theta = 2.0 * PI * j as f64 / m as f64;
                let hj = h(theta);
                sa += hj * (k1 * theta).cos();
                sb += hj * (k1 * theta).sin();
            }
            *ak = 2.0 * sa / m as f64;
            *bk = 2.0 * sb / m as f64;
        }
        // drop the negligible tail (odd orders and sines vanish by symmetry)
        let cut = 1e-15 * a0;
        let keep = cos_coeffs
            .iter()
            .zip(&sin_coeffs)
            .rposition(|(&c, &s)| c.abs() > cut || s.abs() > cut)
            .map_or(0, |i| i + 1);
        cos_coeffs.truncate(keep);
        sin_coeffs.truncate(keep);
        for c in cos_coeffs.iter_mut().chain(sin_coeffs.iter_mut()) {
            if c.abs() <= cut {
                *c = 0.0;
            }
        }
        ConvexDomain::from_coeffs(a0, cos_coeffs, sin_coeffs)
    }

    /// Disk of radius `r` perturbed by a single cosine harmonic:
    /// h = r + eps cos(k theta). Rejected when r <= |eps| (k^2 - 1), i.e.
    /// when h + h'' changes sign.
    pub fn perturbed_disk(radius: f64, eps: f64, k: u32) -> Result<ConvexDomain> {
        if !(radius > 0.0) {
            return Err(Error::invalid_param("radius", "must be positive"));
        }
        if k == 0 {
            return Err(Error::invalid_param("k", "harmonic index must be >= 1"));
        }
        let mut cos_coeffs = vec![0.0; k as usize];
        cos_coeffs[k as usize - 1] = eps;
        ConvexDomain::from_coeffs(radius, cos_coeffs, vec![0.0; k as usize])
    }

    /// Validated domain from raw support coefficients. Recenters the body at
    /// its Steiner point (drops the k = 1 harmonic, a pure translation) and
    /// rejects any support function with h <= 0 or h + h'' <= 0, reporting a
    /// violating angle.
    pub fn from_coeffs(a0: f64, cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Result<ConvexDomain> {
        if !a0.is_finite() || cos_coeffs.iter().chain(&sin_coeffs).any(|c| !c.is_finite()) {
            return Err(Error::invalid_param("coeffs", "coefficients must be finite"));
        }
        let order = cos_coeffs.len().max(sin_coeffs.len());
        let mut cos_coeffs = cos_coeffs;
        let mut sin_coeffs = sin_coeffs;
        cos_coeffs.resize(order, 0.0);
        sin_coeffs.resize(order, 0.0);
        if order >= 1 {
            // Steiner point of a support function is (a1, b1)
            cos_coeffs[0] = 0.0;
            sin_coeffs[0] = 0.0;
        }
        while cos_coeffs.last() == Some(&0.0) && sin_coeffs.last() == Some(&0.0) {
            cos_coeffs.pop();
            sin_coeffs.pop();
        }
        let domain = ConvexDomain {
            a0,
            cos_coeffs,
            sin_coeffs,
            support_table: OnceLock::new(),
        };
        for j in 0..N_GRID {
            let theta = 2.0 * PI * j as f64 / N_GRID as f64;
            let r = domain.radius_of_curvature(theta);
            if !(r > 0.0) {
                return Err(Error::NotUniformlyConvex { theta, value: r });
            }
            let h = domain.support(theta);
            if !(h > 0.0) {
                return Err(Error::invalid_param(
                    "coeffs",
                    format!("support function is {h:.6e} <= 0 at theta = {theta:.12}"),
                ));
            }
        }
        Ok(domain)
    }

    pub fn max_order(&self) -> usize {
        self.cos_coeffs.len()
    }

    /// (a0, cosine coefficients, sine coefficients)
    pub fn coeffs(&self) -> (f64, &[f64], &[f64]) {
        (self.a0, &self.cos_coeffs, &self.sin_coeffs)
    }

    /// Support function derivative of the given order (0 = h itself).
    pub fn support_deriv(&self, theta: f64, order: u32) -> f64 {
        let mut v = if order == 0 { self.a0 } else { 0.0 };
        for (k, (&ak, &bk)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let kf = (k + 1) as f64;
            let pow = kf.powi(order as i32);
            let (s, c) = (kf * theta).sin_cos();
            // d/dtheta cycles cos -> -sin -> -cos -> sin
            let (dc, ds) = match order % 4 {
                0 => (c, s),
                1 => (-s, c),
                2 => (-c, -s),
                _ => (s, -c),
            };
            v += pow * (ak * dc + bk * ds);
        }
        v
    }

    pub fn support(&self, theta: f64) -> f64 {
        self.support_deriv(theta, 0)
    }

    /// Radius of curvature at normal angle theta: h + h''.
    pub fn radius_of_curvature(&self, theta: f64) -> f64 {
        self.support_deriv(theta, 0) + self.support_deriv(theta, 2)
    }

    pub fn curvature(&self, theta: f64) -> f64 {
        1.0 / self.radius_of_curvature(theta)
    }

    /// Boundary point with outward normal angle theta:
    /// x = h u + h' t with u = (cos, sin), t = (-sin, cos).
    pub fn boundary_point(&self, theta: f64) -> [f64; 2] {
        let h = self.support(theta);
        let hp = self.support_deriv(theta, 1);
        let (s, c) = theta.sin_cos();
        [h * c - hp * s, h * s + hp * c]
    }

    /// `n` boundary samples at uniformly spaced normal angles.
    pub fn boundary_sample(&self, n: usize) -> Result<Vec<BoundarySample>> {
        if n < 16 {
            return Err(Error::invalid_param("n", "need at least 16 samples"));
        }
        Ok((0..n)
            .map(|j| {
                let theta = 2.0 * PI * j as f64 / n as f64;
                self.sample_at(theta)
            })
            .collect())
    }

    pub fn sample_at(&self, theta: f64) -> BoundarySample {
        let (s, c) = theta.sin_cos();
        BoundarySample {
            theta,
            point: self.boundary_point(theta),
            normal: [c, s],
            curvature: self.curvature(theta),
        }
    }

    /// Perimeter = integral of (h + h'') = 2 pi a0 (Cauchy formula).
    pub fn perimeter(&self) -> f64 {
        2.0 * PI * self.a0
    }

    /// Arc length along the boundary from normal angle 0 to `theta`,
    /// exact termwise integral of h + h''.
    pub fn arclength(&self, theta: f64) -> f64 {
        let mut s = self.a0 * theta;
        for (k, (&ak, &bk)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            let kf = (k + 1) as f64;
            let (sk, ck) = (kf * theta).sin_cos();
            s += ak * sk / kf + bk * (1.0 - ck) / kf;
        }
        s + self.support_deriv(theta, 1) - self.support_deriv(0.0, 1)
    }

    /// Inverse of `arclength` on [0, perimeter), Newton safeguarded by
    /// bisection (the integrand h + h'' is strictly positive).
    pub fn theta_at_arclength(&self, s: f64) -> f64 {
        let p = self.perimeter();
        let target = s.rem_euclid(p);
        let (mut lo, mut hi) = (0.0, 2.0 * PI);
        let mut theta = target / self.a0;
        for _ in 0..100 {
            let err = self.arclength(theta) - target;
            if err > 0.0 {
                hi = theta.min(hi);
            } else {
                lo = theta.max(lo);
            }
            if err.abs() < 1e-14 * p {
                break;
            }
            let step = err / self.radius_of_curvature(theta);
            theta -= step;
            if !(lo..=hi).contains(&theta) {
                theta = 0.5 * (lo + hi);
            }
        }
        theta
    }

    fn support_table(&self) -> &Vec<[f64; 3]> {
        self.support_table.get_or_init(|| {
            (0..1024)
                .map(|j| {
                    let theta = 2.0 * PI * j as f64 / 1024.0;
                    let (s, c) = theta.sin_cos();
                    [self.support(theta), c, s]
                })
                .collect()
        })
    }

    /// Distance from an interior point to the boundary:
    /// min over theta of h(theta) - <p, u(theta)> (grid scan plus local
    /// golden-section polish).
    pub fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        let table = self.support_table();
        let n = table.len();
        let mut best = f64::INFINITY;
        let mut best_j = 0;
        for (j, row) in table.iter().enumerate() {
            let g = row[0] - p[0] * row[1] - p[1] * row[2];
            if g < best {
                best = g;
                best_j = j;
            }
        }
        let dt = 2.0 * PI / n as f64;
        let theta0 = best_j as f64 * dt;
        let f = |theta: f64| {
            let (s, c) = theta.sin_cos();
            self.support(theta) - p[0] * c - p[1] * s
        };
        golden_min(f, theta0 - dt, theta0 + dt, THETA_TOL).1
    }

    /// Diameter, curvature extrema, inradius, interior-sphere radius and the
    /// boundary regularity gauges delta_m for m = 2, 3, 4.
    pub fn summary(&self) -> GeometrySummary {
        // diameter: maximize width h(theta) + h(theta + pi) over [0, pi)
        let width = |theta: f64| self.support(theta) + self.support(theta + PI);
        let diameter = grid_extremum(width, 0.0, PI, false);
        let min_width = grid_extremum(width, 0.0, PI, true);

        // curvature extrema through the radius of curvature
        let roc = |theta: f64| self.radius_of_curvature(theta);
        let r_max = grid_extremum(roc, 0.0, 2.0 * PI, false);
        let r_min = grid_extremum(roc, 0.0, 2.0 * PI, true);
        let kappa_min = 1.0 / r_max;
        let kappa_max = 1.0 / r_min;

        let (inradius, incenter) = self.inradius(0.5 * min_width);

        let mut d2_max: f64 = 0.0;
        let mut d3_max: f64 = 0.0;
        let mut d4_max: f64 = 0.0;
        for j in 0..N_GRID {
            let theta = 2.0 * PI * j as f64 / N_GRID as f64;
            let d = self.graph_derivatives(theta);
            d2_max = d2_max.max(d[2].abs());
            d3_max = d3_max.max(d[3].abs());
            d4_max = d4_max.max(d[4].abs());
        }
        let mut delta_m = BTreeMap::new();
        delta_m.insert(2, d2_max);
        delta_m.insert(3, d2_max + d3_max);
        delta_m.insert(4, d2_max + d3_max + d4_max);

        GeometrySummary {
            diameter,
            inradius,
            incenter,
            interior_sphere_radius: r_min * (1.0 - 1e-12),
            kappa_min,
            kappa_max,
            delta_m,
        }
    }

    /// Derivatives (up to order 4) of the local graph of the boundary over
    /// the tangent line at normal angle theta, in principal coordinates.
    ///
    /// With R = h + h'' the boundary point advances as x'(s) = R t, so the
    /// abscissa/height series along the tangent/inward normal have
    /// derivatives (0, R, R', R'' - R, R''' - 3R') and
    /// (0, 0, R, 2R', 3R'' - R); composing the height with the inverted
    /// abscissa gives the graph jet.
    pub fn graph_derivatives(&self, theta: f64) -> [f64; 5] {
        let r = self.radius_of_curvature(theta);
        let r1 = self.support_deriv(theta, 1) + self.support_deriv(theta, 3);
        let r2 = self.support_deriv(theta, 2) + self.support_deriv(theta, 4);
        let r3 = self.support_deriv(theta, 3) + self.support_deriv(theta, 5);
        let xi = Jet::from_derivatives([0.0, r, r1, r2 - r, r3 - 3.0 * r1]);
        let eta = Jet::from_derivatives([0.0, 0.0, r, 2.0 * r1, 3.0 * r2 - r]);
        eta.compose(&xi.invert()).derivatives()
    }

    /// Largest inscribed ball: bisection on the radius, with feasibility of
    /// the shrunken halfplane system {c . u_i <= h_i - r} decided by convex
    /// polygon clipping; the center is then polished by a shrinking pattern
    /// search on the concave radius map c -> min_theta (h - c . u).
    fn inradius(&self, upper: f64) -> (f64, [f64; 2]) {
        let m = 512;
        let planes: Vec<[f64; 3]> = (0..m)
            .map(|j| {
                let theta = 2.0 * PI * j as f64 / m as f64;
                let (s, c) = theta.sin_cos();
                [c, s, self.support(theta)]
            })
            .collect();
        let big = 4.0 * self.a0 + upper;
        let feasible = |r: f64| -> Option<[f64; 2]> {
            let mut poly = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
            for pl in &planes {
                poly = clip_halfplane(&poly, [pl[0], pl[1]], pl[2] - r);
                if poly.is_empty() {
                    return None;
                }
            }
            let n = poly.len() as f64;
            let mut c = [0.0, 0.0];
            for p in &poly {
                c[0] += p[0] / n;
                c[1] += p[1] / n;
            }
            Some(c)
        };
        let mut lo = 0.0;
        let mut hi = upper * (1.0 + 1e-9);
        let mut center = feasible(0.0).unwrap_or([0.0, 0.0]);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            match feasible(mid) {
                Some(c) => {
                    center = c;
                    lo = mid;
                }
                None => hi = mid,
            }
        }
        // polish against the exact radius map
        let g = |c: [f64; 2]| self.boundary_distance(c);
        let mut best = g(center);
        let mut step = self.a0 * 1e-3;
        while step > 1e-13 * self.a0 {
            let mut improved = false;
            for d in [[step, 0.0], [-step, 0.0], [0.0, step], [0.0, -step]] {
                let cand = [center[0] + d[0], center[1] + d[1]];
                let v = g(cand);
                if v > best {
                    best = v;
                    center = cand;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        (best, center)
    }
}

/// The continuity deformation from a ball into `target`:
/// K_t = (1 - t) * ball + t * target through Minkowski addition, which is
/// coefficientwise convex combination of support functions. The ball radius
/// is the largest radius of curvature of the target, 1/kappa_min.
#[derive(Clone, Debug)]
pub struct DeformationFamily {
    target: ConvexDomain,
    ball_radius: f64,
    t_grid: Vec<f64>,
}

impl DeformationFamily {
    pub fn new(target: ConvexDomain, n_t: usize) -> Result<DeformationFamily> {
        if n_t < 2 {
            return Err(Error::invalid_param("n_t", "need at least 2 grid points"));
        }
        let summary_kappa_min = {
            let roc = |theta: f64| target.radius_of_curvature(theta);
            1.0 / grid_extremum(roc, 0.0, 2.0 * PI, false)
        };
        let t_grid = (0..n_t)
            .map(|i| i as f64 / (n_t - 1) as f64)
            .collect();
        Ok(DeformationFamily {
            ball_radius: 1.0 / summary_kappa_min,
            target,
            t_grid,
        })
    }

    pub fn target(&self) -> &ConvexDomain {
        &self.target
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    /// Member K_t. Exact at the endpoints: t = 0 is the ball, t = 1 is the
    /// target, coefficient by coefficient.
    pub fn member(&self, t: f64) -> Result<ConvexDomain> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid_param("t", "must lie in [0, 1]"));
        }
        let (a0, cos_c, sin_c) = self.target.coeffs();
        let a0_t = (1.0 - t) * self.ball_radius + t * a0;
        let cos_t: Vec<f64> = cos_c.iter().map(|c| t * c).collect();
        let sin_t: Vec<f64> = sin_c.iter().map(|c| t * c).collect();
        ConvexDomain::from_coeffs(a0_t, cos_t, sin_t)
    }
}

/// Scan a 1D function on a uniform grid and polish the best cell by
/// golden-section search. `minimize` selects min or max.
fn grid_extremum(f: impl Fn(f64) -> f64, lo: f64, hi: f64, minimize: bool) -> f64 {
    let n = N_GRID;
    let dt = (hi - lo) / n as f64;
    let sign = if minimize { 1.0 } else { -1.0 };
    let mut best = f64::INFINITY;
    let mut best_j = 0;
    for j in 0..n {
        let v = sign * f(lo + j as f64 * dt);
        if v < best {
            best = v;
            best_j = j;
        }
    }
    let t0 = lo + best_j as f64 * dt;
    let g = |t: f64| sign * f(t);
    sign * golden_min(g, t0 - dt, t0 + dt, THETA_TOL).1
}

/// Golden-section minimizer; returns (argmin, min).
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.618_033_988_749_894_9;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (a + b);
    (xm, f(xm))
}

/// Sutherland-Hodgman clip of a convex polygon against n . c <= d.
fn clip_halfplane(poly: &[[f64; 2]], n: [f64; 2], d: f64) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let m = poly.len();
    for i in 0..m {
        let p = poly[i];
        let q = poly[(i + 1) % m];
        let gp = n[0] * p[0] + n[1] * p[1] - d;
        let gq = n[0] * q[0] + n[1] * q[1] - d;
        if gp <= 0.0 {
            out.push(p);
        }
        if (gp < 0.0 && gq > 0.0) || (gp > 0.0 && gq < 0.0) {
            let t = gp / (gp - gq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn disk_support_is_radius() {
        let d = ConvexDomain::disk(1.0).unwrap();
        for theta in [0.0, 0.7, 2.0, 5.1] {
            assert_relative_eq!(d.support(theta), 1.0);
            assert_relative_eq!(d.curvature(theta), 1.0);
        }
    }

    #[test]
    fn ellipse_axis_values() {
        let e = ConvexDomain::ellipse(1.5, 1.0).unwrap();
        assert_relative_eq!(e.support(0.0), 1.5, epsilon = 1e-12);
        assert_relative_eq!(e.support(PI / 2.0), 1.0, epsilon = 1e-12);
        let p = e.boundary_point(0.0);
        assert_relative_eq!(p[0], 1.5, epsilon = 1e-12);
        assert!(p[1].abs() < 1e-12);
        assert_relative_eq!(e.curvature(0.0), 1.5, epsilon = 1e-10);
    }

    #[test]
    fn invalid_perturbed_disk_rejected() {
        // h + h'' = 1 - 1.5 cos(2 theta) changes sign (value -0.5 at theta = 0)
        let err = ConvexDomain::perturbed_disk(1.0, 0.5, 2).unwrap_err();
        match err {
            Error::NotUniformlyConvex { value, .. } => assert!(value <= -0.49),
            other => panic!("expected convexity rejection, got {other}"),
        }
    }

    #[test]
    fn valid_perturbed_disk_accepted() {
        let d = ConvexDomain::perturbed_disk(1.0, 0.1, 3).unwrap();
        assert!(d.radius_of_curvature(0.0) > 0.0);
        // a 1-harmonic perturbation is a pure translation: recentering removes it
        let e = ConvexDomain::perturbed_disk(1.0, 0.3, 1).unwrap();
        assert_relative_eq!(e.support(0.0), 1.0);
    }

    #[test]
    fn disk_summary_closed_forms() {
        let s = ConvexDomain::disk(1.0).unwrap().summary();
        assert_relative_eq!(s.diameter, 2.0, epsilon = 1e-10);
        assert_relative_eq!(s.kappa_min, 1.0, epsilon = 1e-10);
        assert_relative_eq!(s.kappa_max, 1.0, epsilon = 1e-10);
        assert_relative_eq!(s.inradius, 1.0, epsilon = 1e-8);
        assert_relative_eq!(s.delta_m[&2], 1.0, epsilon = 1e-10);
        // circle graph: phi = x^2/2 + x^4/8, so delta_3 = 1, delta_4 = 4
        assert_relative_eq!(s.delta_m[&3], 1.0, epsilon = 1e-9);
        assert_relative_eq!(s.delta_m[&4], 4.0, epsilon = 1e-9);

        let s2 = ConvexDomain::disk(2.0).unwrap().summary();
        assert_relative_eq!(s2.delta_m[&2], 0.5, epsilon = 1e-10);
    }

    #[test]
    fn ellipse_summary_closed_forms() {
        let s = ConvexDomain::ellipse(1.5, 1.0).unwrap().summary();
        assert_relative_eq!(s.diameter, 3.0, epsilon = 1e-9);
        assert_relative_eq!(s.kappa_min, 1.0 / 2.25, epsilon = 1e-8);
        assert_relative_eq!(s.kappa_max, 1.5, epsilon = 1e-8);
        assert_relative_eq!(s.inradius, 1.0, epsilon = 1e-6);
        assert_relative_eq!(s.interior_sphere_radius, 1.0 / 1.5, epsilon = 1e-8);
        assert_relative_eq!(s.delta_m[&2], s.kappa_max, epsilon = 1e-8);
        assert!(s.delta_m[&2] <= s.delta_m[&3] && s.delta_m[&3] <= s.delta_m[&4]);
    }

    #[test]
    fn curvature_matches_finite_differences() {
        let e = ConvexDomain::ellipse(1.5, 1.0).unwrap();
        let dt = 1e-3;
        for j in 0..64 {
            let theta = 2.0 * PI * j as f64 / 64.0;
            let pm = e.boundary_point(theta - dt);
            let p0 = e.boundary_point(theta);
            let pp = e.boundary_point(theta + dt);
            let d1 = [(pp[0] - pm[0]) / (2.0 * dt), (pp[1] - pm[1]) / (2.0 * dt)];
            let d2 = [
                (pp[0] - 2.0 * p0[0] + pm[0]) / (dt * dt),
                (pp[1] - 2.0 * p0[1] + pm[1]) / (dt * dt),
            ];
            let cross = d1[0] * d2[1] - d1[1] * d2[0];
            let speed = (d1[0] * d1[0] + d1[1] * d1[1]).sqrt();
            let kappa_fd = cross / (speed * speed * speed);
            assert_relative_eq!(kappa_fd, e.curvature(theta), max_relative = 1e-6);
        }
    }

    #[test]
    fn minkowski_family_endpoints_and_midpoint() {
        let e = ConvexDomain::ellipse(1.5, 1.0).unwrap();
        let fam = DeformationFamily::new(e.clone(), 5).unwrap();
        assert_relative_eq!(fam.ball_radius(), 2.25, epsilon = 1e-8);

        let k0 = fam.member(0.0).unwrap();
        assert_eq!(k0.max_order(), 0);
        assert_relative_eq!(k0.support(1.0), fam.ball_radius(), epsilon = 1e-12);

        let k1 = fam.member(1.0).unwrap();
        assert_eq!(&k1, &e);

        // h_t(0) = 0.5 / kappa_min + 0.5 * 1.5 = 1.875
        let km = fam.member(0.5).unwrap();
        assert_relative_eq!(km.support(0.0), 1.875, epsilon = 1e-8);
    }

    #[test]
    fn deformation_regularity_is_uniform() {
        let e = ConvexDomain::ellipse(1.5, 1.0).unwrap();
        let fam = DeformationFamily::new(e.clone(), 9).unwrap();
        let s_target = e.summary();
        let s_ball = fam.member(0.0).unwrap().summary();
        let d2_cap = s_ball.delta_m[&2].max(s_target.delta_m[&2]);
        let kmin_floor = s_ball.kappa_min.min(s_target.kappa_min);
        for &t in fam.t_grid() {
            let s = fam.member(t).unwrap().summary();
            assert!(s.delta_m[&2] <= d2_cap + 1e-9, "t = {t}");
            assert!(s.kappa_min >= kmin_floor - 1e-9, "t = {t}");
        }
    }

    #[test]
    fn arclength_inversion_roundtrip() {
        let e = ConvexDomain::ellipse(1.5, 1.0).unwrap();
        let p = e.perimeter();
        for i in 0..20 {
            let s = p * i as f64 / 20.0;
            let theta = e.theta_at_arclength(s);
            assert_relative_eq!(e.arclength(theta), s, epsilon = 1e-10 * p);
        }
    }

    #[test]
    fn boundary_distance_on_disk_is_radial() {
        let d = ConvexDomain::disk(1.0).unwrap();
        for (p, expect) in [
            ([0.0, 0.0], 1.0),
            ([0.5, 0.0], 0.5),
            ([0.3, -0.4], 0.5),
            ([0.0, 0.99], 0.01),
        ] {
            assert_relative_eq!(d.boundary_distance(p), expect, epsilon = 1e-9);
        }
    }

    #[test]
    fn boundary_sample_needs_16_points() {
        let d = ConvexDomain::disk(1.0).unwrap();
        assert!(d.boundary_sample(8).is_err());
        assert_eq!(d.boundary_sample(16).unwrap().len(), 16);
    }

    proptest! {
        // Support identity <x(theta), nu(theta)> = h(theta).
        #[test]
        fn support_identity(theta in 0.0f64..(2.0 * PI),
                            eps in -0.15f64..0.15, k in 2u32..6) {
            let d = ConvexDomain::perturbed_disk(1.0, eps * 0.9 / ((k * k - 1) as f64), k).unwrap();
            let s = d.sample_at(theta);
            let dot = s.point[0] * s.normal[0] + s.point[1] * s.normal[1];
            prop_assert!((dot - d.support(theta)).abs() < 1e-12);
        }

        // Minkowski members stay uniformly convex across t.
        #[test]
        fn family_members_valid(t in 0.0f64..=1.0) {
            let e = ConvexDomain::ellipse(1.8, 0.9).unwrap();
            let fam = DeformationFamily::new(e, 3).unwrap();
            let m = fam.member(t).unwrap();
            for j in 0..64 {
                let theta = 2.0 * PI * j as f64 / 64.0;
                prop_assert!(m.radius_of_curvature(theta) > 0.0);
            }
        }
    }
}
