//! Explicit spectral and gradient bounds evaluated against measured solver
//! quantities: eigenvalue and ground-state closeness constants, the Robin
//! fundamental gap lower bound, Bandle's torsion gradient bound, the
//! hot-spot location floor, and the Harnack-chain boundary gradient bound
//! with its calibration of unexhibited dimensional constants.
//!
//! Everything here works in N = 2; the extension-field norm is never
//! assembled, only its closed upper bound 1 + 2 sqrt(N) kappa_max is used.

use crate::error::{Error, Result};
use crate::geometry::GeometrySummary;
use crate::solver::{
    assemble, boundary_gradient_min, field_distance, hotspot, FieldNorm,
};
use crate::special;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

/// Universal hot-spot constant as printed: dist(argmax u^D, boundary) is at
/// least sqrt(theta / lambda^D(B_1^N)) times the inradius.
pub const HOTSPOT_THETA: f64 = 0.0833;

const SQRT_N: f64 = std::f64::consts::SQRT_2; // N = 2

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    /// lhs >= rhs
    GreaterEq,
    /// lhs <= rhs
    LessEq,
}

/// One evaluated bound: the measured left-hand side, the evaluated
/// right-hand side, and the verdict with a -1e-9 relative slack.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub direction: BoundDirection,
    pub pass: bool,
    /// A lower bound whose right-hand side is negative holds trivially.
    pub vacuous: bool,
    /// Rows backed by a theorem must pass on every shipped domain; a
    /// failure indicates a solver or geometry bug, not a sharp inequality.
    pub theorem_backed: bool,
    pub inputs: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn check(
        name: impl Into<String>,
        lhs: f64,
        direction: BoundDirection,
        rhs: f64,
        scale: f64,
        theorem_backed: bool,
        inputs: BTreeMap<String, f64>,
    ) -> BoundReport {
        let slack = match direction {
            BoundDirection::GreaterEq => lhs - rhs,
            BoundDirection::LessEq => rhs - lhs,
        };
        let tol = 1e-9 * scale.max(lhs.abs()).max(rhs.abs());
        let vacuous = direction == BoundDirection::GreaterEq && rhs < 0.0;
        BoundReport {
            name: name.into(),
            lhs,
            rhs,
            direction,
            pass: slack >= -tol,
            vacuous,
            theorem_backed,
            inputs,
        }
    }
}

/// Closed upper bound for the W^{1,inf} norm of an extension of the outer
/// normal field: 1 + 2 sqrt(N) kappa_max.
pub fn b_norm_upper(kappa_max: f64) -> f64 {
    1.0 + 2.0 * SQRT_N * kappa_max
}

/// Eigenvalue closeness constant: |lambda_k^beta - lambda_k^D| <= Lambda_k / beta
/// with Lambda_k = sqrt(6) ||b|| (lambda_k^D + 1)^2.
pub fn closeness_lambda_k(kappa_max: f64, lambda_k_d: f64) -> f64 {
    6.0f64.sqrt() * b_norm_upper(kappa_max) * (lambda_k_d + 1.0).powi(2)
}

/// Ground-state L2 closeness constant:
/// ||u^beta - u^D||_L2 <= Lambda / beta with
/// Lambda = (4 sqrt(3) d^2 / (3 pi^2)) ||b||.
pub fn closeness_lambda(kappa_max: f64, diameter: f64) -> f64 {
    4.0 * 3.0f64.sqrt() * diameter * diameter / (3.0 * PI * PI) * b_norm_upper(kappa_max)
}

/// Robin fundamental gap lower bound:
/// lambda_2^beta - lambda_1^beta >= 3 pi^2 / d^2
///   - (1/beta) sqrt(6) (1 + 2 sqrt(N) kappa_max) (lambda_2^D + 1)^2.
/// May be negative (vacuous) at small beta.
pub fn gap_lower_bound(diameter: f64, kappa_max: f64, beta: f64, lambda2_d: f64) -> f64 {
    3.0 * PI * PI / (diameter * diameter) - closeness_lambda_k(kappa_max, lambda2_d) / beta
}

/// Bandle's bound: the Dirichlet torsion gradient on the boundary is at
/// least (N kappa_max)^{-1}.
pub fn bandle_bound(kappa_max: f64) -> f64 {
    1.0 / (2.0 * kappa_max)
}

/// Hot-spot and Harnack-chain geometry: C0, sigma, and the hot-spot floor
/// C0 * r. lambda^D of the unit disk comes from the Bessel oracle, never
/// from a mesh.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct JerisonQuantities {
    pub c0: f64,
    pub sigma: f64,
    pub hotspot_floor: f64,
}

pub fn jerison_quantities(summary: &GeometrySummary) -> JerisonQuantities {
    let c0 = (HOTSPOT_THETA / special::DISK_LAMBDA1_D).sqrt();
    let rho = summary.interior_sphere_radius;
    let sigma = (0.5 * rho).min(c0 * summary.inradius);
    JerisonQuantities {
        c0,
        sigma,
        hotspot_floor: c0 * summary.inradius,
    }
}

/// Exponent e = d (sqrt(lambda^D)/2 + 2 sqrt(N)/sigma) of the Harnack-chain
/// gradient bound; monotone increasing in d and lambda, decreasing in sigma.
pub fn jerison_exponent(diameter: f64, lambda1_d: f64, sigma: f64) -> f64 {
    diameter * (lambda1_d.sqrt() / 2.0 + 2.0 * SQRT_N / sigma)
}

/// min_boundary |grad u^D| >= (C2 / rho) (max u) C1^{-e}; C1 > 1 and C2 > 0
/// are configuration inputs (calibrated, never hard-coded guesses).
pub fn jerison_bound(
    summary: &GeometrySummary,
    lambda1_d: f64,
    max_u: f64,
    c1: f64,
    c2: f64,
) -> f64 {
    let q = jerison_quantities(summary);
    let e = jerison_exponent(summary.diameter, lambda1_d, q.sigma);
    c2 / summary.interior_sphere_radius * max_u * c1.powf(-e)
}

/// One measured domain for the calibration of (C1, C2).
#[derive(Clone, Debug)]
pub struct JerisonMeasurement {
    pub label: String,
    pub rho: f64,
    pub exponent: f64,
    pub max_u: f64,
    /// Measured min over the boundary of |grad u^D|.
    pub observed: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Calibration {
    pub c1: f64,
    pub c2: f64,
    pub binding: String,
}

/// Smallest admissible C1 (1 + 1e-6) and the largest C2 that keeps the
/// gradient bound valid across all measurements; reports the binding domain.
pub fn calibrate_constants(measurements: &[JerisonMeasurement]) -> Result<Calibration> {
    if measurements.is_empty() {
        return Err(Error::invalid_param("measurements", "must not be empty"));
    }
    let c1: f64 = 1.0 + 1e-6;
    let mut best = f64::INFINITY;
    let mut binding = String::new();
    for m in measurements {
        let c2 = m.observed * m.rho * c1.powf(m.exponent) / m.max_u;
        if c2 < best {
            best = c2;
            binding = m.label.clone();
        }
    }
    Ok(Calibration {
        c1,
        c2: best,
        binding,
    })
}

/// Least-squares fit of log(error) against log(beta).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Points dropped because the error was zero or negative.
    pub excluded: usize,
}

impl RateFit {
    /// exp(intercept): the empirical constant M in error = M / beta when
    /// the slope sits near -1.
    pub fn empirical_constant(&self) -> f64 {
        self.intercept.exp()
    }
}

pub fn rate_fit(trace: &[(f64, f64)]) -> Result<RateFit> {
    let usable: Vec<(f64, f64)> = trace
        .iter()
        .filter(|(b, e)| *b > 0.0 && *e > 0.0 && b.is_finite() && e.is_finite())
        .map(|&(b, e)| (b.ln(), e.ln()))
        .collect();
    let excluded = trace.len() - usable.len();
    if usable.len() < 5 {
        return Err(Error::invalid_param(
            "trace",
            format!("need at least 5 positive points, have {}", usable.len()),
        ));
    }
    let n = usable.len() as f64;
    let mean_x = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = usable.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = usable
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        excluded,
    })
}

/// The full theorem-backed audit battery for one domain: eigenvalue order
/// and closeness, ground-state L2 closeness, the Robin gap bound, torsion
/// ordering (per beta), plus Bandle's bound and the hot-spot floor (once).
pub fn audit_domain(
    domain: &crate::geometry::ConvexDomain,
    betas: &[f64],
    h: f64,
) -> Result<Vec<BoundReport>> {
    if betas.iter().any(|&b| !(b > 0.0)) {
        return Err(Error::invalid_param("betas", "must be positive"));
    }
    let summary = domain.summary();
    let mesh = Arc::new(crate::mesh::triangulate(domain, h)?);
    let system = assemble(Arc::clone(&mesh));

    let dir_eig = system.solve_dirichlet_eig(2)?;
    let (lam1_d, lam2_d) = (dir_eig.eigenvalues[0], dir_eig.eigenvalues[1]);
    let dir_tor = system.solve_dirichlet_torsion()?;
    let p_measured = boundary_gradient_min(&dir_tor)?;
    let (_, hotspot_dist) = hotspot(&dir_eig);
    let jq = jerison_quantities(&summary);

    let base_inputs = |beta: Option<f64>| -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        m.insert("N".into(), 2.0);
        m.insert("d".into(), summary.diameter);
        m.insert("r".into(), summary.inradius);
        m.insert("rho".into(), summary.interior_sphere_radius);
        m.insert("kappa_max".into(), summary.kappa_max);
        m.insert("lambda1_D".into(), lam1_d);
        m.insert("lambda2_D".into(), lam2_d);
        m.insert("sigma".into(), jq.sigma);
        m.insert("C0".into(), jq.c0);
        if let Some(b) = beta {
            m.insert("beta".into(), b);
        }
        m
    };

    let mut reports = Vec::new();
    // Domains whose boundary curvature is constant sit exactly on the
    // equality case of Bandle's bound, so the one-sided O(h) bias of the
    // recovered minimum needs a mesh-scaled measurement allowance; the
    // observed deficit on disks is ~0.2 h kappa.
    let bandle = bandle_bound(summary.kappa_max);
    let meas_tol = (0.5 * h * summary.kappa_max).min(0.1);
    let mut bandle_inputs = base_inputs(None);
    bandle_inputs.insert("bandle_exact".into(), bandle);
    bandle_inputs.insert("measurement_tolerance".into(), meas_tol);
    reports.push(BoundReport::check(
        "bandle_torsion_gradient",
        p_measured,
        BoundDirection::GreaterEq,
        bandle * (1.0 - meas_tol),
        p_measured,
        true,
        bandle_inputs,
    ));
    reports.push(BoundReport::check(
        "hotspot_floor",
        hotspot_dist,
        BoundDirection::GreaterEq,
        jq.hotspot_floor,
        summary.inradius,
        true,
        base_inputs(None),
    ));

    for &beta in betas {
        let rob_eig = system.solve_robin_eig(beta, 2)?;
        let (lam1_b, lam2_b) = (rob_eig.eigenvalues[0], rob_eig.eigenvalues[1]);
        let inputs = base_inputs(Some(beta));
        for (k, (ld, lb)) in [(1usize, (lam1_d, lam1_b)), (2, (lam2_d, lam2_b))] {
            reports.push(BoundReport::check(
                format!("lambda{k}_robin_below_dirichlet@beta={beta}"),
                ld - lb,
                BoundDirection::GreaterEq,
                0.0,
                ld,
                true,
                inputs.clone(),
            ));
            reports.push(BoundReport::check(
                format!("lambda{k}_closeness@beta={beta}"),
                ld - lb,
                BoundDirection::LessEq,
                closeness_lambda_k(summary.kappa_max, ld) / beta,
                ld,
                true,
                inputs.clone(),
            ));
        }
        let l2 = field_distance(&rob_eig, &dir_eig, FieldNorm::L2)?;
        reports.push(BoundReport::check(
            format!("ground_state_l2_closeness@beta={beta}"),
            l2,
            BoundDirection::LessEq,
            closeness_lambda(summary.kappa_max, summary.diameter) / beta,
            1.0,
            true,
            inputs.clone(),
        ));
        reports.push(BoundReport::check(
            format!("robin_fundamental_gap@beta={beta}"),
            lam2_b - lam1_b,
            BoundDirection::GreaterEq,
            gap_lower_bound(summary.diameter, summary.kappa_max, beta, lam2_d),
            lam2_d,
            true,
            inputs.clone(),
        ));
        let rob_tor = system.solve_robin_torsion(beta)?;
        let min_gap = rob_tor
            .field
            .iter()
            .zip(&dir_tor.field)
            .map(|(r, d)| r - d)
            .fold(f64::INFINITY, f64::min);
        let tor_scale = dir_tor.field.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        reports.push(BoundReport::check(
            format!("torsion_dirichlet_below_robin@beta={beta}"),
            min_gap,
            BoundDirection::GreaterEq,
            0.0,
            tor_scale,
            true,
            inputs,
        ));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexDomain;
    use approx::assert_relative_eq;

    #[test]
    fn b_norm_closed_values() {
        assert_relative_eq!(b_norm_upper(1.0), 1.0 + 2.0 * 2.0f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(b_norm_upper(1.5), 1.0 + 3.0 * 2.0f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(b_norm_upper(0.0), 1.0);
    }

    #[test]
    fn closeness_constants_on_the_disk() {
        // Lambda_1 = sqrt(6) (1 + 2 sqrt 2) (lambda_1^D + 1)^2 ~ 431.5
        let l1 = closeness_lambda_k(1.0, special::DISK_LAMBDA1_D);
        assert_relative_eq!(l1, 431.48, max_relative = 1e-4);
        // Lambda = (4 sqrt 3 * 4 / (3 pi^2)) (1 + 2 sqrt 2) ~ 3.583
        let l = closeness_lambda(1.0, 2.0);
        assert_relative_eq!(l, 3.5833, max_relative = 1e-4);
    }

    #[test]
    fn formula_monotonicities() {
        // Lambda increasing in d and kappa_max
        assert!(closeness_lambda(1.0, 2.2) > closeness_lambda(1.0, 2.0));
        assert!(closeness_lambda(1.2, 2.0) > closeness_lambda(1.0, 2.0));
        // Lambda scales like d^2 at fixed ||b||
        assert_relative_eq!(
            closeness_lambda(1.0, 4.0) / closeness_lambda(1.0, 2.0),
            4.0,
            epsilon = 1e-12
        );
        // gap bound decreasing in d
        assert!(
            gap_lower_bound(2.2, 1.0, 1e3, 14.7) < gap_lower_bound(2.0, 1.0, 1e3, 14.7)
        );
        // exponent: up in d and lambda, down in sigma
        assert!(jerison_exponent(2.2, 5.8, 0.12) > jerison_exponent(2.0, 5.8, 0.12));
        assert!(jerison_exponent(2.0, 6.8, 0.12) > jerison_exponent(2.0, 5.8, 0.12));
        assert!(jerison_exponent(2.0, 5.8, 0.2) < jerison_exponent(2.0, 5.8, 0.12));
        // bandle halves when kappa_max doubles
        assert_relative_eq!(bandle_bound(2.0), 0.5 * bandle_bound(1.0), epsilon = 1e-14);
    }

    #[test]
    fn gap_bound_limits_on_disk() {
        // beta -> infinity limit: 3 pi^2 / 4
        let large = gap_lower_bound(2.0, 1.0, 1e12, special::DISK_LAMBDA2_D);
        assert_relative_eq!(large, 3.0 * PI * PI / 4.0, max_relative = 1e-9);
        // beta = 1 is vacuous
        assert!(gap_lower_bound(2.0, 1.0, 1.0, special::DISK_LAMBDA2_D) < 0.0);
    }

    #[test]
    fn jerison_disk_values() {
        let summary = ConvexDomain::disk(1.0).unwrap().summary();
        let q = jerison_quantities(&summary);
        assert_relative_eq!(q.c0, 0.120_016, max_relative = 1e-4);
        // sigma = min(rho/2, C0 r) = C0 on the unit disk
        assert_relative_eq!(q.sigma, q.c0, max_relative = 1e-9);
        assert_relative_eq!(q.hotspot_floor, q.c0, max_relative = 1e-9);
        let e = jerison_exponent(summary.diameter, special::DISK_LAMBDA1_D, q.sigma);
        // 2 (sqrt(5.7832)/2 + 2 sqrt 2 / 0.12002) ~ 49.5
        assert_relative_eq!(e, 49.54, max_relative = 1e-3);
    }

    #[test]
    fn calibration_binds_on_the_worst_domain() {
        let ms = vec![
            JerisonMeasurement {
                label: "disk".into(),
                rho: 1.0,
                exponent: 49.5,
                max_u: 1.0,
                observed: 1.36,
            },
            JerisonMeasurement {
                label: "ellipse".into(),
                rho: 0.66,
                exponent: 80.0,
                max_u: 1.0,
                observed: 1.0,
            },
        ];
        let cal = calibrate_constants(&ms).unwrap();
        assert!(cal.c1 > 1.0);
        // the bound holds with nonnegative margin on both measurements
        for m in &ms {
            let bound = cal.c2 / m.rho * m.max_u * cal.c1.powf(-m.exponent);
            assert!(m.observed >= bound - 1e-12);
        }
    }

    #[test]
    fn rate_fit_recovers_exact_law() {
        // error = 3 / beta
        let trace: Vec<(f64, f64)> = (0..7).map(|j| {
            let b = 10.0 * 2f64.powi(j);
            (b, 3.0 / b)
        }).collect();
        let fit = rate_fit(&trace).unwrap();
        assert_relative_eq!(fit.slope, -1.0, epsilon = 1e-12);
        assert_relative_eq!(fit.empirical_constant(), 3.0, epsilon = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        assert_eq!(fit.excluded, 0);
    }

    #[test]
    fn rate_fit_excludes_nonpositive_errors() {
        let mut trace: Vec<(f64, f64)> = (0..6).map(|j| {
            let b = 10.0 * 2f64.powi(j);
            (b, 3.0 / b)
        }).collect();
        trace.push((1280.0, 0.0));
        let fit = rate_fit(&trace).unwrap();
        assert_eq!(fit.excluded, 1);
        assert!(rate_fit(&trace[..4]).is_err());
    }

    #[test]
    fn bound_report_slack_rules() {
        let r = BoundReport::check(
            "x",
            1.0 - 1e-12,
            BoundDirection::GreaterEq,
            1.0,
            1.0,
            true,
            BTreeMap::new(),
        );
        assert!(r.pass, "tiny violations inside the slack pass");
        let r = BoundReport::check(
            "x",
            0.9,
            BoundDirection::GreaterEq,
            1.0,
            1.0,
            true,
            BTreeMap::new(),
        );
        assert!(!r.pass);
        let r = BoundReport::check(
            "x",
            5.0,
            BoundDirection::GreaterEq,
            -2.0,
            1.0,
            true,
            BTreeMap::new(),
        );
        assert!(r.pass && r.vacuous);
    }

    #[test]
    fn disk_audit_all_theorem_rows_pass() {
        let disk = ConvexDomain::disk(1.0).unwrap();
        let reports = audit_domain(&disk, &[10.0, 100.0], 0.08).unwrap();
        for r in &reports {
            assert!(r.pass, "{} failed: lhs={} rhs={}", r.name, r.lhs, r.rhs);
            assert!(r.theorem_backed);
        }
        // the battery covers both beta-independent and per-beta rows
        assert!(reports.iter().any(|r| r.name == "bandle_torsion_gradient"));
        assert!(reports.iter().any(|r| r.name.starts_with("robin_fundamental_gap")));
    }
}
