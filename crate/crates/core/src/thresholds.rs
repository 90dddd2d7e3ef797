//! Empirical concavity thresholds in the Robin parameter.
//!
//! The predicate runs the full pipeline (mesh, solve, transform, Hessian
//! recovery, positive-definiteness report) for one (domain, beta, kind).
//! `bisect_threshold` brackets the smallest passing beta by geometric
//! bisection, never assuming the pass set is an up-set: a pass below a fail
//! is reported as a non-monotone outcome with both witnesses.
//! `continuity_sweep` evaluates the predicate along the Minkowski
//! deformation family at fixed beta, the discrete analogue of requiring a
//! threshold uniform in the deformation parameter.

use crate::concavity::{
    concavity_report, estimate_gradient_hessian, transform, ConcavityReport, ConcavityVerdict,
    TransformKind,
};
use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, DeformationFamily};
use crate::mesh::triangulate;
use crate::solver::assemble;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// One predicate evaluation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PredicateOutcome {
    pub pass: bool,
    pub lambda1: Option<f64>,
    pub report: ConcavityReport,
}

/// Full pipeline evaluation of the concavity predicate: the ground state is
/// tested for log-concavity (`NegLog`), the torsion function for
/// 1/2-concavity (`NegSqrt`); pass means the global minimum Hessian
/// eigenvalue of the transformed field clears sigma_tol.
pub fn concavity_predicate(
    domain: &ConvexDomain,
    beta: f64,
    kind: TransformKind,
    h: f64,
    sigma_tol: Option<f64>,
) -> Result<PredicateOutcome> {
    if !(beta > 0.0) {
        return Err(Error::invalid_param("beta", "must be positive"));
    }
    let mesh = Arc::new(triangulate(domain, h)?);
    let system = assemble(Arc::clone(&mesh));
    predicate_on_system(&system, beta, kind, sigma_tol)
}

/// Same predicate on an already assembled system (reused across a beta
/// sweep so every evaluation sees the identical mesh).
pub fn predicate_on_system(
    system: &crate::solver::FemSystem,
    beta: f64,
    kind: TransformKind,
    sigma_tol: Option<f64>,
) -> Result<PredicateOutcome> {
    let mesh = &system.mesh;
    let (solution, lambda1) = match kind {
        TransformKind::NegLog => {
            let s = system.solve_robin_eig(beta, 1)?;
            let l = s.eigenvalues[0];
            (s, Some(l))
        }
        TransformKind::NegSqrt => (system.solve_robin_torsion(beta)?, None),
    };
    let field = transform(&solution, kind)?;
    let hess = estimate_gradient_hessian(mesh, &field);
    let tube_width = default_tube_width(mesh);
    let report = concavity_report(&hess, mesh, kind, beta, tube_width, sigma_tol)?;
    Ok(PredicateOutcome {
        pass: report.verdict == ConcavityVerdict::StrictlyConvex,
        lambda1,
        report,
    })
}

/// Default boundary tube: a quarter of the interior-sphere radius, a fixed
/// geometric fraction so runs are comparable across a deformation family.
fn default_tube_width(mesh: &crate::mesh::Mesh) -> f64 {
    let summary_rho = {
        let roc = |theta: f64| mesh.domain.radius_of_curvature(theta);
        let mut min = f64::INFINITY;
        for j in 0..1024 {
            min = min.min(roc(2.0 * std::f64::consts::PI * j as f64 / 1024.0));
        }
        min
    };
    0.25 * summary_rho
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TracePoint {
    pub beta: f64,
    pub min_eig_global: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ThresholdOutcome {
    /// beta_lo fails, beta_hi passes, ratio within the requested factor.
    Bracket { beta_lo: f64, beta_hi: f64 },
    /// The predicate already passes at the bottom of the search range:
    /// bracket (0, beta_min].
    AllPass { beta_min: f64 },
    /// The predicate still fails at the top of the search range.
    AllFail { beta_max: f64 },
    /// A pass was observed below a fail; bisection is not trusted.
    NonMonotone { beta_pass: f64, beta_fail: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub kind: TransformKind,
    pub outcome: ThresholdOutcome,
    pub trace: Vec<TracePoint>,
    pub mesh_h: f64,
    pub sigma_tol: f64,
}

/// Geometric bisection of the concavity threshold over
/// [beta_range.0, beta_range.1], stopping when beta_hi / beta_lo is at most
/// `tol_factor`. Both endpoints are always evaluated so a non-monotone pair
/// (pass below fail) is witnessed instead of silently bisected.
pub fn bisect_threshold(
    domain: &ConvexDomain,
    kind: TransformKind,
    beta_range: (f64, f64),
    tol_factor: f64,
    h: f64,
    sigma_tol: Option<f64>,
) -> Result<ThresholdResult> {
    let (beta_min, beta_max) = beta_range;
    if !(beta_min > 0.0) || !(beta_max > beta_min) {
        return Err(Error::invalid_param(
            "beta_range",
            "need 0 < beta_min < beta_max",
        ));
    }
    if beta_max / beta_min < 4.0 {
        return Err(Error::invalid_param(
            "beta_range",
            "range must span at least a factor of 4",
        ));
    }
    if !(tol_factor > 1.0) {
        return Err(Error::invalid_param("tol_factor", "must exceed 1"));
    }

    let mesh = Arc::new(triangulate(domain, h)?);
    let system = assemble(Arc::clone(&mesh));
    let mut trace: Vec<TracePoint> = Vec::new();
    let eval = |beta: f64, trace: &mut Vec<TracePoint>| -> Result<(bool, f64)> {
        let out = predicate_on_system(&system, beta, kind, sigma_tol)?;
        trace.push(TracePoint {
            beta,
            min_eig_global: out.report.min_eig_global,
            pass: out.pass,
        });
        Ok((out.pass, out.report.sigma_tol))
    };

    let (pass_min, sigma_used) = eval(beta_min, &mut trace)?;
    let (pass_max, _) = eval(beta_max, &mut trace)?;
    let outcome = match (pass_min, pass_max) {
        (true, true) => ThresholdOutcome::AllPass { beta_min },
        (true, false) => ThresholdOutcome::NonMonotone {
            beta_pass: beta_min,
            beta_fail: beta_max,
        },
        (false, false) => ThresholdOutcome::AllFail { beta_max },
        (false, true) => {
            let mut lo = beta_min;
            let mut hi = beta_max;
            while hi / lo > tol_factor {
                let mid = (lo * hi).sqrt();
                let (pass, _) = eval(mid, &mut trace)?;
                if pass {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            ThresholdOutcome::Bracket {
                beta_lo: lo,
                beta_hi: hi,
            }
        }
    };
    trace.sort_by(|a, b| a.beta.total_cmp(&b.beta));
    Ok(ThresholdResult {
        kind,
        outcome,
        trace,
        mesh_h: h,
        sigma_tol: sigma_used,
    })
}

/// Upper edge of the measured threshold: beta_hi of a bracket, beta_min of
/// an all-pass run.
pub fn threshold_upper_edge(result: &ThresholdResult) -> Option<f64> {
    match result.outcome {
        ThresholdOutcome::Bracket { beta_hi, .. } => Some(beta_hi),
        ThresholdOutcome::AllPass { beta_min } => Some(beta_min),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshStability {
    Stable,
    MeshSensitive,
}

/// Compare threshold results at two resolutions: brackets must overlap or
/// sit within 20% geometrically; matching all-pass/all-fail outcomes agree
/// trivially.
pub fn mesh_stability(a: &ThresholdResult, b: &ThresholdResult) -> MeshStability {
    use ThresholdOutcome::*;
    match (&a.outcome, &b.outcome) {
        (AllPass { .. }, AllPass { .. }) | (AllFail { .. }, AllFail { .. }) => {
            MeshStability::Stable
        }
        (
            Bracket {
                beta_lo: lo_a,
                beta_hi: hi_a,
            },
            Bracket {
                beta_lo: lo_b,
                beta_hi: hi_b,
            },
        ) => {
            let overlap = lo_a.max(*lo_b) <= hi_a.min(*hi_b);
            let mid_a = (lo_a * hi_a).sqrt();
            let mid_b = (lo_b * hi_b).sqrt();
            let ratio = (mid_a / mid_b).max(mid_b / mid_a);
            if overlap || ratio <= 1.2 {
                MeshStability::Stable
            } else {
                MeshStability::MeshSensitive
            }
        }
        _ => MeshStability::MeshSensitive,
    }
}

/// Per-member outcome of a deformation sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepEntry {
    pub t: f64,
    pub pass: bool,
    pub report: Option<ConcavityReport>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepResult {
    pub kind: TransformKind,
    pub beta: f64,
    pub mesh_h: f64,
    pub entries: Vec<SweepEntry>,
    pub uniform_pass: bool,
}

/// Evaluate the predicate on the Minkowski members K_t for t on a uniform
/// grid including both endpoints, at fixed beta. Per-member failures (and
/// solver errors) are recorded and the sweep continues.
pub fn continuity_sweep(
    domain: &ConvexDomain,
    beta: f64,
    kind: TransformKind,
    n_t: usize,
    h: f64,
    sigma_tol: Option<f64>,
) -> Result<SweepResult> {
    if n_t < 5 {
        return Err(Error::invalid_param("n_t", "need at least 5 grid points"));
    }
    let family = DeformationFamily::new(domain.clone(), n_t)?;
    let entries: Vec<SweepEntry> = family
        .t_grid()
        .par_iter()
        .map(|&t| {
            let run = family
                .member(t)
                .and_then(|member| concavity_predicate(&member, beta, kind, h, sigma_tol));
            match run {
                Ok(out) => SweepEntry {
                    t,
                    pass: out.pass,
                    report: Some(out.report),
                    error: None,
                },
                Err(e) => SweepEntry {
                    t,
                    pass: false,
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let uniform_pass = entries.iter().all(|e| e.pass);
    Ok(SweepResult {
        kind,
        beta,
        mesh_h: h,
        entries,
        uniform_pass,
    })
}

/// One row of a beta trace.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BetaTracePoint {
    pub beta: f64,
    pub lambda1: f64,
    pub min_eig_global: f64,
    pub min_eig_tube: f64,
    pub pass: bool,
}

/// Trace (beta, lambda_1^beta, Hessian minima) over a beta list on a single
/// shared mesh; feeds rate fits and threshold plots.
pub fn beta_sweep(
    domain: &ConvexDomain,
    kind: TransformKind,
    beta_list: &[f64],
    h: f64,
    sigma_tol: Option<f64>,
) -> Result<Vec<BetaTracePoint>> {
    if beta_list.is_empty() {
        return Err(Error::invalid_param("beta_list", "must not be empty"));
    }
    let mesh = Arc::new(triangulate(domain, h)?);
    let system = assemble(Arc::clone(&mesh));
    let mut out = Vec::with_capacity(beta_list.len());
    for &beta in beta_list {
        let pred = predicate_on_system(&system, beta, kind, sigma_tol)?;
        let lambda1 = match pred.lambda1 {
            Some(l) => l,
            None => system.solve_robin_eig(beta, 1)?.eigenvalues[0],
        };
        out.push(BetaTracePoint {
            beta,
            lambda1,
            min_eig_global: pred.report.min_eig_global,
            min_eig_tube: pred.report.min_eig_tube,
            pass: pred.pass,
        });
    }
    Ok(out)
}
