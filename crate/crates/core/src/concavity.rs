//! Concavity diagnostics: field transforms (-log u, -sqrt u), local
//! quadratic least-squares recovery of gradients and Hessians, the Hessian
//! quadratic-form identity linking u and its transform, positive
//! definiteness reports over the domain and over boundary tubes, and the
//! tangential second-derivative identity u_tt = -|grad u| kappa on the
//! boundary of Dirichlet solutions.

use crate::dense::{eig_sym2, solve_spd_small};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::solver::Solution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    NegLog,
    NegSqrt,
}

impl TransformKind {
    pub fn apply(self, u: f64) -> f64 {
        match self {
            TransformKind::NegLog => -u.ln(),
            TransformKind::NegSqrt => -u.sqrt(),
        }
    }

    pub fn invert(self, v: f64) -> f64 {
        match self {
            TransformKind::NegLog => (-v).exp(),
            TransformKind::NegSqrt => v * v,
        }
    }
}

/// A per-vertex field defined on a subset of the mesh.
#[derive(Clone, Debug)]
pub struct MaskedField {
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl MaskedField {
    pub fn full(values: Vec<f64>) -> MaskedField {
        let mask = vec![true; values.len()];
        MaskedField { values, mask }
    }
}

/// Pointwise -log u or -sqrt u with its domain-of-validity mask. Robin
/// solutions are positive up to the boundary (Hopf) and keep every vertex;
/// Dirichlet inputs exclude the ring at boundary distance <= 2h where the
/// transform degenerates.
pub fn transform(solution: &Solution, kind: TransformKind) -> Result<MaskedField> {
    let mesh = &solution.mesh;
    let mask: Vec<bool> = if solution.problem.is_dirichlet() {
        let cut = 2.0 * mesh.h_target;
        (0..mesh.n_vertices())
            .map(|v| mesh.boundary_distance[v] > cut)
            .collect()
    } else {
        vec![true; mesh.n_vertices()]
    };
    let mut values = vec![f64::NAN; mesh.n_vertices()];
    for v in 0..mesh.n_vertices() {
        if !mask[v] {
            continue;
        }
        let u = solution.field[v];
        if !(u > 0.0) {
            return Err(Error::NonPositiveField { vertex: v, value: u });
        }
        values[v] = kind.apply(u);
    }
    Ok(MaskedField { values, mask })
}

/// Per-vertex gradient and symmetric Hessian estimates from weighted local
/// quadratic fits.
#[derive(Clone, Debug)]
pub struct HessianField {
    pub gradient: Vec<[f64; 2]>,
    /// (xx, xy, yy) per vertex.
    pub hessian: Vec<[f64; 3]>,
    /// Gaussian weight bandwidth used per vertex (local edge length).
    pub fit_radius: Vec<f64>,
    /// Weighted RMS residual of the fit per vertex.
    pub fit_residual: Vec<f64>,
    /// Vertices with a successful fit (in the mask, >= 6 neighbors,
    /// well-conditioned normal equations).
    pub valid: Vec<bool>,
    /// Masked vertices whose fit was rank deficient or starved.
    pub flagged: usize,
}

impl HessianField {
    pub fn min_eigenvalue(&self, v: usize) -> f64 {
        let [xx, xy, yy] = self.hessian[v];
        eig_sym2(xx, xy, yy).0
    }

    /// Synthetic field from closed-form gradient/Hessian callbacks
    /// (test-side construction for identity checks on exact data).
    pub fn from_exact(
        mesh: &Mesh,
        mask: &[bool],
        grad: impl Fn([f64; 2]) -> [f64; 2],
        hess: impl Fn([f64; 2]) -> [f64; 3],
    ) -> HessianField {
        let n = mesh.n_vertices();
        let mut gradient = vec![[0.0; 2]; n];
        let mut hessian = vec![[0.0; 3]; n];
        for v in 0..n {
            if mask[v] {
                gradient[v] = grad(mesh.vertices[v]);
                hessian[v] = hess(mesh.vertices[v]);
            }
        }
        HessianField {
            gradient,
            hessian,
            fit_radius: vec![0.0; n],
            fit_residual: vec![0.0; n],
            valid: mask.to_vec(),
            flagged: 0,
        }
    }
}

/// Weighted least-squares fit of a full quadratic over the 2-ring
/// neighborhood of every masked vertex (Gaussian weights, bandwidth = local
/// edge length); the gradient and Hessian are read off the fit. Exact on
/// quadratic data, which is the property test backing every Hessian claim
/// downstream.
pub fn estimate_gradient_hessian(mesh: &Mesh, field: &MaskedField) -> HessianField {
    estimate_with_rings(mesh, field, 2)
}

pub fn estimate_with_rings(mesh: &Mesh, field: &MaskedField, rings: usize) -> HessianField {
    estimate_custom(mesh, field, rings, 1.0)
}

/// `bandwidth_scale` widens the Gaussian weight relative to the local edge
/// length; ring counts beyond 2 need a matching bandwidth or the outer
/// rings contribute nothing.
pub fn estimate_custom(
    mesh: &Mesh,
    field: &MaskedField,
    rings: usize,
    bandwidth_scale: f64,
) -> HessianField {
    let n = mesh.n_vertices();
    // make sure the adjacency cache exists before the parallel section
    let _ = mesh.adjacency();
    let fits: Vec<Option<VertexFit>> = (0..n)
        .into_par_iter()
        .map(|v| fit_vertex(mesh, field, v, rings, bandwidth_scale))
        .collect();

    let mut out = HessianField {
        gradient: vec![[0.0; 2]; n],
        hessian: vec![[0.0; 3]; n],
        fit_radius: vec![0.0; n],
        fit_residual: vec![0.0; n],
        valid: vec![false; n],
        flagged: 0,
    };
    for v in 0..n {
        match &fits[v] {
            Some(f) => {
                out.gradient[v] = f.gradient;
                out.hessian[v] = f.hessian;
                out.fit_radius[v] = f.radius;
                out.fit_residual[v] = f.residual;
                out.valid[v] = true;
            }
            None => {
                if field.mask[v] {
                    out.flagged += 1;
                }
            }
        }
    }
    out
}

struct VertexFit {
    gradient: [f64; 2],
    hessian: [f64; 3],
    radius: f64,
    residual: f64,
}

fn fit_vertex(
    mesh: &Mesh,
    field: &MaskedField,
    v: usize,
    rings: usize,
    bandwidth_scale: f64,
) -> Option<VertexFit> {
    if !field.mask[v] {
        return None;
    }
    // breadth-first ring collection restricted to the mask
    let mut patch: Vec<usize> = vec![v];
    let mut frontier: Vec<usize> = vec![v];
    for _ in 0..rings {
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in mesh.neighbors(u) {
                if field.mask[w] && !patch.contains(&w) {
                    patch.push(w);
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    if patch.len() < 7 {
        return None; // < 6 neighbors beside the center
    }
    let center = mesh.vertices[v];
    let ell = mesh.local_edge_length(v) * bandwidth_scale;
    // basis 1, X, Y, X^2/2, XY, Y^2/2 on coordinates scaled by ell
    let mut ata = [0.0f64; 36];
    let mut atb = [0.0f64; 6];
    let mut wsum = 0.0;
    for &u in &patch {
        let dx = (mesh.vertices[u][0] - center[0]) / ell;
        let dy = (mesh.vertices[u][1] - center[1]) / ell;
        let w = (-(dx * dx + dy * dy)).exp();
        let basis = [1.0, dx, dy, 0.5 * dx * dx, dx * dy, 0.5 * dy * dy];
        let val = field.values[u];
        for i in 0..6 {
            for j in 0..6 {
                ata[i * 6 + j] += w * basis[i] * basis[j];
            }
            atb[i] += w * basis[i] * val;
        }
        wsum += w;
    }
    let mut coeffs = atb;
    if !solve_spd_small(6, &mut ata, &mut coeffs, 1e-12) {
        return None;
    }
    // weighted RMS residual of the fit
    let mut res2 = 0.0;
    for &u in &patch {
        let dx = (mesh.vertices[u][0] - center[0]) / ell;
        let dy = (mesh.vertices[u][1] - center[1]) / ell;
        let w = (-(dx * dx + dy * dy)).exp();
        let basis = [1.0, dx, dy, 0.5 * dx * dx, dx * dy, 0.5 * dy * dy];
        let fit: f64 = (0..6).map(|i| coeffs[i] * basis[i]).sum();
        let r = fit - field.values[u];
        res2 += w * r * r;
    }
    Some(VertexFit {
        gradient: [coeffs[1] / ell, coeffs[2] / ell],
        hessian: [
            coeffs[3] / (ell * ell),
            coeffs[4] / (ell * ell),
            coeffs[5] / (ell * ell),
        ],
        radius: ell,
        residual: (res2 / wsum).sqrt(),
    })
}

/// Consistency of the derivative estimators against the Hessian identity of
/// the transformed field:
///   neg_log:  <H_v n, n> = -<H_u n, n>/u + |grad u . n|^2 / u^2
///   neg_sqrt: <H_v n, n> = -<H_u n, n>/(2 sqrt u) + |grad u . n|^2 / (4 u^(3/2))
/// evaluated on n in {e1, e2, (e1+e2)/sqrt 2}; returns the maximum relative
/// defect over vertices where both fields fit.
pub fn qform_consistency(
    u_hess: &HessianField,
    v_hess: &HessianField,
    u: &MaskedField,
    kind: TransformKind,
) -> f64 {
    let dirs = [
        [1.0, 0.0],
        [0.0, 1.0],
        [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2],
    ];
    let n = u.values.len();
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    let mut u_max = 0.0f64;
    let mut ell_min = f64::INFINITY;
    for v in 0..n {
        if !(u_hess.valid[v] && v_hess.valid[v] && u.mask[v]) {
            continue;
        }
        let uu = u.values[v];
        u_max = u_max.max(uu.abs());
        if v_hess.fit_radius[v] > 0.0 {
            ell_min = ell_min.min(v_hess.fit_radius[v]);
        }
        for d in dirs {
            let qu = quad_form(&u_hess.hessian[v], d);
            let qv = quad_form(&v_hess.hessian[v], d);
            let gu = u_hess.gradient[v][0] * d[0] + u_hess.gradient[v][1] * d[1];
            let rhs = match kind {
                TransformKind::NegLog => -qu / uu + gu * gu / (uu * uu),
                TransformKind::NegSqrt => {
                    -qu / (2.0 * uu.sqrt()) + gu * gu / (4.0 * uu.powf(1.5))
                }
            };
            pairs.push((qv, rhs));
        }
    }
    if pairs.is_empty() {
        return 0.0;
    }
    // curvature below the representable resolution of the data is zero;
    // without the floor a constant field would compare rounding noise
    // against rounding noise
    let floor = if ell_min.is_finite() {
        1e-10 * (1.0 + u_max) / (ell_min * ell_min)
    } else {
        0.0
    };
    pairs
        .iter()
        .map(|&(lhs, rhs)| {
            let denom = lhs.abs().max(rhs.abs());
            if denom <= floor {
                0.0
            } else {
                (lhs - rhs).abs() / denom
            }
        })
        .fold(0.0f64, f64::max)
}

fn quad_form(h: &[f64; 3], d: [f64; 2]) -> f64 {
    h[0] * d[0] * d[0] + 2.0 * h[1] * d[0] * d[1] + h[2] * d[1] * d[1]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcavityVerdict {
    StrictlyConvex,
    Indefinite,
}

/// Hessian eigenvalue statistics of a transformed field, over the full mask
/// and over an inner boundary tube.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub kind: TransformKind,
    pub beta: f64,
    pub min_eig_global: f64,
    pub min_eig_tube: f64,
    pub tube_width: f64,
    pub argmin: [f64; 2],
    pub sigma_tol: f64,
    pub verdict: ConcavityVerdict,
    /// Masked vertices excluded because their fit was flagged.
    pub excluded_vertices: usize,
}

/// Minimum Hessian eigenvalue over the masked vertices, globally and
/// restricted to the boundary tube; the verdict is strictly convex when the
/// global minimum clears `sigma_tol`.
///
/// `sigma_tol = None` uses the default relative floor: 1e-3 times the median
/// spectral magnitude of the Hessian over the mask (plus a tiny dimensional
/// seed so constant fields do not pass on pure noise).
pub fn concavity_report(
    hess: &HessianField,
    mesh: &Mesh,
    kind: TransformKind,
    beta: f64,
    tube_width: f64,
    sigma_tol: Option<f64>,
) -> Result<ConcavityReport> {
    if !(tube_width > 0.0) {
        return Err(Error::invalid_param("tube_width", "must be positive"));
    }
    let n = mesh.n_vertices();
    let mut min_global = f64::INFINITY;
    let mut min_tube = f64::INFINITY;
    let mut argmin = [f64::NAN, f64::NAN];
    let mut magnitudes: Vec<f64> = Vec::new();
    let mut seen = 0usize;
    for v in 0..n {
        if !hess.valid[v] {
            continue;
        }
        seen += 1;
        let (lo, hi) = {
            let [xx, xy, yy] = hess.hessian[v];
            eig_sym2(xx, xy, yy)
        };
        magnitudes.push(lo.abs().max(hi.abs()));
        if lo < min_global {
            min_global = lo;
            argmin = mesh.vertices[v];
        }
        if mesh.boundary_distance[v] < tube_width && lo < min_tube {
            min_tube = lo;
        }
    }
    if seen == 0 {
        return Err(Error::invalid_param("hess", "empty mask: no fitted vertices"));
    }
    // the tube is a subset of the mask, so its minimum dominates
    debug_assert!(min_tube >= min_global);
    let sigma_tol = sigma_tol.unwrap_or_else(|| {
        magnitudes.sort_by(f64::total_cmp);
        let median = magnitudes[magnitudes.len() / 2];
        let diameter_scale = {
            let summ = 2.0 * mesh.inradius; // cheap lower bound for the diameter
            1.0 / (summ * summ)
        };
        1e-3 * median + 1e-12 * diameter_scale
    });
    let verdict = if min_global >= sigma_tol {
        ConcavityVerdict::StrictlyConvex
    } else {
        ConcavityVerdict::Indefinite
    };
    Ok(ConcavityReport {
        kind,
        beta,
        min_eig_global: min_global,
        min_eig_tube: min_tube,
        tube_width,
        argmin,
        sigma_tol,
        verdict,
        excluded_vertices: hess.flagged,
    })
}

/// Boundary identity for Dirichlet solutions: in principal coordinates the
/// tangential second derivative satisfies u_tt = -|grad u| kappa. Fits a
/// quadratic patch at every boundary vertex and returns the maximum
/// relative defect |u_tt + |grad u| kappa| / (|grad u| kappa).
pub fn boundary_second_derivative_check(solution: &Solution) -> Result<f64> {
    if !solution.problem.is_dirichlet() {
        return Err(Error::invalid_param(
            "solution",
            "the boundary identity applies to Dirichlet solutions",
        ));
    }
    let mesh = &solution.mesh;
    let field = MaskedField::full(solution.field.clone());
    let hess = estimate_with_rings(mesh, &field, 3);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for v in 0..mesh.n_boundary() {
        if !hess.valid[v] {
            continue;
        }
        let theta = mesh.boundary_theta(v);
        let tangent = [-theta.sin(), theta.cos()];
        let u_tt = quad_form(&hess.hessian[v], tangent);
        let grad = hess.gradient[v];
        let gmod = grad[0].hypot(grad[1]);
        let kappa = mesh.domain.curvature(theta);
        let rhs = -gmod * kappa;
        if rhs == 0.0 {
            continue;
        }
        checked += 1;
        worst = worst.max((u_tt - rhs).abs() / rhs.abs());
    }
    if checked == 0 {
        return Err(Error::invalid_param(
            "solution",
            "no boundary vertex produced a valid fit",
        ));
    }
    Ok(worst)
}
