//! Linear finite elements for the four boundary value problems: Robin and
//! Dirichlet eigenpairs, Robin and Dirichlet torsion.
//!
//! Assembly uses exact P1 integrals: consistent mass (midpoint rule, exact
//! for quadratics), constant-gradient stiffness, and trapezoid boundary
//! mass on the boundary chords. Eigenpairs come from block inverse
//! iteration with Rayleigh-Ritz extraction on the factored operator; the
//! Dirichlet condition is imposed by symmetric elimination of the boundary
//! rows and columns so Robin/Dirichlet eigenvalue comparisons carry no
//! penalty bias.

use crate::dense::jacobi_eigh;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::sparse::{nested_dissection_order, LdlFactor, LdlSymbolic, SparseSym};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    RobinEig,
    DirichletEig,
    RobinTorsion,
    DirichletTorsion,
}

impl ProblemKind {
    pub fn is_eig(self) -> bool {
        matches!(self, ProblemKind::RobinEig | ProblemKind::DirichletEig)
    }
    pub fn is_dirichlet(self) -> bool {
        matches!(self, ProblemKind::DirichletEig | ProblemKind::DirichletTorsion)
    }
}

/// Assembled P1 system on a mesh. The three matrices share one sparsity
/// pattern so `K + beta * B` is a value recombination.
pub struct FemSystem {
    pub mesh: Arc<Mesh>,
    pub stiffness: SparseSym,
    pub mass: SparseSym,
    pub boundary_mass: SparseSym,
    pub load: Vec<f64>,
    /// Interior vertex ids (sorted) for the Dirichlet reduction.
    interior: Vec<usize>,
}

/// A discrete scalar field with its problem descriptor.
#[derive(Clone, Debug)]
pub struct Solution {
    pub mesh: Arc<Mesh>,
    pub problem: ProblemKind,
    pub beta: Option<f64>,
    /// Smallest eigenvalues (ascending) for eigen problems, empty for
    /// torsion.
    pub eigenvalues: Vec<f64>,
    /// Vertex values; the ground state for eigen problems, L2-normalized
    /// and positive.
    pub field: Vec<f64>,
}

pub fn assemble(mesh: Arc<Mesh>) -> FemSystem {
    let n = mesh.n_vertices();
    let pattern = SparseSym::build_pattern(
        n,
        mesh.triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]),
    );
    let mut stiffness = SparseSym::zeros(Arc::clone(&pattern));
    let mut mass = SparseSym::zeros(Arc::clone(&pattern));
    let mut boundary_mass = SparseSym::zeros(Arc::clone(&pattern));
    let mut load = vec![0.0; n];

    for t in &mesh.triangles {
        let [i, j, k] = *t;
        let p = [mesh.vertices[i], mesh.vertices[j], mesh.vertices[k]];
        let area = 0.5
            * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]));
        // grad of barycentric basis: ([y_j - y_k, x_k - x_j]) / (2 area)
        let b = [p[1][1] - p[2][1], p[2][1] - p[0][1], p[0][1] - p[1][1]];
        let c = [p[2][0] - p[1][0], p[0][0] - p[2][0], p[1][0] - p[0][0]];
        let idx = [i, j, k];
        for a in 0..3 {
            load[idx[a]] += area / 3.0;
            for d in 0..3 {
                stiffness.add(idx[a], idx[d], (b[a] * b[d] + c[a] * c[d]) / (4.0 * area));
                let m = if a == d { area / 6.0 } else { area / 12.0 };
                mass.add(idx[a], idx[d], m);
            }
        }
    }
    for e in &mesh.boundary_edges {
        boundary_mass.add(e.a, e.a, 0.5 * e.weight);
        boundary_mass.add(e.b, e.b, 0.5 * e.weight);
    }
    let interior = (mesh.n_boundary()..n).collect();
    FemSystem {
        mesh,
        stiffness,
        mass,
        boundary_mass,
        load,
        interior,
    }
}

impl FemSystem {
    fn interior_coords(&self) -> Vec<[f64; 2]> {
        self.interior.iter().map(|&v| self.mesh.vertices[v]).collect()
    }

    /// Smallest `k` Robin eigenpairs of (K + beta B) u = lambda M u.
    pub fn solve_robin_eig(&self, beta: f64, k: usize) -> Result<Solution> {
        if !(beta > 0.0) {
            return Err(Error::invalid_param("beta", "must be positive"));
        }
        if !(1..=2).contains(&k) {
            return Err(Error::invalid_param("k", "only the first two eigenpairs are supported"));
        }
        let a = self.stiffness.add_scaled(&self.boundary_mass, beta);
        let (evals, ground) = smallest_eigs(&a, &self.mass, &self.mesh.vertices, k)?;
        let field = self.finalize_ground_state(ground, None)?;
        Ok(Solution {
            mesh: Arc::clone(&self.mesh),
            problem: ProblemKind::RobinEig,
            beta: Some(beta),
            eigenvalues: evals,
            field,
        })
    }

    /// Smallest `k` Dirichlet eigenpairs, boundary eliminated symmetrically.
    pub fn solve_dirichlet_eig(&self, k: usize) -> Result<Solution> {
        if !(1..=2).contains(&k) {
            return Err(Error::invalid_param("k", "only the first two eigenpairs are supported"));
        }
        let a = self.stiffness.submatrix(&self.interior);
        let m = self.mass.submatrix(&self.interior);
        let (evals, ground_int) = smallest_eigs(&a, &m, &self.interior_coords(), k)?;
        let mut field = vec![0.0; self.mesh.n_vertices()];
        for (ii, &v) in self.interior.iter().enumerate() {
            field[v] = ground_int[ii];
        }
        let field = self.finalize_ground_state(field, Some(&self.interior))?;
        Ok(Solution {
            mesh: Arc::clone(&self.mesh),
            problem: ProblemKind::DirichletEig,
            beta: None,
            eigenvalues: evals,
            field,
        })
    }

    /// Robin torsion: (K + beta B) u = load.
    pub fn solve_robin_torsion(&self, beta: f64) -> Result<Solution> {
        if !(beta > 0.0) {
            return Err(Error::invalid_param("beta", "must be positive"));
        }
        let a = self.stiffness.add_scaled(&self.boundary_mass, beta);
        let field = solve_spd_checked(&a, &self.load, &self.mesh.vertices)?;
        Ok(Solution {
            mesh: Arc::clone(&self.mesh),
            problem: ProblemKind::RobinTorsion,
            beta: Some(beta),
            eigenvalues: vec![],
            field,
        })
    }

    /// Dirichlet torsion, boundary values exactly zero.
    pub fn solve_dirichlet_torsion(&self) -> Result<Solution> {
        let a = self.stiffness.submatrix(&self.interior);
        let rhs: Vec<f64> = self.interior.iter().map(|&v| self.load[v]).collect();
        let sol_int = solve_spd_checked(&a, &rhs, &self.interior_coords())?;
        let mut field = vec![0.0; self.mesh.n_vertices()];
        for (ii, &v) in self.interior.iter().enumerate() {
            field[v] = sol_int[ii];
        }
        Ok(Solution {
            mesh: Arc::clone(&self.mesh),
            problem: ProblemKind::DirichletTorsion,
            beta: None,
            eigenvalues: vec![],
            field,
        })
    }

    /// L2-normalize, fix the sign at the vertex nearest the Steiner point,
    /// and require strict positivity away from eliminated boundary rows.
    fn finalize_ground_state(&self, mut field: Vec<f64>, interior: Option<&[usize]>) -> Result<Vec<f64>> {
        let m_u = self.mass.matvec_alloc(&field);
        let norm = field.iter().zip(&m_u).map(|(a, b)| a * b).sum::<f64>().sqrt();
        for v in field.iter_mut() {
            *v /= norm;
        }
        let anchor = (0..self.mesh.n_vertices())
            .min_by(|&a, &b| {
                let ra = self.mesh.vertices[a][0].hypot(self.mesh.vertices[a][1]);
                let rb = self.mesh.vertices[b][0].hypot(self.mesh.vertices[b][1]);
                ra.total_cmp(&rb)
            })
            .expect("nonempty mesh");
        if field[anchor] < 0.0 {
            for v in field.iter_mut() {
                *v = -*v;
            }
        }
        let check: Box<dyn Iterator<Item = usize>> = match interior {
            Some(ids) => Box::new(ids.iter().copied()),
            None => Box::new(0..self.mesh.n_vertices()),
        };
        for v in check {
            if !(field[v] > 0.0) {
                return Err(Error::NonPositiveField {
                    vertex: v,
                    value: field[v],
                });
            }
        }
        Ok(field)
    }
}

/// SPD solve with a residual check and one step of iterative refinement.
fn solve_spd_checked(a: &SparseSym, rhs: &[f64], coords: &[[f64; 2]]) -> Result<Vec<f64>> {
    let order = nested_dissection_order(&a.pattern, coords);
    let sym = Arc::new(LdlSymbolic::analyze(&a.pattern, order));
    let f = LdlFactor::factor(Arc::clone(&sym), a)?;
    let mut x = f.solve(rhs);
    let norm_rhs = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    for _ in 0..2 {
        let ax = a.matvec_alloc(&x);
        let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, y)| b - y).collect();
        let rel = r.iter().map(|v| v * v).sum::<f64>().sqrt() / norm_rhs;
        if rel <= 1e-11 {
            return Ok(x);
        }
        let dx = f.solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
    }
    let ax = a.matvec_alloc(&x);
    let rel = rhs
        .iter()
        .zip(&ax)
        .map(|(b, y)| (b - y) * (b - y))
        .sum::<f64>()
        .sqrt()
        / norm_rhs;
    if rel <= 1e-11 {
        Ok(x)
    } else {
        Err(Error::NoConvergence {
            what: "torsion solve",
            residual: rel,
            iterations: 2,
        })
    }
}

/// Relative eigen-residual tolerance: ||A u - lambda M u|| in the inverse
/// mass norm must drop below 1e-9 * (1 + lambda) for a unit-M-norm vector.
const EIG_TOL: f64 = 1e-9;
const EIG_MAX_ITER: usize = 400;

/// Block inverse iteration with Rayleigh-Ritz extraction for the smallest
/// `k` eigenpairs of A u = lambda M u (A, M SPD). The block carries one
/// spare vector beyond `k` so clustered or degenerate pairs (the second
/// eigenvalue of symmetric domains) converge cleanly instead of stalling.
fn smallest_eigs(
    a: &SparseSym,
    m: &SparseSym,
    coords: &[[f64; 2]],
    k: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = a.n();
    let block = (k + 1).min(n);
    let order = nested_dissection_order(&a.pattern, coords);
    let sym = Arc::new(LdlSymbolic::analyze(&a.pattern, order));
    let fa = LdlFactor::factor(Arc::clone(&sym), a)?;
    let fm = LdlFactor::factor(Arc::clone(&sym), m)?;

    // deterministic start: constants plus coordinates
    let mut x: Vec<Vec<f64>> = Vec::with_capacity(block);
    x.push(vec![1.0; n]);
    if block > 1 {
        x.push(coords.iter().map(|p| p[0]).collect());
    }
    if block > 2 {
        x.push(coords.iter().map(|p| p[1]).collect());
    }
    m_orthonormalize(&mut x, m)?;

    let mut evals = vec![0.0; block];
    let mut worst_residual = f64::INFINITY;
    for _iter in 0..EIG_MAX_ITER {
        // Y = A^{-1} M X, then M-orthonormalize and Rayleigh-Ritz
        let mut y: Vec<Vec<f64>> = x
            .iter()
            .map(|col| fa.solve(&m.matvec_alloc(col)))
            .collect();
        m_orthonormalize(&mut y, m)?;
        let ay: Vec<Vec<f64>> = y.iter().map(|col| a.matvec_alloc(col)).collect();
        let mut s = vec![0.0; block * block];
        for i in 0..block {
            for j in 0..block {
                s[i * block + j] = dot(&y[i], &ay[j]);
            }
        }
        // symmetrize against matvec round-off
        for i in 0..block {
            for j in i + 1..block {
                let v = 0.5 * (s[i * block + j] + s[j * block + i]);
                s[i * block + j] = v;
                s[j * block + i] = v;
            }
        }
        let (theta, vecs) = jacobi_eigh(block, &mut s);
        let mut new_x: Vec<Vec<f64>> = Vec::with_capacity(block);
        for j in 0..block {
            let mut col = vec![0.0; n];
            for (i, yi) in y.iter().enumerate() {
                let w = vecs[i * block + j];
                if w != 0.0 {
                    axpy(&mut col, w, yi);
                }
            }
            new_x.push(col);
        }
        x = new_x;
        evals.copy_from_slice(&theta);

        worst_residual = 0.0;
        for j in 0..k {
            let ax = a.matvec_alloc(&x[j]);
            let mx = m.matvec_alloc(&x[j]);
            let r: Vec<f64> = ax
                .iter()
                .zip(&mx)
                .map(|(av, mv)| av - theta[j] * mv)
                .collect();
            let minv_r = fm.solve(&r);
            let rnorm = dot(&r, &minv_r).max(0.0).sqrt();
            worst_residual = worst_residual.max(rnorm / (1.0 + theta[j].abs()));
        }
        if worst_residual <= EIG_TOL {
            evals.truncate(k);
            return Ok((evals, x.swap_remove(0)));
        }
    }
    Err(Error::NoConvergence {
        what: "eigenvalue iteration",
        residual: worst_residual,
        iterations: EIG_MAX_ITER,
    })
}

/// Modified Gram-Schmidt in the M inner product.
fn m_orthonormalize(cols: &mut [Vec<f64>], m: &SparseSym) -> Result<()> {
    for j in 0..cols.len() {
        for _pass in 0..2 {
            for i in 0..j {
                let mi = m.matvec_alloc(&cols[i]);
                let proj = dot(&cols[j], &mi);
                let (head, tail) = cols.split_at_mut(j);
                axpy(&mut tail[0], -proj, &head[i]);
            }
        }
        let mj = m.matvec_alloc(&cols[j]);
        let norm = dot(&cols[j], &mj).sqrt();
        if !(norm > 1e-300) {
            return Err(Error::Breakdown {
                context: "gram-schmidt",
                reason: "iteration block became rank deficient".into(),
            });
        }
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Per-boundary-vertex estimate of |du/dnu| by a one-sided quadratic fit
/// along the inward normal, and its minimum over the boundary.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryGradient {
    pub min_abs: f64,
    /// Boundary vertices that fell back to a first-order difference.
    pub fallback_count: usize,
}

/// Minimum over the boundary of the normal derivative modulus of a
/// Dirichlet solution (q for the ground state, p for torsion). Three sample
/// depths up to 3h feed a quadratic fit per boundary vertex; first-order
/// differences no closer than h/2 are the flagged fallback.
pub fn boundary_gradient(solution: &Solution) -> Result<BoundaryGradient> {
    if !solution.problem.is_dirichlet() {
        return Err(Error::invalid_param(
            "solution",
            "boundary gradient recovery expects a Dirichlet solution",
        ));
    }
    let mesh = &solution.mesh;
    let h = mesh.h_target;
    let mut min_abs = f64::INFINITY;
    let mut fallback_count = 0;
    for v in 0..mesh.n_boundary() {
        let theta = mesh.boundary_theta(v);
        let (s, c) = theta.sin_cos();
        let p0 = mesh.vertices[v];
        let u0 = solution.field[v];
        let depths = [h, 2.0 * h, 3.0 * h];
        let mut samples = Vec::with_capacity(3);
        for d in depths {
            let p = [p0[0] - d * c, p0[1] - d * s];
            if let Some(val) = mesh.interpolate(&solution.field, p) {
                samples.push((d, val));
            }
        }
        let grad = if samples.len() == 3 {
            fit_normal_slope(u0, &samples)
        } else {
            None
        };
        let g = match grad {
            Some(g) => g,
            None => {
                // first-order fallback
                fallback_count += 1;
                let d = 0.5 * h;
                let p = [p0[0] - d * c, p0[1] - d * s];
                let val = mesh.interpolate(&solution.field, p).unwrap_or(u0);
                (val - u0) / d
            }
        };
        min_abs = min_abs.min(g.abs());
    }
    Ok(BoundaryGradient {
        min_abs,
        fallback_count,
    })
}

pub fn boundary_gradient_min(solution: &Solution) -> Result<f64> {
    boundary_gradient(solution).map(|g| g.min_abs)
}

/// Least squares of u(d) = u0 + g d + q d^2 through the boundary value and
/// the depth samples; returns g.
fn fit_normal_slope(u0: f64, samples: &[(f64, f64)]) -> Option<f64> {
    let mut a = [0.0f64; 4];
    let mut b = [0.0f64; 2];
    for &(d, val) in samples {
        let basis = [d, d * d];
        let rhs = val - u0;
        for i in 0..2 {
            for j in 0..2 {
                a[i * 2 + j] += basis[i] * basis[j];
            }
            b[i] += basis[i] * rhs;
        }
    }
    let det = a[0] * a[3] - a[1] * a[2];
    if det.abs() <= 1e-14 * a[0].max(a[3]).powi(2) {
        return None;
    }
    Some((b[0] * a[3] - b[1] * a[1]) / det)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldNorm {
    L2,
    C0,
}

/// Distance between two fields on the same mesh; eigen pairs are
/// sign-aligned first. L2 uses exact P1 integration of the squared
/// difference, C0 the max vertex deviation.
pub fn field_distance(a: &Solution, b: &Solution, norm: FieldNorm) -> Result<f64> {
    if !Arc::ptr_eq(&a.mesh, &b.mesh) {
        return Err(Error::MeshMismatch(
            "solutions live on different meshes".into(),
        ));
    }
    let sign = if a.problem.is_eig() && b.problem.is_eig() {
        let overlap: f64 = a.field.iter().zip(&b.field).map(|(x, y)| x * y).sum();
        if overlap < 0.0 {
            -1.0
        } else {
            1.0
        }
    } else {
        1.0
    };
    let diff: Vec<f64> = a
        .field
        .iter()
        .zip(&b.field)
        .map(|(x, y)| x - sign * y)
        .collect();
    Ok(match norm {
        FieldNorm::C0 => diff.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        FieldNorm::L2 => {
            let mesh = &a.mesh;
            let mut acc = 0.0;
            for (t, tri) in mesh.triangles.iter().enumerate() {
                let area = mesh.triangle_area(t);
                let d = [diff[tri[0]], diff[tri[1]], diff[tri[2]]];
                acc += area / 6.0
                    * (d[0] * d[0]
                        + d[1] * d[1]
                        + d[2] * d[2]
                        + d[0] * d[1]
                        + d[1] * d[2]
                        + d[0] * d[2]);
            }
            acc.max(0.0).sqrt()
        }
    })
}

/// Vertex of maximal field value and its distance to the true boundary
/// (the hot-spot location check for Dirichlet ground states).
pub fn hotspot(solution: &Solution) -> (usize, f64) {
    let v = (0..solution.field.len())
        .max_by(|&i, &j| solution.field[i].total_cmp(&solution.field[j]))
        .expect("nonempty field");
    (v, solution.mesh.boundary_distance[v])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexDomain;
    use crate::mesh::triangulate;
    use crate::special;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn disk_system(h: f64) -> FemSystem {
        let d = ConvexDomain::disk(1.0).unwrap();
        assemble(Arc::new(triangulate(&d, h).unwrap()))
    }

    #[test]
    fn assembly_identities() {
        let sys = disk_system(0.1);
        // constants in the stiffness kernel
        let ones = vec![1.0; sys.mesh.n_vertices()];
        let k1 = sys.stiffness.matvec_alloc(&ones);
        let worst = k1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-10, "stiffness row sums {worst}");
        // load against the partition of unity
        let total: f64 = sys.load.iter().sum();
        assert_relative_eq!(total, sys.mesh.area(), epsilon = 1e-12);
        // boundary mass total = polygon perimeter
        let b1 = sys.boundary_mass.matvec_alloc(&ones);
        let per: f64 = b1.iter().sum();
        assert_relative_eq!(per, sys.mesh.polygon_perimeter(), epsilon = 1e-12);
        // mass total = area
        let m1 = sys.mass.matvec_alloc(&ones);
        let area: f64 = m1.iter().sum();
        assert_relative_eq!(area, sys.mesh.area(), epsilon = 1e-12);
        assert!(sys.stiffness.asymmetry() < 1e-12);
        assert!(sys.mass.asymmetry() < 1e-12);
        assert!(sys.boundary_mass.asymmetry() < 1e-12);
    }

    #[test]
    fn dirichlet_eigenvalue_matches_bessel_oracle() {
        let sys = disk_system(0.05);
        let sol = sys.solve_dirichlet_eig(2).unwrap();
        assert_relative_eq!(
            sol.eigenvalues[0],
            special::DISK_LAMBDA1_D,
            max_relative = 4e-3
        );
        assert_relative_eq!(
            sol.eigenvalues[1],
            special::DISK_LAMBDA2_D,
            max_relative = 8e-3
        );
        assert!(sol.eigenvalues[1] > sol.eigenvalues[0]);
        // boundary exactly zero, interior strictly positive
        for v in 0..sys.mesh.n_boundary() {
            assert_eq!(sol.field[v], 0.0);
        }
        for v in sys.mesh.n_boundary()..sys.mesh.n_vertices() {
            assert!(sol.field[v] > 0.0);
        }
        // unit L2 norm through the mass matrix
        let mu = sys.mass.matvec_alloc(&sol.field);
        let norm: f64 = sol.field.iter().zip(&mu).map(|(a, b)| a * b).sum();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn robin_eigenvalue_matches_bessel_oracle() {
        let sys = disk_system(0.05);
        for beta in [1.0, 10.0] {
            let sol = sys.solve_robin_eig(beta, 2).unwrap();
            let x1 = special::disk_robin_eig1_root(beta);
            let x2 = special::disk_robin_eig2_root(beta);
            assert_relative_eq!(sol.eigenvalues[0], x1 * x1, max_relative = 4e-3);
            assert_relative_eq!(sol.eigenvalues[1], x2 * x2, max_relative = 8e-3);
            // Robin ground state positive up to the boundary
            for v in 0..sys.mesh.n_vertices() {
                assert!(sol.field[v] > 0.0);
            }
        }
    }

    #[test]
    fn robin_monotone_in_beta_and_below_dirichlet() {
        let sys = disk_system(0.08);
        let lam_d = sys.solve_dirichlet_eig(1).unwrap().eigenvalues[0];
        let mut prev = 0.0;
        for beta in [0.1, 1.0, 10.0, 100.0] {
            let lam = sys.solve_robin_eig(beta, 1).unwrap().eigenvalues[0];
            assert!(lam > prev);
            assert!(lam <= lam_d);
            prev = lam;
        }
    }

    #[test]
    fn robin_torsion_matches_closed_form() {
        let sys = disk_system(0.05);
        let beta = 2.0;
        let sol = sys.solve_robin_torsion(beta).unwrap();
        // u = (1 - r^2)/4 + 1/(2 beta)
        let mut worst = 0.0f64;
        for (v, p) in sys.mesh.vertices.iter().enumerate() {
            let r2 = p[0] * p[0] + p[1] * p[1];
            let exact = (1.0 - r2) / 4.0 + 1.0 / (2.0 * beta);
            worst = worst.max((sol.field[v] - exact).abs() / exact);
        }
        assert!(worst < 2e-3, "worst relative error {worst}");
        assert!(sol.field.iter().all(|&u| u > 0.0));
    }

    #[test]
    fn dirichlet_torsion_center_value_and_ordering() {
        let sys = disk_system(0.05);
        let dir = sys.solve_dirichlet_torsion().unwrap();
        let rob = sys.solve_robin_torsion(2.0).unwrap();
        let center = sys
            .mesh
            .vertices
            .iter()
            .enumerate()
            .min_by(|(_, p), (_, q)| {
                p[0].hypot(p[1]).total_cmp(&q[0].hypot(q[1]))
            })
            .unwrap()
            .0;
        assert_relative_eq!(dir.field[center], 0.25, max_relative = 3e-3);
        assert_relative_eq!(rob.field[center], 0.5, max_relative = 3e-3);
        // maximum principle: dirichlet torsion below robin torsion everywhere
        for v in 0..sys.mesh.n_vertices() {
            assert!(dir.field[v] <= rob.field[v] + 1e-12);
        }
        for v in 0..sys.mesh.n_boundary() {
            assert_eq!(dir.field[v], 0.0);
        }
    }

    #[test]
    fn boundary_gradient_disk_torsion() {
        let sys = disk_system(0.04);
        let sol = sys.solve_dirichlet_torsion().unwrap();
        let g = boundary_gradient(&sol).unwrap();
        // |u'(1)| = 1/2 for the unit disk torsion function
        assert_relative_eq!(g.min_abs, 0.5, max_relative = 0.05);
        assert_eq!(g.fallback_count, 0);
    }

    #[test]
    fn boundary_gradient_scales_linearly() {
        let sys = disk_system(0.08);
        let sol = sys.solve_dirichlet_torsion().unwrap();
        let mut doubled = sol.clone();
        for v in doubled.field.iter_mut() {
            *v *= 2.0;
        }
        let g1 = boundary_gradient_min(&sol).unwrap();
        let g2 = boundary_gradient_min(&doubled).unwrap();
        assert_relative_eq!(g2, 2.0 * g1, epsilon = 1e-12);
    }

    #[test]
    fn boundary_gradient_rejects_robin() {
        let sys = disk_system(0.1);
        let sol = sys.solve_robin_torsion(1.0).unwrap();
        assert!(boundary_gradient(&sol).is_err());
    }

    #[test]
    fn field_distance_basics() {
        let sys = disk_system(0.08);
        let a = sys.solve_robin_eig(10.0, 1).unwrap();
        assert_eq!(field_distance(&a, &a, FieldNorm::L2).unwrap(), 0.0);
        assert_eq!(field_distance(&a, &a, FieldNorm::C0).unwrap(), 0.0);

        // sign alignment: a flipped eigenvector is the same state
        let mut b = a.clone();
        for v in b.field.iter_mut() {
            *v = -*v;
        }
        assert!(field_distance(&a, &b, FieldNorm::L2).unwrap() < 1e-12);

        // torsion disk: C0 distance to dirichlet = 1/(2 beta) + O(h^2)
        let rob = sys.solve_robin_torsion(10.0).unwrap();
        let dir = sys.solve_dirichlet_torsion().unwrap();
        let c0 = field_distance(&rob, &dir, FieldNorm::C0).unwrap();
        assert_relative_eq!(c0, 1.0 / 20.0, max_relative = 0.08);
    }

    #[test]
    fn mesh_mismatch_is_reported() {
        let a = disk_system(0.1).solve_dirichlet_torsion().unwrap();
        let b = disk_system(0.1).solve_dirichlet_torsion().unwrap();
        assert!(matches!(
            field_distance(&a, &b, FieldNorm::L2),
            Err(Error::MeshMismatch(_))
        ));
    }

    #[test]
    fn hotspot_of_disk_is_central() {
        let sys = disk_system(0.08);
        let sol = sys.solve_dirichlet_eig(1).unwrap();
        let (v, dist) = hotspot(&sol);
        let r = sys.mesh.vertices[v][0].hypot(sys.mesh.vertices[v][1]);
        assert!(r < 0.1, "hot spot at radius {r}");
        assert!(dist > 0.9);
    }

    #[test]
    fn eigen_residual_invariant() {
        let sys = disk_system(0.08);
        let beta = 5.0;
        let sol = sys.solve_robin_eig(beta, 1).unwrap();
        let a = sys.stiffness.add_scaled(&sys.boundary_mass, beta);
        let au = a.matvec_alloc(&sol.field);
        let mu = sys.mass.matvec_alloc(&sol.field);
        let r: Vec<f64> = au
            .iter()
            .zip(&mu)
            .map(|(x, y)| x - sol.eigenvalues[0] * y)
            .collect();
        // loose norm check: ||r||_2 scaled by mass diagonal
        let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(rn < 1e-7, "residual 2-norm {rn}");
    }

    #[test]
    fn perimeter_check_against_cauchy_formula() {
        let e = ConvexDomain::ellipse(1.5, 1.0).unwrap();
        let h = 0.1;
        let sys = assemble(Arc::new(triangulate(&e, h).unwrap()));
        let ones = vec![1.0; sys.mesh.n_vertices()];
        let per: f64 = sys.boundary_mass.matvec_alloc(&ones).iter().sum();
        assert_relative_eq!(per, e.perimeter(), max_relative = h * h);
        let _ = PI;
    }
}
