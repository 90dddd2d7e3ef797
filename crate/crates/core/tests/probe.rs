//! Scratch measurements for acceptance tuning (not part of the suite).

use robinlab::concavity::*;
use robinlab::geometry::ConvexDomain;
use robinlab::mesh::triangulate;
use robinlab::solver::*;
use robinlab::special;
use std::sync::Arc;
use std::time::Instant;

#[test]
#[ignore]
fn probe_eig_convergence() {
    let d = ConvexDomain::disk(1.0).unwrap();
    let t0 = Instant::now();
    let m0 = Arc::new(triangulate(&d, 0.04).unwrap());
    let m1 = Arc::new(m0.refine_uniform());
    let m2 = Arc::new(m1.refine_uniform());
    println!("meshes: {} / {} / {} vertices, {:?}", m0.n_vertices(), m1.n_vertices(), m2.n_vertices(), t0.elapsed());
    for beta in [1.0, 10.0, 100.0] {
        let exact = special::disk_robin_lambda1(1.0, beta);
        let mut errs = Vec::new();
        for m in [&m0, &m1, &m2] {
            let t = Instant::now();
            let sys = assemble(Arc::clone(m));
            let lam = sys.solve_robin_eig(beta, 1).unwrap().eigenvalues[0];
            errs.push((lam - exact).abs() / exact);
            println!("  beta={beta} n={} lam={lam:.8} relerr={:.3e} t={:?}", m.n_vertices(), errs.last().unwrap(), t.elapsed());
        }
        println!("beta={beta}: ratios {:.2} {:.2}", errs[0]/errs[1], errs[1]/errs[2]);
    }
}

#[test]
#[ignore]
fn probe_boundary_identity() {
    for (name, dom) in [
        ("disk", ConvexDomain::disk(1.0).unwrap()),
        ("ellipse", ConvexDomain::ellipse(1.5, 1.0).unwrap()),
    ] {
        let t0 = Instant::now();
        let m0 = Arc::new(triangulate(&dom, 0.01).unwrap());
        let m1 = Arc::new(m0.refine_uniform());
        println!("{name}: meshes {} / {} vertices {:?}", m0.n_vertices(), m1.n_vertices(), t0.elapsed());
        for m in [&m0, &m1] {
            let sys = assemble(Arc::clone(m));
            let tor = sys.solve_dirichlet_torsion().unwrap();
            let eig = sys.solve_dirichlet_eig(1).unwrap();
            for (rings, bw) in [(3usize, 1.0f64), (4, 2.0), (5, 2.5), (6, 3.0)] {
                let t = Instant::now();
                let dt = boundary_defect(&tor, rings, bw);
                let de = boundary_defect(&eig, rings, bw);
                println!(
                    "  {name} n={} rings={rings} bw={bw}: torsion {dt:.4}, eig {de:.4} ({:?})",
                    m.n_vertices(),
                    t.elapsed()
                );
            }
        }
    }
}

fn boundary_defect(sol: &Solution, rings: usize, bw: f64) -> f64 {
    let mesh = &sol.mesh;
    let field = MaskedField::full(sol.field.clone());
    let hess = estimate_custom(mesh, &field, rings, bw);
    let mut worst = 0.0f64;
    for v in 0..mesh.n_boundary() {
        if !hess.valid[v] {
            continue;
        }
        let theta = mesh.boundary_theta(v);
        let tangent = [-theta.sin(), theta.cos()];
        let [xx, xy, yy] = hess.hessian[v];
        let u_tt = xx * tangent[0] * tangent[0]
            + 2.0 * xy * tangent[0] * tangent[1]
            + yy * tangent[1] * tangent[1];
        let g = hess.gradient[v];
        let rhs = -g[0].hypot(g[1]) * mesh.domain.curvature(theta);
        if rhs != 0.0 {
            worst = worst.max((u_tt - rhs).abs() / rhs.abs());
        }
    }
    worst
}

#[test]
#[ignore]
fn probe_qform() {
    let d = ConvexDomain::disk(1.0).unwrap();
    let mesh = Arc::new(triangulate(&d, 0.02).unwrap());
    let sys = assemble(Arc::clone(&mesh));
    let sol = sys.solve_robin_eig(10.0, 1).unwrap();
    for kind in [TransformKind::NegLog, TransformKind::NegSqrt] {
        let u = MaskedField::full(sol.field.clone());
        let v = transform(&sol, kind).unwrap();
        let uh = estimate_gradient_hessian(&mesh, &u);
        let vh = estimate_gradient_hessian(&mesh, &v);
        let defect = qform_consistency(&uh, &vh, &u, kind);
        println!("qform {kind:?} at h=0.02: defect {defect:.4}");
    }
}

#[test]
#[ignore]
fn probe_rate_fit() {
    for (name, dom) in [
        ("disk", ConvexDomain::disk(1.0).unwrap()),
        ("ellipse", ConvexDomain::ellipse(1.5, 1.0).unwrap()),
    ] {
        let summary = dom.summary();
        let mesh = Arc::new(triangulate(&dom, 0.03).unwrap());
        let sys = assemble(Arc::clone(&mesh));
        let dir = sys.solve_dirichlet_eig(1).unwrap();
        let mut trace = Vec::new();
        for j in 0..7 {
            let beta = 10.0 * 2f64.powi(j);
            let rob = sys.solve_robin_eig(beta, 1).unwrap();
            let dist = field_distance(&rob, &dir, FieldNorm::L2).unwrap();
            trace.push((beta, dist));
        }
        let fit = robinlab::bounds::rate_fit(&trace).unwrap();
        let lam = robinlab::bounds::closeness_lambda(summary.kappa_max, summary.diameter);
        println!("{name}: slope {:.4} R2 {:.5} M_hat {:.4} Lambda {:.4}", fit.slope, fit.r_squared, fit.empirical_constant(), lam);
    }
}

#[test]
#[ignore]
fn probe_threshold_timing() {
    use robinlab::thresholds::*;
    let e = ConvexDomain::ellipse(1.5, 1.0).unwrap();
    for h in [0.04, 0.02] {
        for kind in [TransformKind::NegLog, TransformKind::NegSqrt] {
            let t = Instant::now();
            let res = bisect_threshold(&e, kind, (0.1, 1e4), 1.1, h, None).unwrap();
            println!("h={h} {kind:?}: {:?} in {:?} ({} evals)", res.outcome, t.elapsed(), res.trace.len());
        }
    }
    let t = Instant::now();
    let sweep = continuity_sweep(&e, 0.2, TransformKind::NegLog, 11, 0.02, None).unwrap();
    println!("sweep 11 pts h=0.02: uniform_pass={} in {:?}", sweep.uniform_pass, t.elapsed());
}
