//! Command-line front door: solves, beta sweeps, threshold searches,
//! deformation studies and bound audits from domain-spec files, emitting
//! CSV/JSON data and static SVG figures.
//!
//! Exit codes: 0 success, 1 input or solver error, 2 when a theorem-backed
//! bound report fails (which signals a solver or geometry bug, not a sharp
//! inequality).

use clap::{Args, Parser, Subcommand, ValueEnum};
use robinlab::bounds::audit_domain;
use robinlab::concavity::{estimate_gradient_hessian, transform, TransformKind};
use robinlab::io::{self, FileMeta};
use robinlab::mesh::{set_default_jitter_seed, triangulate};
use robinlab::solver::assemble;
use robinlab::svg;
use robinlab::thresholds::{beta_sweep, bisect_threshold, continuity_sweep};
use robinlab::ConvexDomain;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "robinlab", version, about)]
struct Cli {
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    NegLog,
    NegSqrt,
}

impl From<KindArg> for TransformKind {
    fn from(k: KindArg) -> TransformKind {
        match k {
            KindArg::NegLog => TransformKind::NegLog,
            KindArg::NegSqrt => TransformKind::NegSqrt,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProblemArg {
    RobinEig,
    DirichletEig,
    RobinTorsion,
    DirichletTorsion,
}

#[derive(Args)]
struct Common {
    /// Domain spec file (JSON: preset or raw coefficients).
    #[arg(long)]
    domain: PathBuf,
    /// Target mesh edge length.
    #[arg(long, default_value_t = 0.05)]
    h: f64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Mesh jitter seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one boundary value problem and dump the field.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        problem: ProblemArg,
        /// Robin parameter (required for Robin problems).
        #[arg(long)]
        beta: Option<f64>,
        /// Uniform refinement levels applied after meshing.
        #[arg(long, default_value_t = 0)]
        refine: usize,
        /// Also write a text dump of the mesh.
        #[arg(long)]
        dump_mesh: bool,
    },
    /// Trace lambda_1 and the Hessian minima over a geometric beta grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Geometric grid start:end:count.
        #[arg(long, value_parser = parse_grid)]
        beta_grid: BetaGrid,
        #[arg(long)]
        sigma_tol: Option<f64>,
    },
    /// Bisect the concavity threshold in beta.
    Threshold {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 0.1)]
        beta_min: f64,
        #[arg(long, default_value_t = 1e4)]
        beta_max: f64,
        /// Geometric bracket width at termination.
        #[arg(long, default_value_t = 1.1)]
        tol_factor: f64,
        #[arg(long)]
        sigma_tol: Option<f64>,
    },
    /// Evaluate the predicate along the Minkowski deformation family.
    Deform {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        beta: f64,
        /// Number of t grid points (includes both endpoints).
        #[arg(long, default_value_t = 11)]
        tgrid: usize,
        #[arg(long)]
        sigma_tol: Option<f64>,
    },
    /// Audit every theorem-backed bound against measured quantities.
    Bounds {
        #[command(flatten)]
        common: Common,
        /// One or more Robin parameters.
        #[arg(long, required = true, num_args = 1..)]
        beta: Vec<f64>,
    },
    /// Aggregated concavity + bounds report with SVG figures.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        beta: f64,
        /// Optional geometric grid start:end:count for the trace figure.
        #[arg(long, value_parser = parse_grid)]
        beta_grid: Option<BetaGrid>,
        /// Boundary tube width (default: interior sphere radius / 4).
        #[arg(long)]
        tube: Option<f64>,
        #[arg(long)]
        sigma_tol: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug)]
struct BetaGrid {
    start: f64,
    end: f64,
    count: usize,
}

impl BetaGrid {
    fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let ratio = (self.end / self.start).powf(1.0 / (self.count - 1) as f64);
        (0..self.count)
            .map(|i| self.start * ratio.powi(i as i32))
            .collect()
    }
}

fn parse_grid(s: &str) -> Result<BetaGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err("expected start:end:count".into());
    }
    let start: f64 = parts[0].parse().map_err(|_| "bad start")?;
    let end: f64 = parts[1].parse().map_err(|_| "bad end")?;
    let count: usize = parts[2].parse().map_err(|_| "bad count")?;
    if !(start > 0.0) || !(end > start) || count < 2 {
        return Err("need 0 < start < end and count >= 2".into());
    }
    Ok(BetaGrid { start, end, count })
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let hash = io::config_hash(&argv.join(" "));
    match run(cli.cmd, &hash) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load(common: &Common) -> robinlab::Result<(ConvexDomain, FileMeta)> {
    set_default_jitter_seed(common.seed);
    std::fs::create_dir_all(&common.out)?;
    let domain = io::read_domain(&common.domain)?;
    Ok((
        domain,
        FileMeta {
            config_hash: String::new(),
            mesh_h: common.h,
        },
    ))
}

fn run(cmd: Cmd, hash: &str) -> robinlab::Result<ExitCode> {
    match cmd {
        Cmd::Solve {
            common,
            problem,
            beta,
            refine,
            dump_mesh,
        } => {
            let (domain, mut meta) = load(&common)?;
            meta.config_hash = hash.to_string();
            let mut mesh = triangulate(&domain, common.h)?;
            for _ in 0..refine {
                mesh = mesh.refine_uniform();
            }
            meta.mesh_h = mesh.h_target;
            let system = assemble(Arc::new(mesh));
            let need_beta = || {
                beta.ok_or_else(|| robinlab::Error::invalid_param("beta", "required for Robin problems"))
            };
            let (solution, stem) = match problem {
                ProblemArg::RobinEig => {
                    let b = need_beta()?;
                    (system.solve_robin_eig(b, 2)?, format!("solve_robin_eig_beta{b}"))
                }
                ProblemArg::DirichletEig => {
                    (system.solve_dirichlet_eig(2)?, "solve_dirichlet_eig".into())
                }
                ProblemArg::RobinTorsion => {
                    let b = need_beta()?;
                    (
                        system.solve_robin_torsion(b)?,
                        format!("solve_robin_torsion_beta{b}"),
                    )
                }
                ProblemArg::DirichletTorsion => (
                    system.solve_dirichlet_torsion()?,
                    "solve_dirichlet_torsion".into(),
                ),
            };
            io::write_solution(&common.out.join(stem), &solution, &meta)?;
            if dump_mesh {
                io::write_mesh(&common.out.join("mesh.txt"), &system.mesh, &meta)?;
            }
            if let Some(l) = solution.eigenvalues.first() {
                println!("lambda1 = {l:.12}");
            }
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Sweep {
            common,
            kind,
            beta_grid,
            sigma_tol,
        } => {
            let (domain, mut meta) = load(&common)?;
            meta.config_hash = hash.to_string();
            let trace = beta_sweep(
                &domain,
                kind.into(),
                &beta_grid.values(),
                common.h,
                sigma_tol,
            )?;
            let name = format!("sweep_{}.csv", kind_slug(kind));
            io::write_beta_trace(&common.out.join(name), &trace, &meta)?;
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Threshold {
            common,
            kind,
            beta_min,
            beta_max,
            tol_factor,
            sigma_tol,
        } => {
            let (domain, mut meta) = load(&common)?;
            meta.config_hash = hash.to_string();
            let result = bisect_threshold(
                &domain,
                kind.into(),
                (beta_min, beta_max),
                tol_factor,
                common.h,
                sigma_tol,
            )?;
            let name = format!("threshold_{}.json", kind_slug(kind));
            io::write_json(&common.out.join(name), &result, &meta)?;
            println!("{:?}", result.outcome);
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Deform {
            common,
            kind,
            beta,
            tgrid,
            sigma_tol,
        } => {
            let (domain, mut meta) = load(&common)?;
            meta.config_hash = hash.to_string();
            let result = continuity_sweep(&domain, beta, kind.into(), tgrid, common.h, sigma_tol)?;
            let name = format!("deform_{}.json", kind_slug(kind));
            io::write_json(&common.out.join(name), &result, &meta)?;
            println!(
                "uniform_pass = {} over {} members",
                result.uniform_pass,
                result.entries.len()
            );
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Bounds { common, beta } => {
            let (domain, mut meta) = load(&common)?;
            meta.config_hash = hash.to_string();
            let reports = audit_domain(&domain, &beta, common.h)?;
            io::write_bound_reports(&common.out.join("bounds.csv"), &reports, &meta)?;
            io::write_json(
                &common.out.join("bounds.json"),
                &serde_json::json!({ "reports": reports }),
                &meta,
            )?;
            let mut failed = false;
            for r in &reports {
                let status = if r.pass { "pass" } else { "FAIL" };
                println!("{status}  {}  lhs={:.6e} rhs={:.6e}", r.name, r.lhs, r.rhs);
                if !r.pass && r.theorem_backed {
                    failed = true;
                }
            }
            if failed {
                eprintln!("theorem-backed bound failed: solver or geometry bug");
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Report {
            common,
            kind,
            beta,
            beta_grid,
            tube,
            sigma_tol,
        } => {
            let (domain, mut meta) = load(&common)?;
            meta.config_hash = hash.to_string();
            let tkind: TransformKind = kind.into();

            // concavity report + per-vertex minimum Hessian eigenvalue
            let mesh = Arc::new(triangulate(&domain, common.h)?);
            let system = assemble(Arc::clone(&mesh));
            let solution = match tkind {
                TransformKind::NegLog => system.solve_robin_eig(beta, 1)?,
                TransformKind::NegSqrt => system.solve_robin_torsion(beta)?,
            };
            let field = transform(&solution, tkind)?;
            let hess = estimate_gradient_hessian(&mesh, &field);
            let summary = domain.summary();
            let tube_width = tube.unwrap_or(summary.interior_sphere_radius / 4.0);
            let report = robinlab::concavity::concavity_report(
                &hess, &mesh, tkind, beta, tube_width, sigma_tol,
            )?;
            let eig_field: Vec<f64> = (0..mesh.n_vertices())
                .map(|v| if hess.valid[v] { hess.min_eigenvalue(v) } else { f64::NAN })
                .collect();
            let slug = kind_slug(kind);
            svg::mesh_heatmap(
                &common.out.join(format!("report_{slug}_mineig.svg")),
                &mesh,
                &eig_field,
                &format!("min Hessian eigenvalue, {slug}, beta = {beta}"),
                &format!("config_hash={hash} mesh_h={}", common.h),
            )?;

            // optional beta trace + figure
            let trace = match beta_grid {
                Some(grid) => {
                    let t = beta_sweep(&domain, tkind, &grid.values(), common.h, sigma_tol)?;
                    io::write_beta_trace(
                        &common.out.join(format!("report_{slug}_trace.csv")),
                        &t,
                        &meta,
                    )?;
                    svg::line_plot(
                        &common.out.join(format!("report_{slug}_trace.svg")),
                        "min Hessian eigenvalue vs beta",
                        &[(
                            "min_eig_global",
                            t.iter().map(|p| (p.beta, p.min_eig_global.max(1e-300))).collect(),
                        )],
                        true,
                        &format!("config_hash={hash} mesh_h={}", common.h),
                    )?;
                    Some(t)
                }
                None => None,
            };

            let bounds = audit_domain(&domain, &[beta], common.h)?;
            let any_theorem_failure = bounds.iter().any(|r| r.theorem_backed && !r.pass);

            #[derive(Serialize)]
            struct Aggregate<'a> {
                summary: &'a robinlab::GeometrySummary,
                concavity: &'a robinlab::ConcavityReport,
                bounds: &'a [robinlab::BoundReport],
                trace: Option<&'a [robinlab::thresholds::BetaTracePoint]>,
            }
            io::write_json(
                &common.out.join(format!("report_{slug}.json")),
                &Aggregate {
                    summary: &summary,
                    concavity: &report,
                    bounds: &bounds,
                    trace: trace.as_deref(),
                },
                &meta,
            )?;
            println!(
                "verdict = {:?}, min_eig_global = {:.6e}",
                report.verdict, report.min_eig_global
            );
            if any_theorem_failure {
                eprintln!("theorem-backed bound failed: solver or geometry bug");
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn kind_slug(kind: KindArg) -> &'static str {
    match kind {
        KindArg::NegLog => "neg_log",
        KindArg::NegSqrt => "neg_sqrt",
    }
}

// referenced by tests to find fixture files relative to the binary
#[allow(dead_code)]
fn manifest_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}
