//! File formats: domain spec JSON, solution dumps (CSV + JSON sidecar),
//! mesh dumps, beta-trace and bound-report CSV.
//!
//! Floats are written as decimal strings with 17 significant digits
//! ({:.16e}), which round-trips every f64 bit-exactly; CSV uses '.'
//! decimals, '\n' terminators and a header row. Writers embed the caller's
//! config hash and mesh size so outputs are traceable to their run.

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::geometry::ConvexDomain;
use crate::mesh::Mesh;
use crate::solver::{ProblemKind, Solution};
use crate::thresholds::BetaTracePoint;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

/// 17 significant digits: bit-exact decimal round trip for f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// FNV-1a hash of a canonical config string, hex-encoded; embedded in every
/// output file.
pub fn config_hash(canonical: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in canonical.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    format!("{h:016x}")
}

/// Run metadata stamped into output files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FileMeta {
    pub config_hash: String,
    pub mesh_h: f64,
}

/// Domain spec file: either a named preset with parameters or raw support
/// coefficients.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainSpec {
    Preset {
        preset: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    Coeffs {
        coeffs: CoeffSpec,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffSpec {
    pub a0: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl DomainSpec {
    pub fn build(&self) -> Result<ConvexDomain> {
        match self {
            DomainSpec::Coeffs { coeffs } => {
                ConvexDomain::from_coeffs(coeffs.a0, coeffs.cos.clone(), coeffs.sin.clone())
            }
            DomainSpec::Preset { preset, params } => {
                let get = |k: &str| -> Result<f64> {
                    params.get(k).copied().ok_or_else(|| {
                        Error::invalid_param("params", format!("preset `{preset}` needs `{k}`"))
                    })
                };
                match preset.as_str() {
                    "disk" => ConvexDomain::disk(get("r")?),
                    "ellipse" => ConvexDomain::ellipse(get("a")?, get("b")?),
                    "perturbed_disk" => {
                        let k = get("k")?;
                        if k < 1.0 || k.fract() != 0.0 {
                            return Err(Error::invalid_param(
                                "params",
                                "`k` must be a positive integer",
                            ));
                        }
                        ConvexDomain::perturbed_disk(get("r")?, get("eps")?, k as u32)
                    }
                    other => Err(Error::invalid_param(
                        "preset",
                        format!("unknown preset `{other}` (disk, ellipse, perturbed_disk)"),
                    )),
                }
            }
        }
    }
}

pub fn read_domain(path: &Path) -> Result<ConvexDomain> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::BadInput {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let spec: DomainSpec = serde_json::from_str(&text).map_err(|e| Error::BadInput {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    spec.build()
}

/// Canonical coefficient form, 17 significant digits per value.
pub fn write_domain(path: &Path, domain: &ConvexDomain) -> Result<()> {
    let (a0, cos, sin) = domain.coeffs();
    let mut s = String::from("{\n  \"coeffs\": {\n");
    let _ = writeln!(s, "    \"a0\": {},", fmt_f64(a0));
    let join = |v: &[f64]| v.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(", ");
    let _ = writeln!(s, "    \"cos\": [{}],", join(cos));
    let _ = writeln!(s, "    \"sin\": [{}]", join(sin));
    s.push_str("  }\n}\n");
    std::fs::write(path, s)?;
    Ok(())
}

fn problem_name(p: ProblemKind) -> &'static str {
    match p {
        ProblemKind::RobinEig => "robin_eig",
        ProblemKind::DirichletEig => "dirichlet_eig",
        ProblemKind::RobinTorsion => "robin_torsion",
        ProblemKind::DirichletTorsion => "dirichlet_torsion",
    }
}

/// Solution dump: `<stem>.csv` with vertex_id,x,y,value rows and a
/// `<stem>.json` sidecar with the problem descriptor.
pub fn write_solution(stem: &Path, solution: &Solution, meta: &FileMeta) -> Result<()> {
    let mesh = &solution.mesh;
    let mut csv = String::new();
    let _ = writeln!(csv, "# config_hash={} mesh_h={}", meta.config_hash, fmt_f64(meta.mesh_h));
    csv.push_str("vertex_id,x,y,value\n");
    for v in 0..mesh.n_vertices() {
        let _ = writeln!(
            csv,
            "{v},{},{},{}",
            fmt_f64(mesh.vertices[v][0]),
            fmt_f64(mesh.vertices[v][1]),
            fmt_f64(solution.field[v])
        );
    }
    std::fs::write(stem.with_extension("csv"), csv)?;

    #[derive(Serialize)]
    struct Sidecar<'a> {
        problem: &'static str,
        beta: Option<f64>,
        eigenvalues: &'a [f64],
        mesh_h: f64,
        config_hash: &'a str,
    }
    let sidecar = Sidecar {
        problem: problem_name(solution.problem),
        beta: solution.beta,
        eigenvalues: &solution.eigenvalues,
        mesh_h: meta.mesh_h,
        config_hash: &meta.config_hash,
    };
    std::fs::write(
        stem.with_extension("json"),
        serde_json::to_string_pretty(&sidecar)? + "\n",
    )?;
    Ok(())
}

/// Text mesh dump: one section per entity kind, 0-based indices.
pub fn write_mesh(path: &Path, mesh: &Mesh, meta: &FileMeta) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "# config_hash={} mesh_h={}", meta.config_hash, fmt_f64(meta.mesh_h));
    let _ = writeln!(s, "vertices {}", mesh.n_vertices());
    for p in &mesh.vertices {
        let _ = writeln!(s, "{} {}", fmt_f64(p[0]), fmt_f64(p[1]));
    }
    let _ = writeln!(s, "triangles {}", mesh.triangles.len());
    for t in &mesh.triangles {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "boundary_edges {}", mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let _ = writeln!(
            s,
            "{} {} {} {} {}",
            e.a,
            e.b,
            fmt_f64(e.normal[0]),
            fmt_f64(e.normal[1]),
            fmt_f64(e.weight)
        );
    }
    let _ = writeln!(s, "boundary_distance {}", mesh.n_vertices());
    for d in &mesh.boundary_distance {
        let _ = writeln!(s, "{}", fmt_f64(*d));
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Beta trace CSV: beta,lambda1,min_eig_global,min_eig_tube,pass.
pub fn write_beta_trace(path: &Path, trace: &[BetaTracePoint], meta: &FileMeta) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "# config_hash={} mesh_h={}", meta.config_hash, fmt_f64(meta.mesh_h));
    s.push_str("beta,lambda1,min_eig_global,min_eig_tube,pass\n");
    for p in trace {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_f64(p.beta),
            fmt_f64(p.lambda1),
            fmt_f64(p.min_eig_global),
            fmt_f64(p.min_eig_tube),
            p.pass
        );
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Bound report batch CSV: name,lhs,rhs,direction,pass,vacuous,inputs.
pub fn write_bound_reports(path: &Path, reports: &[BoundReport], meta: &FileMeta) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(s, "# config_hash={} mesh_h={}", meta.config_hash, fmt_f64(meta.mesh_h));
    s.push_str("name,lhs,rhs,direction,pass,vacuous,theorem_backed,inputs\n");
    for r in reports {
        let dir = match r.direction {
            crate::bounds::BoundDirection::GreaterEq => "lhs>=rhs",
            crate::bounds::BoundDirection::LessEq => "lhs<=rhs",
        };
        let inputs = r
            .inputs
            .iter()
            .map(|(k, v)| format!("{k}={}", fmt_f64(*v)))
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            s,
            "{},{},{},{dir},{},{},{},{inputs}",
            r.name,
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            r.pass,
            r.vacuous,
            r.theorem_backed
        );
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Serialize any report type as pretty JSON with a metadata envelope.
pub fn write_json<T: Serialize>(path: &Path, payload: &T, meta: &FileMeta) -> Result<()> {
    #[derive(Serialize)]
    struct Envelope<'a, T> {
        config_hash: &'a str,
        mesh_h: f64,
        #[serde(flatten)]
        payload: &'a T,
    }
    let env = Envelope {
        config_hash: &meta.config_hash,
        mesh_h: meta.mesh_h,
        payload,
    };
    std::fs::write(path, serde_json::to_string_pretty(&env)? + "\n")?;
    Ok(())
}
