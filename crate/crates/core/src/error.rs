use thiserror::Error;

/// Errors produced by domain construction, meshing and solves.
#[derive(Debug, Error)]
pub enum Error {
    /// The support function violates uniform convexity somewhere.
    #[error("domain is not uniformly convex: h + h'' = {value:.6e} at theta = {theta:.12}")]
    NotUniformlyConvex { theta: f64, value: f64 },

    /// A parameter failed a precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    /// The mesher could not reach the quality floor.
    #[error("mesh quality floor not reached: min angle {min_angle_deg:.2} deg after {passes} smoothing passes")]
    MeshQuality { min_angle_deg: f64, passes: usize },

    /// An iterative solve did not converge.
    #[error("{what} did not converge: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        residual: f64,
        iterations: usize,
    },

    /// A factorization or least-squares system broke down.
    #[error("linear algebra breakdown in {context}: {reason}")]
    Breakdown { context: &'static str, reason: String },

    /// A field that must be strictly positive (Hopf lemma) is not.
    #[error("field must be strictly positive on its mask (Hopf boundary minimum): value {value:.6e} at vertex {vertex}")]
    NonPositiveField { vertex: usize, value: f64 },

    /// Two solutions live on different meshes.
    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),

    /// Malformed domain-spec or config file.
    #[error("bad input file {path}: {reason}")]
    BadInput { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid_param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }
}
