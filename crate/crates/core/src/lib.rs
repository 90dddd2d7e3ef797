//! Numerical laboratory for Robin and Dirichlet eigenvalue/torsion problems
//! on uniformly convex planar domains.
//!
//! The pipeline: encode a domain by its support function ([`geometry`]),
//! triangulate it ([`mesh`]), assemble and solve the four boundary value
//! problems with linear finite elements ([`solver`]), transform the solution
//! and test Hessian positive definiteness ([`concavity`]), locate concavity
//! thresholds in the Robin parameter and sweep the Minkowski deformation
//! family ([`thresholds`]), and audit every explicit spectral/gradient bound
//! against measured quantities ([`bounds`]).

pub mod bounds;
pub mod concavity;
mod dense;
pub mod error;
pub mod geometry;
pub mod io;
pub mod jet;
pub mod mesh;
pub mod solver;
pub mod sparse;
pub mod special;
pub mod svg;
pub mod thresholds;

pub use bounds::{BoundDirection, BoundReport, RateFit};
pub use concavity::{ConcavityReport, ConcavityVerdict, HessianField, TransformKind};
pub use error::{Error, Result};
pub use geometry::{BoundarySample, ConvexDomain, DeformationFamily, GeometrySummary};
pub use mesh::Mesh;
pub use solver::{FemSystem, ProblemKind, Solution};
pub use thresholds::{SweepResult, ThresholdOutcome, ThresholdResult};
