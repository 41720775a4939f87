//! Constraint-based 3D scene layout.
//!
//! Objects are boxes arranged hierarchically (room, furniture, things on
//! furniture). Each level of the tree is an optimization problem: a weighted
//! sum of spatial-relation scores, subject to hard relation constraints,
//! solved by simulated annealing with Metropolis acceptance. Around that core
//! sit a brute-force grid oracle, bounding-box anchored camera/object
//! trajectories, a verify-then-commit loop that grows a manual of asset
//! programs, and file I/O.

pub mod anneal;
pub mod error;
pub mod forge;
pub mod geom;
pub mod io;
pub mod oracle;
pub mod problem;
pub mod relation;
pub mod rng;
pub mod scene;
pub mod trajectory;

pub use anneal::{anneal, solve_hierarchical, AnnealConfig, Solution};
pub use error::{Error, Result};
pub use geom::{Vec2, Vec3};
pub use problem::{Breakdown, LayoutProblem, ProblemConfig};
pub use relation::{Comparator, RelationKind, RelationParams, RelationTerm, TermMode};
pub use scene::{compose_pose, Domain, Extent, Layout, ObjectNode, Pose};
