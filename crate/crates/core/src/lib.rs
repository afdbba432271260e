//! Exact Tverberg partitions.
//!
//! Given `n = (r - 1)(d + 1) + 1` rational points in `R^d`, [`solve`] finds a
//! partition into `r` blocks whose convex hulls share a point, together with
//! an exact certificate. Points are moved one at a time from a configuration
//! with a known partition, and the partition is repaired by a single pivot
//! whenever a convex coefficient hits zero.

pub mod arith;
pub mod generate;
pub mod model;
mod noise;
pub mod oracle;
pub mod pathfollow;
pub mod solver;

pub use arith::{parse_rat, Rat, RatMatrix, RatVector};
pub use generate::{random_instance, Distribution};
pub use model::{
    build_system, replaced_column_det, solve_partition, tverberg_number, verify_certificate,
    Certificate, Instance, ModelError, Partition, Point, TverbergSystem, Violation,
};
pub use oracle::{enumerate_tverberg, OracleError, OracleReport};
pub use pathfollow::{Degeneracy, EventRecord, InitialConfig, PathError, PathState};
pub use solver::{perturb, solve, CertifiedFor, SolveError, SolveResult, SolveStats, SolverConfig};
