//! Fair transmission strategies for cooperative data exchange (CDE).
//!
//! A set of clients each hold part of a packet set and broadcast coded
//! packets until everyone can decode everything. Among all integer
//! transmission strategies with a fixed sum-rate that achieve universal
//! recovery, this crate finds the fairest one.
//!
//! The feasible strategies form an M-convex set, the integer points of the
//! base polyhedron of a partition-truncated submodular function. The crate
//! provides:
//!
//! * [`instance`]: instances, the instance file format and the table of
//!   cut-constraint right-hand sides.
//! * [`polyhedra`]: crossing and truncated submodular functions, membership
//!   tests, tight sets, greedy vertices and the minimum sum-rate.
//! * [`discrete_convex`]: fairness objectives, brute-force enumeration of
//!   the feasible region and checkers for M-convexity.
//! * [`solvers`]: steepest descent over the feasible region and the
//!   marginal-cost greedy over the submodular polyhedron.
//! * [`rlnc`]: a random linear network coding simulation that checks a
//!   strategy really lets every client decode.

pub mod discrete_convex;
mod error;
pub mod instance;
pub mod polyhedra;
pub mod rlnc;
pub mod solvers;
mod subset;

pub use discrete_convex::{
    brute_force_argmin, check_exchange_axiom, check_mconvex_inequality, check_optimality,
    enumerate_r_alpha, evaluate, l1_size, EnumeratedRegion, FairnessObjective, ObjectiveKind,
};
pub use error::{Error, Result};
pub use instance::{missing_table, parse_instance, random_instance, Instance, MissingTable};
pub use polyhedra::{
    crossing_value, greedy_vertex, in_p, in_r_alpha, min_sum_rate, tight_sets, truncation_table,
    OracleCounter, RateVector, TruncationTable,
};
pub use rlnc::{verify_recovery, RecoveryReport, DEFAULT_FIELD};
pub use solvers::{da, sda, weighted_min, Algorithm, SolverTrace};
pub use subset::ClientSubset;

/// Absolute tolerance used for every floating-point objective comparison.
pub const OBJECTIVE_TOLERANCE: f64 = 1e-9;
