//! Fleet scheduling for autonomous transfer hub networks.
//!
//! Autonomous trucks run the hub-to-hub middle legs of customer orders while
//! conventional trucks handle the first and last miles. This crate plans the
//! autonomous legs: every task must be started inside a flexibility window
//! around its nominal pickup time, a truck carries one load at a time, and the
//! objective is total driven distance (loaded plus empty relocation).
//!
//! Methods provided:
//!
//! * [`nf`]: a network-flow relaxation on the task graph. Its optimum is a
//!   lower bound, and repairing its routes against the time windows at a
//!   ladder of flexibilities yields near-optimal plans (exact at zero
//!   flexibility).
//! * [`colgen`]: a set-partitioning LP solved by column generation with a
//!   labeling pricer, and a restricted-master heuristic for upper bounds.
//! * [`oracle`]: an exhaustive solver for tiny instances and a greedy baseline.
//!
//! Distances are integers in tenths of a mile and times are integer minutes so
//! that every feasibility check is exact.

pub mod bench;
pub mod colgen;
pub mod error;
pub mod flow;
pub mod graph;
pub mod instance;
pub mod nf;
pub mod oracle;
mod parallel;

pub use error::{Error, Result};
pub use instance::{Instance, Leg, Plan, Task};

/// Integer minutes from the start of the planning horizon.
pub type Minutes = i64;

/// Distance in tenths of a mile.
pub type Cost = i64;

/// Fixed-point scale of [`Cost`]: one mile is `COST_SCALE` units.
pub const COST_SCALE: i64 = 10;

/// Converts a fixed-point cost into miles.
pub fn to_miles(cost: Cost) -> f64 {
    cost as f64 / COST_SCALE as f64
}
