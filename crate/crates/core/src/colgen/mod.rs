//! Column generation over feasible truck routes.
//!
//! The master problem chooses at most `fleet_size` routes covering every task
//! once. Its LP relaxation is solved over a growing pool of columns, new
//! columns come from a labeling pricer on the task graph, and the final pool
//! feeds an integer program whose solution is cleaned into a plan.

mod master;
mod pricing;
mod rmh;

pub use master::{cg_loop, CgLimits, CgResult, MasterState};
pub use pricing::{price, Duals, Pricing, PricingOptions};
pub use rmh::{dedupe_tasks, restricted_master_ip, RmhLimits, RmhResult};

use serde::{Deserialize, Serialize};

use crate::graph::{TaskGraph, Vertex};
use crate::nf::Route;
use crate::Cost;

/// A route variable of the master problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub route: Route,
}

impl Column {
    pub fn cost(&self) -> Cost {
        self.route.cost
    }

    pub fn tasks(&self) -> &[usize] {
        &self.route.tasks
    }

    /// `(task, times covered)` sorted by task. Walks may revisit a task
    /// when the graph has cycles.
    pub fn covers(&self) -> Vec<(usize, u32)> {
        let mut t = self.route.tasks.clone();
        t.sort_unstable();
        let mut out: Vec<(usize, u32)> = Vec::with_capacity(t.len());
        for task in t {
            match out.last_mut() {
                Some((last, n)) if *last == task => *n += 1,
                _ => out.push((task, 1)),
            }
        }
        out
    }
}

/// One singleton route per task.
pub fn initial_columns(g: &TaskGraph) -> Vec<Column> {
    (0..g.task_count())
        .map(|t| {
            let cost: Cost = g
                .out_arcs(Vertex::Task(t))
                .iter()
                .map(|&id| g.arc(id))
                .find(|a| a.to == Vertex::Sink)
                .expect("every task has a sink arc")
                .cost;
            Column {
                route: Route {
                    tasks: vec![t],
                    start_times: Some(vec![g.window(t).0]),
                    cost,
                },
            }
        })
        .collect()
}
