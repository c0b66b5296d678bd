use serde::{Deserialize, Serialize};

use super::Instance;
use crate::{Cost, Error, Minutes, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Visit {
    pub task_id: u32,
    pub start_time: Minutes,
}

/// A schedule for the autonomous fleet: one visit sequence per truck.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plan {
    pub routes: Vec<Vec<Visit>>,
    /// Loaded plus empty distance.
    pub total_cost: Cost,
    /// Empty relocation distance only.
    pub empty_cost: Cost,
}

impl Plan {
    /// Builds a plan and fills in its costs. Empty routes are dropped.
    pub fn from_routes(routes: Vec<Vec<Visit>>, inst: &Instance) -> Result<Plan> {
        let routes: Vec<_> = routes.into_iter().filter(|r| !r.is_empty()).collect();
        let (total_cost, empty_cost) = plan_costs(&routes, inst)?;
        Ok(Plan {
            routes,
            total_cost,
            empty_cost,
        })
    }

    pub fn task_count(&self) -> usize {
        self.routes.iter().map(Vec::len).sum()
    }
}

/// Recomputes `(total, empty)` distance for a set of visit sequences.
pub(crate) fn plan_costs(routes: &[Vec<Visit>], inst: &Instance) -> Result<(Cost, Cost)> {
    let net = inst.network();
    let mut total = 0;
    let mut empty = 0;
    for route in routes {
        let mut prev: Option<u32> = None;
        for v in route {
            let task = inst.task(v.task_id)?;
            total += net.dist(task.origin, task.dest)?;
            if let Some(p) = prev {
                let reloc = net.dist(p, task.origin)?;
                total += reloc;
                empty += reloc;
            }
            prev = Some(task.dest);
        }
    }
    Ok((total, empty))
}

/// Checks that every visit names an autonomous task of `inst`.
pub(crate) fn check_same_instance(plan: &Plan, inst: &Instance) -> Result<()> {
    for v in plan.routes.iter().flatten() {
        if inst.auto_position(v.task_id).is_none() {
            return Err(Error::PlanMismatch(format!(
                "task {} is not an autonomous task of the instance",
                v.task_id
            )));
        }
    }
    Ok(())
}
