//! Independent feasibility check for plans.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::plan::plan_costs;
use super::{Instance, Leg, Plan};
use crate::graph::time_window;
use crate::{Cost, Minutes};

/// The checks performed by [`verify_plan`], in evaluation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Check {
    Coverage,
    FleetSize,
    TimeWindow,
    Overlap,
    Cost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    UnknownTask { task_id: u32 },
    NotAutonomous { task_id: u32 },
    Missing { task_id: u32 },
    Duplicate { task_id: u32 },
    TooManyRoutes { routes: usize, fleet_size: usize },
    Window { task_id: u32, start: Minutes, earliest: Minutes, latest: Minutes },
    Overlap { route: usize, prev: u32, next: u32, ready: Minutes, start: Minutes },
    CostMismatch { reported: (Cost, Cost), actual: (Cost, Cost) },
}

impl Violation {
    pub fn check(&self) -> Check {
        match self {
            Violation::UnknownTask { .. }
            | Violation::NotAutonomous { .. }
            | Violation::Missing { .. }
            | Violation::Duplicate { .. } => Check::Coverage,
            Violation::TooManyRoutes { .. } => Check::FleetSize,
            Violation::Window { .. } => Check::TimeWindow,
            Violation::Overlap { .. } => Check::Overlap,
            Violation::CostMismatch { .. } => Check::Cost,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownTask { task_id } => write!(f, "task {task_id} is not in the instance"),
            Violation::NotAutonomous { task_id } => write!(f, "task {task_id} is not autonomous"),
            Violation::Missing { task_id } => write!(f, "task {task_id} is not covered"),
            Violation::Duplicate { task_id } => write!(f, "task {task_id} is covered more than once"),
            Violation::TooManyRoutes { routes, fleet_size } => {
                write!(f, "{routes} routes exceed the fleet of {fleet_size}")
            }
            Violation::Window { task_id, start, earliest, latest } => write!(
                f,
                "task {task_id} starts at {start}, outside [{earliest}, {latest}]"
            ),
            Violation::Overlap { route, prev, next, ready, start } => write!(
                f,
                "route {route}: task {next} starts at {start} but the truck is free after task {prev} only at {ready}"
            ),
            Violation::CostMismatch { reported, actual } => write!(
                f,
                "reported cost (total {}, empty {}) differs from recomputed (total {}, empty {})",
                reported.0, reported.1, actual.0, actual.1
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub violation: Option<Violation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }

    pub fn failed_check(&self) -> Option<Check> {
        self.violation.as_ref().map(Violation::check)
    }
}

/// Checks coverage, fleet size, time windows, non-overlap and reported cost,
/// stopping at the first violated check.
pub fn verify_plan(plan: &Plan, inst: &Instance) -> VerificationReport {
    let violation = coverage(plan, inst)
        .or_else(|| fleet(plan, inst))
        .or_else(|| windows(plan, inst))
        .or_else(|| overlaps(plan, inst))
        .or_else(|| cost(plan, inst));
    VerificationReport { violation }
}

fn coverage(plan: &Plan, inst: &Instance) -> Option<Violation> {
    let mut seen: HashMap<u32, usize> = HashMap::new();
    for v in plan.routes.iter().flatten() {
        let Ok(task) = inst.task(v.task_id) else {
            return Some(Violation::UnknownTask { task_id: v.task_id });
        };
        if task.leg != Leg::Autonomous {
            return Some(Violation::NotAutonomous { task_id: v.task_id });
        }
        let n = seen.entry(v.task_id).or_default();
        *n += 1;
        if *n > 1 {
            return Some(Violation::Duplicate { task_id: v.task_id });
        }
    }
    inst.autonomous()
        .iter()
        .find(|a| !seen.contains_key(&a.id))
        .map(|a| Violation::Missing { task_id: a.id })
}

fn fleet(plan: &Plan, inst: &Instance) -> Option<Violation> {
    let routes = plan.routes.iter().filter(|r| !r.is_empty()).count();
    (routes > inst.fleet_size()).then_some(Violation::TooManyRoutes {
        routes,
        fleet_size: inst.fleet_size(),
    })
}

fn windows(plan: &Plan, inst: &Instance) -> Option<Violation> {
    plan.routes.iter().flatten().find_map(|v| {
        let task = inst.task(v.task_id).ok()?;
        let (earliest, latest) = time_window(task.pickup_time, inst.flexibility());
        (v.start_time < earliest || v.start_time > latest).then_some(Violation::Window {
            task_id: v.task_id,
            start: v.start_time,
            earliest,
            latest,
        })
    })
}

fn overlaps(plan: &Plan, inst: &Instance) -> Option<Violation> {
    let net = inst.network();
    for (r, route) in plan.routes.iter().enumerate() {
        for pair in route.windows(2) {
            let (a, b) = (inst.task(pair[0].task_id).ok()?, inst.task(pair[1].task_id).ok()?);
            let ready = pair[0].start_time
                + net.time(a.origin, a.dest).ok()?
                + 2 * inst.service_time()
                + net.time(a.dest, b.origin).ok()?;
            if ready > pair[1].start_time {
                return Some(Violation::Overlap {
                    route: r,
                    prev: a.id,
                    next: b.id,
                    ready,
                    start: pair[1].start_time,
                });
            }
        }
    }
    None
}

fn cost(plan: &Plan, inst: &Instance) -> Option<Violation> {
    let actual = plan_costs(&plan.routes, inst).ok()?;
    let reported = (plan.total_cost, plan.empty_cost);
    (actual != reported).then_some(Violation::CostMismatch { reported, actual })
}
