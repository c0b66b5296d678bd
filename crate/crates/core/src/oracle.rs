//! Exhaustive search for tiny instances, and a greedy dispatcher.
//!
//! Both work straight from the instance data (travel matrix, pickups,
//! service time) rather than the task graph, so they can check the graph
//! based solvers independently.

use crate::graph::time_window;
use crate::instance::{Plan, Visit};
use crate::{Cost, Error, Instance, Minutes, Result};

/// Largest number of autonomous tasks the exhaustive solver accepts.
pub const ORACLE_LIMIT: usize = 9;

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub optimum: Cost,
    pub plan: Plan,
    pub nodes_explored: u64,
}

#[derive(Clone, Debug)]
pub struct OracleOptions {
    /// Cut branches whose partial cost cannot beat the incumbent.
    pub prune: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { prune: true }
    }
}

pub fn brute_force_optimal(inst: &Instance, delta: Minutes) -> Result<OracleResult> {
    brute_force_with(inst, delta, &OracleOptions::default())
}

/// Enumerates every set of at most `fleet_size` task sequences that covers
/// each task once and respects the windows at `delta`.
pub fn brute_force_with(inst: &Instance, delta: Minutes, opts: &OracleOptions) -> Result<OracleResult> {
    let n = inst.autonomous().len();
    if n > ORACLE_LIMIT {
        return Err(Error::TooLarge {
            tasks: n,
            limit: ORACLE_LIMIT,
        });
    }
    let mut s = Search {
        data: TaskData::new(inst, delta),
        fleet: inst.fleet_size(),
        prune: opts.prune,
        routes: Vec::new(),
        starts: Vec::new(),
        assigned: vec![false; n],
        left: n,
        best: None,
        nodes: 0,
    };
    s.open_route(0);
    let Some((optimum, routes, starts)) = s.best else {
        return Err(Error::Infeasible(format!(
            "no schedule covers all {n} tasks with {} trucks",
            inst.fleet_size()
        )));
    };
    let plan = to_plan(inst, &routes, &starts);
    debug_assert_eq!(plan.total_cost, optimum);
    Ok(OracleResult {
        optimum,
        plan,
        nodes_explored: s.nodes,
    })
}

struct TaskData {
    window: Vec<(Minutes, Minutes)>,
    duration: Vec<Minutes>,
    loaded: Vec<Cost>,
    /// Empty time and distance from the end of one task to the start of another.
    reloc_time: Vec<Vec<Minutes>>,
    reloc_dist: Vec<Vec<Cost>>,
}

impl TaskData {
    fn new(inst: &Instance, delta: Minutes) -> Self {
        let net = inst.network();
        let tasks: Vec<_> = inst
            .autonomous()
            .iter()
            .map(|a| &inst.tasks()[a.task])
            .collect();
        let time = |a: u32, b: u32| net.time(a, b).expect("task locations exist");
        let dist = |a: u32, b: u32| net.dist(a, b).expect("task locations exist");
        TaskData {
            window: tasks.iter().map(|t| time_window(t.pickup_time, delta)).collect(),
            duration: tasks
                .iter()
                .map(|t| time(t.origin, t.dest) + 2 * inst.service_time())
                .collect(),
            loaded: tasks.iter().map(|t| dist(t.origin, t.dest)).collect(),
            reloc_time: tasks
                .iter()
                .map(|a| tasks.iter().map(|b| time(a.dest, b.origin)).collect())
                .collect(),
            reloc_dist: tasks
                .iter()
                .map(|a| tasks.iter().map(|b| dist(a.dest, b.origin)).collect())
                .collect(),
        }
    }

    /// Start of `next` when it follows `prev` started at `start`, if its
    /// window allows.
    fn follow(&self, prev: usize, start: Minutes, next: usize) -> Option<Minutes> {
        let ready = start + self.duration[prev] + self.reloc_time[prev][next];
        let (earliest, latest) = self.window[next];
        let s = earliest.max(ready);
        (s <= latest).then_some(s)
    }
}

type Best = Option<(Cost, Vec<Vec<usize>>, Vec<Vec<Minutes>>)>;

struct Search {
    data: TaskData,
    fleet: usize,
    prune: bool,
    routes: Vec<Vec<usize>>,
    starts: Vec<Vec<Minutes>>,
    assigned: Vec<bool>,
    left: usize,
    best: Best,
    nodes: u64,
}

impl Search {
    fn bound(&self, cost: Cost) -> bool {
        if !self.prune {
            return false;
        }
        let Some((best, _, _)) = &self.best else {
            return false;
        };
        let rest: Cost = (0..self.assigned.len())
            .filter(|&t| !self.assigned[t])
            .map(|t| self.data.loaded[t])
            .sum();
        cost + rest >= *best
    }

    /// Opens a route that must eventually contain the lowest unassigned task,
    /// so every set of routes is generated once.
    fn open_route(&mut self, cost: Cost) {
        self.nodes += 1;
        if self.left == 0 {
            if self.best.as_ref().is_none_or(|(b, _, _)| cost < *b) {
                self.best = Some((cost, self.routes.clone(), self.starts.clone()));
            }
            return;
        }
        if self.routes.len() == self.fleet || self.bound(cost) {
            return;
        }
        let must = self.assigned.iter().position(|a| !a).unwrap();
        for t in 0..self.assigned.len() {
            if self.assigned[t] {
                continue;
            }
            let start = self.data.window[t].0;
            self.assign(t);
            self.routes.push(vec![t]);
            self.starts.push(vec![start]);
            self.extend(cost + self.data.loaded[t], must);
            self.routes.pop();
            self.starts.pop();
            self.unassign(t);
        }
    }

    fn extend(&mut self, cost: Cost, must: usize) {
        self.nodes += 1;
        if self.bound(cost) {
            return;
        }
        if self.assigned[must] && self.routes.last().unwrap().contains(&must) {
            self.open_route(cost);
        }
        let (last, start) = {
            let r = self.routes.last().unwrap();
            (*r.last().unwrap(), *self.starts.last().unwrap().last().unwrap())
        };
        for u in 0..self.assigned.len() {
            if self.assigned[u] {
                continue;
            }
            let Some(s) = self.data.follow(last, start, u) else {
                continue;
            };
            let added = self.data.reloc_dist[last][u] + self.data.loaded[u];
            self.assign(u);
            self.routes.last_mut().unwrap().push(u);
            self.starts.last_mut().unwrap().push(s);
            self.extend(cost + added, must);
            self.routes.last_mut().unwrap().pop();
            self.starts.last_mut().unwrap().pop();
            self.unassign(u);
        }
    }

    fn assign(&mut self, t: usize) {
        self.assigned[t] = true;
        self.left -= 1;
    }

    fn unassign(&mut self, t: usize) {
        self.assigned[t] = false;
        self.left += 1;
    }
}

fn to_plan(inst: &Instance, routes: &[Vec<usize>], starts: &[Vec<Minutes>]) -> Plan {
    let auto = inst.autonomous();
    let visits = routes
        .iter()
        .zip(starts)
        .map(|(r, s)| {
            r.iter()
                .zip(s)
                .map(|(&t, &start_time)| Visit {
                    task_id: auto[t].id,
                    start_time,
                })
                .collect()
        })
        .collect();
    Plan::from_routes(visits, inst).expect("tasks belong to the instance")
}

/// Dispatches tasks in pickup order, each to the open route with the
/// cheapest feasible empty drive to it, opening routes only when none fits.
pub fn greedy_baseline(inst: &Instance, delta: Minutes) -> Result<Plan> {
    let data = TaskData::new(inst, delta);
    let auto = inst.autonomous();
    let mut order: Vec<usize> = (0..auto.len()).collect();
    order.sort_by_key(|&t| (auto[t].pickup, t));
    let mut routes: Vec<Vec<usize>> = Vec::new();
    let mut starts: Vec<Vec<Minutes>> = Vec::new();
    for t in order {
        let mut best: Option<(Cost, usize, Minutes)> = None;
        for (r, route) in routes.iter().enumerate() {
            let last = *route.last().unwrap();
            let Some(s) = data.follow(last, *starts[r].last().unwrap(), t) else {
                continue;
            };
            let added = data.reloc_dist[last][t];
            if best.is_none_or(|(b, _, _)| added < b) {
                best = Some((added, r, s));
            }
        }
        match best {
            Some((_, r, s)) => {
                routes[r].push(t);
                starts[r].push(s);
            }
            None if routes.len() < inst.fleet_size() => {
                routes.push(vec![t]);
                starts.push(vec![data.window[t].0]);
            }
            None => {
                return Err(Error::Infeasible(format!(
                    "greedy dispatch ran out of trucks at task {}",
                    auto[t].id
                )))
            }
        }
    }
    Ok(to_plan(inst, &routes, &starts))
}
