use std::rc::Rc;
use std::time::{Duration, Instant};

use super::Column;
use crate::flow::{solve_lp_warm, BasisVar, LinearProgram, LpStatus, Sense, SimplexOptions};
use crate::instance::{verify_plan, Plan};
use crate::nf::{repair_schedule, Route};
use crate::{Cost, Error, Instance, Minutes, Result};

#[derive(Clone, Debug)]
pub struct RmhLimits {
    pub time_limit: Option<Duration>,
    pub max_nodes: usize,
}

impl Default for RmhLimits {
    fn default() -> Self {
        RmhLimits {
            time_limit: Some(Duration::from_secs(60)),
            max_nodes: usize::MAX,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RmhResult {
    pub plan: Plan,
    /// Cost of the chosen columns before duplicates were removed.
    pub ip_cost: Cost,
    pub nodes: usize,
    /// The search finished, so `ip_cost` is optimal over the pool.
    pub proven_optimal: bool,
}

/// Picks at most `fleet_size` pool columns covering every task at least once
/// by depth-first branch and bound, then removes duplicate visits and
/// schedules the result at flexibility `delta`.
pub fn restricted_master_ip(
    pool: &[Column],
    inst: &Instance,
    delta: Minutes,
    limits: &RmhLimits,
) -> Result<RmhResult> {
    let clock = Instant::now();
    let n = inst.autonomous().len();
    let mut lp = LinearProgram::new();
    for _ in 0..n {
        lp.add_row(Sense::Ge, 1.0);
    }
    let fleet_row = lp.add_row(Sense::Le, inst.fleet_size() as f64);
    let mut covered = vec![false; n];
    for col in pool {
        let mut entries: Vec<(usize, f64)> = col
            .covers()
            .into_iter()
            .map(|(t, _)| {
                covered[t] = true;
                (t, 1.0)
            })
            .collect();
        entries.push((fleet_row, 1.0));
        lp.add_column(col.cost() as f64, 0.0, 1.0, &entries);
    }
    if let Some(t) = covered.iter().position(|c| !c) {
        return Err(Error::Infeasible(format!(
            "no pool column covers task {}",
            inst.autonomous()[t].id
        )));
    }

    let opts = SimplexOptions::default();
    let mut incumbent: Option<(Cost, Vec<usize>)> = None;
    // Each node starts from its parent's optimal basis.
    type Node = (Vec<(usize, f64)>, Option<Rc<Vec<BasisVar>>>);
    let mut stack: Vec<Node> = vec![(Vec::new(), None)];
    let mut nodes = 0;
    let mut finished = true;
    while let Some((fixings, parent)) = stack.pop() {
        let out_of_time = limits.time_limit.is_some_and(|t| clock.elapsed() >= t);
        if out_of_time || nodes >= limits.max_nodes {
            finished = false;
            break;
        }
        nodes += 1;
        for j in 0..pool.len() {
            lp.set_bounds(j, 0.0, 1.0);
        }
        for &(j, v) in &fixings {
            lp.set_bounds(j, v, v);
        }
        let sol = solve_lp_warm(&lp, parent.as_deref().map(|b| b.as_slice()), &opts);
        if sol.status != LpStatus::Optimal {
            continue;
        }
        if let Some((best, _)) = &incumbent {
            // Costs are integers: only a strictly cheaper plan is of interest.
            if sol.objective > *best as f64 - 1.0 + 1e-6 {
                continue;
            }
        }
        let branch = sol
            .x
            .iter()
            .enumerate()
            .map(|(j, &v)| (j, v.min(1.0 - v)))
            .filter(|&(_, f)| f > 1e-6)
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        match branch {
            None => {
                let chosen: Vec<usize> = (0..pool.len()).filter(|&j| sol.x[j] > 0.5).collect();
                let cost = chosen.iter().map(|&j| pool[j].cost()).sum();
                if incumbent.as_ref().is_none_or(|(best, _)| cost < *best) {
                    incumbent = Some((cost, chosen));
                }
            }
            Some((j, _)) => {
                let basis = sol.basis.map(Rc::new);
                let mut zero = fixings.clone();
                zero.push((j, 0.0));
                let mut one = fixings;
                one.push((j, 1.0));
                stack.push((zero, basis.clone()));
                stack.push((one, basis));
            }
        }
    }

    let Some((ip_cost, chosen)) = incumbent else {
        let why = if finished {
            "no selection of pool columns covers every task within the fleet"
        } else {
            "no integer solution found within the limits"
        };
        return Err(Error::Infeasible(why.into()));
    };
    let routes = dedupe_tasks(
        chosen.iter().map(|&j| pool[j].tasks().to_vec()).collect(),
        inst,
    );
    let routes: Vec<Route> = routes
        .into_iter()
        .map(|tasks| Route {
            tasks,
            start_times: None,
            cost: 0,
        })
        .collect();
    // Splicing out a visit only shortens the route when travel times obey
    // the triangle inequality.
    let plan = repair_schedule(&routes, inst, delta)
        .map_err(|f| Error::Infeasible(format!("removing repeated visits broke a schedule: {f}")))?;
    let report = verify_plan(&plan, inst);
    if let Some(v) = report.violation {
        return Err(Error::PlanMismatch(v.to_string()));
    }
    Ok(RmhResult {
        plan,
        ip_cost,
        nodes,
        proven_optimal: finished,
    })
}

/// Removes repeated visits until every task appears once, each time
/// splicing out the occurrence whose removal saves the most empty distance.
/// Routes left empty are dropped.
pub fn dedupe_tasks(mut routes: Vec<Vec<usize>>, inst: &Instance) -> Vec<Vec<usize>> {
    let auto = inst.autonomous();
    let m = inst.matrix();
    let mut count = vec![0usize; auto.len()];
    for &t in routes.iter().flatten() {
        count[t] += 1;
    }
    loop {
        let mut best: Option<(Cost, usize, usize)> = None;
        for (r, route) in routes.iter().enumerate() {
            for (i, &t) in route.iter().enumerate() {
                if count[t] < 2 {
                    continue;
                }
                let prev = i.checked_sub(1).map(|p| auto[route[p]].dest);
                let next = route.get(i + 1).map(|&s| auto[s].origin);
                let saving = match (prev, next) {
                    (Some(p), Some(s)) => {
                        m.dist(p, auto[t].origin) + m.dist(auto[t].dest, s) - m.dist(p, s)
                    }
                    (Some(p), None) => m.dist(p, auto[t].origin),
                    (None, Some(s)) => m.dist(auto[t].dest, s),
                    (None, None) => 0,
                };
                if best.is_none_or(|(b, _, _)| saving > b) {
                    best = Some((saving, r, i));
                }
            }
        }
        let Some((_, r, i)) = best else { break };
        let t = routes[r].remove(i);
        count[t] -= 1;
    }
    routes.retain(|r| !r.is_empty());
    routes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colgen::initial_columns;
    use crate::graph::build_graph;
    use crate::instance::tests::line_network;
    use crate::instance::{Leg, Task};

    fn inst(n: u32, fleet: usize) -> Instance {
        let tasks = (0..n)
            .map(|i| Task {
                id: i,
                origin: 1 + i % 2,
                dest: 2 - i % 2,
                pickup_time: 1000 * i as i64,
                leg: Leg::Autonomous,
                order_id: i,
            })
            .collect();
        Instance::from_parts(line_network(), tasks, fleet, 60, 30, 10_000, 0.75).unwrap()
    }

    #[test]
    fn singletons_within_fleet() {
        let i = inst(3, 3);
        let pool = initial_columns(&build_graph(&i, 60));
        let res = restricted_master_ip(&pool, &i, 60, &RmhLimits::default()).unwrap();
        assert_eq!(res.plan.routes.len(), 3);
        assert_eq!(res.plan.total_cost, 6000);
    }

    #[test]
    fn singletons_beyond_fleet_fail() {
        let i = inst(3, 2);
        let pool = initial_columns(&build_graph(&i, 60));
        assert!(matches!(
            restricted_master_ip(&pool, &i, 60, &RmhLimits::default()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn duplicate_singleton_is_dropped() {
        let i = inst(3, 3);
        let routes = dedupe_tasks(vec![vec![0, 1, 2], vec![1]], &i);
        assert_eq!(routes, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn splice_picks_largest_saving() {
        // Task 2 runs H0 -> H1. Inside [0, 2, 1] it forces a 2000-unit empty
        // drive back to H0; as a singleton it forces none.
        let i = inst(3, 3);
        let routes = dedupe_tasks(vec![vec![0, 2, 1], vec![2]], &i);
        assert_eq!(routes, vec![vec![0, 1], vec![2]]);
    }
}
