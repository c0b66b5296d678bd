//! Network-flow relaxation of the fleet scheduling problem.
//!
//! Dropping subtour elimination and the start-time variables from the
//! vehicle-flow model leaves a min-cost flow problem on the task graph, so
//! its optimum is integral and a lower bound. Its routes are turned into
//! plans by scheduling every task as early as possible; when the graph was
//! built at zero flexibility this always succeeds and the plan is optimal.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::flow::{solve_min_cost_flow, FlowError, FlowNetwork, FlowSolution};
use crate::graph::{arc_time, build_graph, time_window, TaskGraph, Vertex};
use crate::instance::{Plan, Visit};
use crate::{parallel, Cost, Error, Instance, Minutes, Result, COST_SCALE};

/// Min-cost flow encoding of the task graph.
///
/// Node `2t` is the entry of task `t` and `2t + 1` its exit; the source and
/// sink follow. Flow arc `i` for `i < graph.arc_count()` mirrors graph arc
/// `i`, so a [`FlowSolution`] can be read against the graph directly. Then
/// come the task arcs (flow fixed at one, carrying the loaded distance) and
/// the source-to-sink bypass for idle trucks.
#[derive(Clone, Debug)]
pub struct NfModel {
    pub network: FlowNetwork,
    pub source: usize,
    pub sink: usize,
    /// Flow arc index of each task's entry-to-exit arc.
    pub task_arcs: Vec<usize>,
    pub bypass: usize,
}

impl NfModel {
    pub fn new(g: &TaskGraph, inst: &Instance) -> Self {
        let n = g.task_count();
        let (source, sink) = (2 * n, 2 * n + 1);
        let fleet = inst.fleet_size() as i64;
        let mut net = FlowNetwork::new(2 * n + 2);
        let auto = inst.autonomous();
        for arc in g.arcs() {
            let (tail, head, cost) = match (arc.from, arc.to) {
                (Vertex::Source, Vertex::Task(t)) => (source, 2 * t, 0),
                (Vertex::Task(t), Vertex::Task(u)) => {
                    (2 * t + 1, 2 * u, inst.reloc_cost(&auto[t], &auto[u]))
                }
                (Vertex::Task(t), Vertex::Sink) => (2 * t + 1, sink, 0),
                _ => unreachable!("task graph has no source-sink arcs"),
            };
            net.add_arc(tail, head, 0, 1, cost);
        }
        let task_arcs = (0..n)
            .map(|t| net.add_arc(2 * t, 2 * t + 1, 1, 1, auto[t].loaded))
            .collect();
        let bypass = net.add_arc(source, sink, 0, fleet, 0);
        net.set_supply(source, fleet);
        net.set_supply(sink, -fleet);
        NfModel {
            network: net,
            source,
            sink,
            task_arcs,
            bypass,
        }
    }

    /// Trucks that leave the depot in `flow`.
    pub fn trucks_used(&self, flow: &FlowSolution) -> i64 {
        self.network.supplies()[self.source] - flow.flow[self.bypass]
    }
}

/// An optimal NF solution at one flexibility.
#[derive(Clone, Debug)]
pub struct NfRelaxation {
    pub delta: Minutes,
    pub graph: TaskGraph,
    pub model: NfModel,
    pub flow: FlowSolution,
    pub lb: Cost,
}

/// Solves the NF relaxation at flexibility `delta`. The optimum is a lower
/// bound on any plan at that flexibility.
pub fn solve_nf_lb(inst: &Instance, delta: Minutes) -> Result<NfRelaxation> {
    if delta < 0 {
        return Err(Error::InvalidParams(format!("flexibility {delta} is negative")));
    }
    let graph = build_graph(inst, delta);
    let model = NfModel::new(&graph, inst);
    let flow = match solve_min_cost_flow(&model.network) {
        Ok(f) => f,
        Err(FlowError::Infeasible { .. }) => {
            return Err(Error::Infeasible(format!(
                "{} trucks cannot cover {} tasks at flexibility {delta}",
                inst.fleet_size(),
                graph.task_count()
            )))
        }
        Err(e) => return Err(e.into()),
    };
    Ok(NfRelaxation {
        delta,
        lb: flow.objective,
        graph,
        model,
        flow,
    })
}

/// A truck route; `tasks` are positions in [`Instance::autonomous`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub tasks: Vec<usize>,
    pub start_times: Option<Vec<Minutes>>,
    /// Sum of graph arc costs from source to sink.
    pub cost: Cost,
}

/// A closed walk of flow that never touches the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub tasks: Vec<usize>,
    pub cost: Cost,
}

#[derive(Clone, Debug, Default)]
pub struct Extraction {
    pub routes: Vec<Route>,
    pub cycles: Vec<Cycle>,
}

/// Decomposes an NF flow into source-to-sink routes, in the order of the
/// source arcs, and the cycles left over.
pub fn extract_routes(flow: &FlowSolution, g: &TaskGraph) -> Extraction {
    let n = g.task_count();
    let mut succ: Vec<Option<usize>> = vec![None; n];
    for t in 0..n {
        succ[t] = g
            .out_arcs(Vertex::Task(t))
            .iter()
            .copied()
            .find(|&id| flow.flow[id] > 0);
    }
    let mut seen = vec![false; n];
    let mut out = Extraction::default();
    for &id in g.out_arcs(Vertex::Source) {
        if flow.flow[id] == 0 {
            continue;
        }
        let Vertex::Task(mut t) = g.arc(id).to else {
            unreachable!()
        };
        let mut route = Route {
            tasks: Vec::new(),
            start_times: None,
            cost: g.arc(id).cost,
        };
        loop {
            seen[t] = true;
            route.tasks.push(t);
            let next = succ[t].expect("flow leaves every task");
            let arc = g.arc(next);
            route.cost += arc.cost;
            match arc.to {
                Vertex::Task(u) => t = u,
                _ => break,
            }
        }
        out.routes.push(route);
    }
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = Cycle {
            tasks: Vec::new(),
            cost: 0,
        };
        let mut t = start;
        while !seen[t] {
            seen[t] = true;
            cycle.tasks.push(t);
            let arc = g.arc(succ[t].expect("flow leaves every task"));
            cycle.cost += arc.cost;
            let Vertex::Task(u) = arc.to else {
                unreachable!("tasks off every source path lie on cycles")
            };
            t = u;
        }
        out.cycles.push(cycle);
    }
    out
}

/// Where earliest-start scheduling of a route breaks a time window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepairFailure {
    pub route: usize,
    pub task_id: u32,
    pub arrival: Minutes,
    pub latest: Minutes,
}

impl fmt::Display for RepairFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "route {}: task {} reached at {} after its latest start {}",
            self.route, self.task_id, self.arrival, self.latest
        )
    }
}

/// Earliest start times along one route, or the index of the first task
/// whose window closes before the truck can get there.
pub fn earliest_starts(
    inst: &Instance,
    tasks: &[usize],
    delta: Minutes,
) -> std::result::Result<Vec<Minutes>, (usize, Minutes, Minutes)> {
    let auto = inst.autonomous();
    let mut starts = Vec::with_capacity(tasks.len());
    let mut ready = Minutes::MIN;
    for (i, &t) in tasks.iter().enumerate() {
        let (earliest, latest) = time_window(auto[t].pickup, delta);
        let start = earliest.max(ready);
        if start > latest {
            return Err((i, start, latest));
        }
        starts.push(start);
        if let Some(&u) = tasks.get(i + 1) {
            ready = start + arc_time(inst, t, u);
        }
    }
    Ok(starts)
}

/// Schedules every route at `target_delta` by earliest start.
pub fn repair_schedule(
    routes: &[Route],
    inst: &Instance,
    target_delta: Minutes,
) -> std::result::Result<Plan, RepairFailure> {
    let auto = inst.autonomous();
    let mut visits = Vec::with_capacity(routes.len());
    for (r, route) in routes.iter().enumerate() {
        let starts = earliest_starts(inst, &route.tasks, target_delta).map_err(
            |(i, arrival, latest)| RepairFailure {
                route: r,
                task_id: auto[route.tasks[i]].id,
                arrival,
                latest,
            },
        )?;
        visits.push(
            route
                .tasks
                .iter()
                .zip(starts)
                .map(|(&t, start_time)| Visit {
                    task_id: auto[t].id,
                    start_time,
                })
                .collect(),
        );
    }
    Ok(Plan::from_routes(visits, inst).expect("route tasks belong to the instance"))
}

/// `{0, delta/2, delta}` together with the multiples of 30 up to 120 that
/// do not exceed `delta`.
pub fn default_ladder(delta: Minutes) -> Vec<Minutes> {
    let mut rungs = vec![0, delta / 2, delta];
    rungs.extend([30, 60, 90, 120].into_iter().filter(|&d| d <= delta));
    rungs.sort_unstable();
    rungs.dedup();
    rungs
}

/// Every multiple of 15 up to `delta`, plus `delta`. Ladders built this
/// way are nested as `delta` grows.
pub fn nested_ladder(delta: Minutes) -> Vec<Minutes> {
    let mut rungs: Vec<Minutes> = (0..=delta.max(0)).step_by(15).collect();
    rungs.push(delta);
    rungs.sort_unstable();
    rungs.dedup();
    rungs
}

/// What happened at one rung of the ladder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RungOutcome {
    Plan { cost: Cost },
    Cycles { count: usize },
    RepairFailed { failure: RepairFailure },
    Infeasible,
}

#[derive(Clone, Debug, Serialize)]
pub struct RungReport {
    pub delta: Minutes,
    pub lb: Option<Cost>,
    pub outcome: RungOutcome,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct LadderResult {
    pub best: Plan,
    pub best_delta: Minutes,
    pub rungs: Vec<RungReport>,
}

/// Solves NF at every rung, repairs the acyclic extractions against
/// `delta`, and keeps the cheapest plan (ties go to the smaller rung).
pub fn delta_ladder_ub(inst: &Instance, delta: Minutes, ladder: &[Minutes]) -> Result<LadderResult> {
    if !ladder.contains(&0) {
        return Err(Error::InvalidParams("the ladder must contain 0".into()));
    }
    if let Some(&d) = ladder.iter().find(|&&d| d < 0 || d > delta) {
        return Err(Error::InvalidParams(format!(
            "ladder rung {d} is outside [0, {delta}]"
        )));
    }
    let mut rungs = ladder.to_vec();
    rungs.sort_unstable();
    rungs.dedup();

    let results = parallel::map(&rungs, |&d| {
        let clock = Instant::now();
        let (lb, outcome, plan) = match solve_nf_lb(inst, d) {
            Err(Error::Infeasible(_)) => (None, RungOutcome::Infeasible, None),
            Err(e) => return Err(e),
            Ok(nf) => {
                let ex = extract_routes(&nf.flow, &nf.graph);
                if !ex.cycles.is_empty() {
                    let outcome = RungOutcome::Cycles {
                        count: ex.cycles.len(),
                    };
                    (Some(nf.lb), outcome, None)
                } else {
                    match repair_schedule(&ex.routes, inst, delta) {
                        Ok(plan) => {
                            let outcome = RungOutcome::Plan {
                                cost: plan.total_cost,
                            };
                            (Some(nf.lb), outcome, Some(plan))
                        }
                        Err(failure) => (Some(nf.lb), RungOutcome::RepairFailed { failure }, None),
                    }
                }
            }
        };
        let report = RungReport {
            delta: d,
            lb,
            outcome,
            seconds: clock.elapsed().as_secs_f64(),
        };
        Ok((report, plan))
    });

    let mut best: Option<(Plan, Minutes)> = None;
    let mut reports = Vec::with_capacity(rungs.len());
    for r in results {
        let (report, plan) = r?;
        if let Some(plan) = plan {
            if best.as_ref().is_none_or(|(b, _)| plan.total_cost < b.total_cost) {
                best = Some((plan, report.delta));
            }
        }
        reports.push(report);
    }
    match best {
        Some((best, best_delta)) => Ok(LadderResult {
            best,
            best_delta,
            rungs: reports,
        }),
        None => Err(Error::Infeasible(format!(
            "no ladder rung produced a schedule within flexibility {delta}"
        ))),
    }
}

/// `(ub - lb) / lb`; zero when the bounds agree.
pub fn gap(ub: Cost, lb: Cost) -> f64 {
    if ub == lb {
        0.0
    } else if lb <= 0 {
        f64::INFINITY
    } else {
        (ub - lb) as f64 / lb as f64
    }
}

/// Gap as a percentage with one decimal, e.g. `"0.5%"`.
pub fn format_gap(gap: f64) -> String {
    format!("{:.1}%", 100.0 * gap)
}

/// Bounds for one method on one instance. Costs are fixed-point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub method: String,
    pub lb: Option<Cost>,
    pub lb_time: f64,
    pub ub: Option<Cost>,
    pub ub_time: Option<f64>,
    pub gap: Option<f64>,
    pub delta_used_for_ub: Option<Minutes>,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str = "method,lb_miles,lb_time_s,ub_miles,gap,ub_time_s,delta_used_for_ub";

    pub fn new(method: &str, lb: Option<Cost>, lb_time: f64) -> Self {
        BoundReport {
            method: method.to_string(),
            lb,
            lb_time,
            ub: None,
            ub_time: None,
            gap: None,
            delta_used_for_ub: None,
        }
    }

    /// Records an upper bound and recomputes the gap.
    pub fn with_ub(mut self, ub: Cost, ub_time: f64, delta: Option<Minutes>) -> Self {
        self.ub = Some(ub);
        self.ub_time = Some(ub_time);
        self.delta_used_for_ub = delta;
        self.gap = self.lb.map(|lb| gap(ub, lb));
        self
    }

    /// One CSV row; missing values are `-`.
    pub fn csv_row(&self) -> String {
        let miles = |c: Option<Cost>| c.map_or("-".to_string(), fixed_miles);
        let secs = |s: Option<f64>| s.map_or("-".to_string(), |s| format!("{s:.3}"));
        format!(
            "{},{},{},{},{},{},{}",
            self.method,
            miles(self.lb),
            secs(self.lb.map(|_| self.lb_time)),
            miles(self.ub),
            self.gap.map_or("-".to_string(), |g| format!("{g:.6}")),
            secs(self.ub_time),
            self.delta_used_for_ub
                .map_or("-".to_string(), |d| d.to_string()),
        )
    }
}

/// Fixed-point cost as miles with one decimal, without rounding.
pub fn fixed_miles(cost: Cost) -> String {
    let sign = if cost < 0 { "-" } else { "" };
    let c = cost.abs();
    format!("{sign}{}.{}", c / COST_SCALE, c % COST_SCALE)
}

/// NF lower bound at `delta` and the ladder upper bound.
pub fn nf_bound_report(
    inst: &Instance,
    delta: Minutes,
    ladder: &[Minutes],
) -> Result<(BoundReport, Option<LadderResult>)> {
    let clock = Instant::now();
    let nf = solve_nf_lb(inst, delta)?;
    let report = BoundReport::new("NF", Some(nf.lb), clock.elapsed().as_secs_f64());
    let clock = Instant::now();
    match delta_ladder_ub(inst, delta, ladder) {
        Ok(ladder) => {
            let report = report.with_ub(
                ladder.best.total_cost,
                clock.elapsed().as_secs_f64(),
                Some(ladder.best_delta),
            );
            Ok((report, Some(ladder)))
        }
        Err(Error::Infeasible(_)) => Ok((report, None)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::line_network;
    use crate::instance::{verify_plan, Leg, Task};

    fn task(id: u32, origin: u32, dest: u32, p: Minutes) -> Task {
        Task {
            id,
            origin,
            dest,
            pickup_time: p,
            leg: Leg::Autonomous,
            order_id: id,
        }
    }

    // H0 = 1 and H1 = 2 are 200 minutes and 2000 units apart.
    fn inst(tasks: Vec<Task>, fleet: usize, delta: Minutes, service: Minutes) -> Instance {
        Instance::from_parts(line_network(), tasks, fleet, delta, service, 10_000, 0.75).unwrap()
    }

    #[test]
    fn chain_lower_bound() {
        // Out and back and out again, each leg 200 minutes plus 60 of service.
        let i = inst(
            vec![task(0, 1, 2, 0), task(1, 2, 1, 260), task(2, 1, 2, 520)],
            1,
            0,
            30,
        );
        let nf = solve_nf_lb(&i, 0).unwrap();
        assert_eq!(nf.lb, 6000);
        assert_eq!(nf.model.trucks_used(&nf.flow), 1);
        nf.model.network.check_optimality(&nf.flow).unwrap();
    }

    #[test]
    fn fleet_too_small() {
        let i = inst(vec![task(0, 1, 2, 0), task(1, 1, 2, 10)], 1, 0, 30);
        assert!(matches!(solve_nf_lb(&i, 0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn lower_bound_monotone_in_delta() {
        let i = inst(
            vec![task(0, 1, 2, 0), task(1, 2, 1, 200), task(2, 1, 2, 400)],
            3,
            60,
            30,
        );
        let a = solve_nf_lb(&i, 0).unwrap().lb;
        let b = solve_nf_lb(&i, 60).unwrap().lb;
        assert!(b <= a);
        assert_eq!((a, b), (6000, 6000));
    }

    #[test]
    fn repair_recurrence() {
        // Arc time H0 -> H1 task then back to H0: 200 + 60 + 200 = 460.
        let i = inst(vec![task(0, 1, 2, 100), task(1, 1, 2, 350)], 1, 60, 30);
        let route = Route {
            tasks: vec![0, 1],
            start_times: None,
            cost: 0,
        };
        let err = repair_schedule(std::slice::from_ref(&route), &i, 60).unwrap_err();
        assert_eq!((err.task_id, err.arrival, err.latest), (1, 500, 410));

        let i = inst(vec![task(0, 1, 2, 100), task(1, 2, 1, 350)], 1, 60, 30);
        let plan = repair_schedule(&[route], &i, 60).unwrap();
        assert_eq!(plan.routes[0][0].start_time, 40);
        assert_eq!(plan.routes[0][1].start_time, 300);
        assert!(verify_plan(&plan, &i).passed());
    }

    #[test]
    fn zero_flexibility_is_exact() {
        let i = inst(
            vec![task(0, 1, 2, 0), task(1, 2, 1, 300), task(2, 1, 2, 100), task(3, 2, 1, 700)],
            2,
            0,
            30,
        );
        let res = delta_ladder_ub(&i, 0, &[0]).unwrap();
        assert_eq!(res.best.total_cost, solve_nf_lb(&i, 0).unwrap().lb);
        assert!(verify_plan(&res.best, &i).passed());
    }

    #[test]
    fn cycles_are_reported() {
        // Two tasks that can follow each other both ways once S = 0 and the
        // windows are wide.
        let i = inst(vec![task(0, 1, 2, 200), task(1, 2, 1, 200)], 2, 120, 0);
        let g = build_graph(&i, 120);
        assert!(!g.is_acyclic().is_acyclic());
        let model = NfModel::new(&g, &i);
        let mut flow = vec![0; model.network.arcs().len()];
        for (id, a) in g.arcs().iter().enumerate() {
            if matches!((a.from, a.to), (Vertex::Task(_), Vertex::Task(_))) {
                flow[id] = 1;
            }
        }
        for &id in &model.task_arcs {
            flow[id] = 1;
        }
        flow[model.bypass] = 2;
        let objective = model
            .network
            .arcs()
            .iter()
            .zip(&flow)
            .map(|(a, f)| a.cost * f)
            .sum();
        let sol = FlowSolution {
            flow,
            objective,
            potentials: vec![0; model.network.node_count()],
        };
        let ex = extract_routes(&sol, &g);
        assert!(ex.routes.is_empty());
        assert_eq!(ex.cycles.len(), 1);
        assert_eq!(ex.cycles[0].tasks, vec![0, 1]);
        assert_eq!(ex.cycles[0].cost, objective);
        assert_eq!(objective, 4000);
    }

    #[test]
    fn ladder_shapes() {
        assert_eq!(default_ladder(60), vec![0, 30, 60]);
        assert_eq!(default_ladder(90), vec![0, 30, 45, 60, 90]);
        assert_eq!(default_ladder(0), vec![0]);
        assert_eq!(nested_ladder(90), vec![0, 15, 30, 45, 60, 75, 90]);
        assert_eq!(nested_ladder(50), vec![0, 15, 30, 45, 50]);
    }

    #[test]
    fn ladder_rejects_bad_rungs() {
        let i = inst(vec![task(0, 1, 2, 0)], 1, 60, 30);
        assert!(delta_ladder_ub(&i, 60, &[30]).is_err());
        assert!(delta_ladder_ub(&i, 60, &[0, 90]).is_err());
    }

    #[test]
    fn gap_arithmetic() {
        assert_eq!(format_gap(gap(135_834, 122_061)), "11.3%");
        assert_eq!(format_gap(gap(122_658, 122_061)), "0.5%");
        assert_eq!(gap(5, 5), 0.0);
        assert_eq!(fixed_miles(1_220_615), "122061.5");
    }

    #[test]
    fn report_csv() {
        let r = BoundReport::new("NF", Some(100), 0.5).with_ub(110, 1.0, Some(30));
        assert_eq!(r.csv_row(), "NF,10.0,0.500,11.0,0.100000,1.000,30");
        assert_eq!(
            BoundReport::new("CG", None, 1.0).csv_row(),
            "CG,-,-,-,-,-,-"
        );
    }
}
