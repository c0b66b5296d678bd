use std::collections::HashSet;
use std::time::{Duration, Instant};

use super::pricing::{price, Duals, PricingOptions};
use super::{initial_columns, Column};
use crate::flow::{solve_lp_warm, BasisVar, LinearProgram, LpStatus, Sense, SimplexOptions};
use crate::graph::{build_graph, TaskGraph};
use crate::{Cost, Error, Instance, Minutes, Result};

/// The restricted master after the last LP solve.
#[derive(Clone, Debug)]
pub struct MasterState {
    pub columns: Vec<Column>,
    /// Covering-row duals, one per task.
    pub pi: Vec<f64>,
    /// Fleet-row dual, nonpositive.
    pub sigma: f64,
    /// LP value of the restricted master; infinite while it is infeasible.
    pub lp_value: f64,
    pub iteration: usize,
}

#[derive(Clone, Debug)]
pub struct CgLimits {
    pub max_iterations: usize,
    pub time_limit: Option<Duration>,
    pub max_cols: usize,
}

impl Default for CgLimits {
    fn default() -> Self {
        CgLimits {
            max_iterations: 100_000,
            time_limit: None,
            max_cols: 50,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CgResult {
    /// A valid lower bound: the LP value at convergence, otherwise the
    /// Lagrangian bound of the last iteration.
    pub lb: f64,
    pub converged: bool,
    pub master: MasterState,
    /// Master LP value after each feasible solve.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub graph: TaskGraph,
}

impl CgResult {
    /// The bound rounded up to a whole fixed-point unit, with slack for
    /// floating-point error. Plan costs are integers, so this stays valid.
    pub fn lb_fixed(&self) -> Cost {
        let slack = 1e-6 * (1.0 + self.lb.abs());
        (self.lb - slack).ceil().max(0.0) as Cost
    }

    pub fn pool(&self) -> &[Column] {
        &self.master.columns
    }
}

/// Column generation for the LP relaxation of the set-partitioning master
/// at flexibility `delta`.
pub fn cg_loop(inst: &Instance, delta: Minutes, limits: &CgLimits) -> Result<CgResult> {
    let clock = Instant::now();
    let graph = build_graph(inst, delta);
    let n = graph.task_count();
    let fleet = inst.fleet_size() as f64;

    let mut lp = LinearProgram::new();
    for _ in 0..n {
        lp.add_row(Sense::Eq, 1.0);
    }
    let fleet_row = lp.add_row(Sense::Le, fleet);
    let mut state = MasterState {
        columns: Vec::new(),
        pi: vec![0.0; n],
        sigma: 0.0,
        lp_value: f64::INFINITY,
        iteration: 0,
    };
    let mut known: HashSet<Vec<usize>> = HashSet::new();
    let add = |lp: &mut LinearProgram, state: &mut MasterState, known: &mut HashSet<Vec<usize>>, col: Column| {
        if !known.insert(col.route.tasks.clone()) {
            return false;
        }
        let mut entries: Vec<(usize, f64)> =
            col.covers().into_iter().map(|(t, k)| (t, k as f64)).collect();
        entries.push((fleet_row, 1.0));
        lp.add_column(col.cost() as f64, 0.0, f64::INFINITY, &entries);
        state.columns.push(col);
        true
    };
    for col in initial_columns(&graph) {
        add(&mut lp, &mut state, &mut known, col);
    }

    let opts = SimplexOptions::default();
    let mut basis: Option<Vec<BasisVar>> = None;
    let mut history = Vec::new();
    let mut lb = 0.0;
    let mut converged = false;
    loop {
        let out_of_time = limits.time_limit.is_some_and(|t| clock.elapsed() >= t);
        if state.iteration >= limits.max_iterations || out_of_time {
            break;
        }
        state.iteration += 1;
        let sol = solve_lp_warm(&lp, basis.as_deref(), &opts);
        let (duals, pricing_opts) = match sol.status {
            LpStatus::Optimal => {
                basis = sol.basis.clone();
                state.lp_value = sol.objective;
                state.pi = sol.duals[..n].to_vec();
                state.sigma = sol.duals[fleet_row];
                history.push(sol.objective);
                let duals = Duals {
                    pi: state.pi.clone(),
                    sigma: state.sigma,
                };
                let opts = PricingOptions {
                    max_cols: limits.max_cols,
                    ..PricingOptions::default()
                };
                (duals, opts)
            }
            LpStatus::Infeasible => {
                basis = None;
                let ray = sol.farkas.expect("infeasible solves carry a ray");
                let duals = Duals {
                    pi: ray[..n].to_vec(),
                    sigma: ray[fleet_row],
                };
                let opts = PricingOptions {
                    max_cols: limits.max_cols,
                    cost_weight: 0.0,
                    tolerance: 1e-9,
                };
                (duals, opts)
            }
            status => {
                return Err(Error::Infeasible(format!(
                    "master LP stopped with status {status}"
                )))
            }
        };
        let feasible = sol.status == LpStatus::Optimal;
        let pricing = price(&graph, &duals, &pricing_opts);
        if feasible {
            let rc = pricing.min_rcost.unwrap_or(0.0).min(0.0);
            lb = (state.lp_value + fleet * rc).max(0.0);
        }
        let mut added = 0;
        for col in pricing.columns {
            if add(&mut lp, &mut state, &mut known, col) {
                added += 1;
            }
        }
        if added == 0 {
            if !feasible {
                return Err(Error::Infeasible(format!(
                    "{} trucks cannot cover all {n} tasks with time-feasible routes",
                    inst.fleet_size()
                )));
            }
            lb = state.lp_value;
            converged = true;
            break;
        }
    }
    let iterations = state.iteration;
    Ok(CgResult {
        lb,
        converged,
        master: state,
        history,
        iterations,
        graph,
    })
}
