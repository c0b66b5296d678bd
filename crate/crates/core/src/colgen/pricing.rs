//! Labeling pricer: shortest reduced-cost walks through the task graph
//! under time windows.
//!
//! Arc times are positive, so labels are settled in order of their time and
//! every label that could dominate a new one has already been created.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use super::Column;
use crate::graph::{TaskGraph, Vertex};
use crate::nf::Route;
use crate::{Cost, Minutes};

/// Master duals: `pi` per covering row and `sigma` for the fleet row.
#[derive(Clone, Debug, PartialEq)]
pub struct Duals {
    pub pi: Vec<f64>,
    pub sigma: f64,
}

#[derive(Clone, Debug)]
pub struct PricingOptions {
    pub max_cols: usize,
    /// Weight on route cost: 1 for ordinary pricing, 0 to price against a
    /// Farkas ray of an infeasible master.
    pub cost_weight: f64,
    /// Columns are returned only below `-tolerance`.
    pub tolerance: f64,
}

impl Default for PricingOptions {
    fn default() -> Self {
        PricingOptions {
            max_cols: 50,
            cost_weight: 1.0,
            tolerance: 1e-5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Pricing {
    /// Distinct columns in order of increasing reduced cost.
    pub columns: Vec<Column>,
    /// Reduced costs of `columns`.
    pub reduced_costs: Vec<f64>,
    /// Smallest reduced cost over all routes, negative or not.
    pub min_rcost: Option<f64>,
    pub labels: usize,
}

#[derive(Clone, Debug)]
struct Label {
    vertex: usize,
    rcost: f64,
    cost: Cost,
    time: Minutes,
    parent: Option<usize>,
    alive: bool,
}

/// Reduced cost of a route is `w * cost - sum(pi over its tasks) - sigma`.
pub fn price(g: &TaskGraph, duals: &Duals, opts: &PricingOptions) -> Pricing {
    let n = g.task_count();
    assert_eq!(duals.pi.len(), n, "one dual per task");
    let w = opts.cost_weight;
    let mut labels: Vec<Label> = Vec::new();
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut heap = BinaryHeap::new();

    for &id in g.out_arcs(Vertex::Source) {
        let arc = g.arc(id);
        let Vertex::Task(t) = arc.to else { continue };
        let label = Label {
            vertex: t,
            rcost: w * arc.cost as f64 - duals.pi[t] - duals.sigma,
            cost: arc.cost,
            time: g.window(t).0,
            parent: None,
            alive: true,
        };
        if let Some(id) = insert(&mut labels, &mut at, label) {
            heap.push(Reverse((labels[id].time, id)));
        }
    }

    let mut done: Vec<(f64, usize, Cost)> = Vec::new();
    while let Some(Reverse((_, id))) = heap.pop() {
        if !labels[id].alive {
            continue;
        }
        let (t, rcost, cost, time) = {
            let l = &labels[id];
            (l.vertex, l.rcost, l.cost, l.time)
        };
        for &aid in g.out_arcs(Vertex::Task(t)) {
            let arc = g.arc(aid);
            match arc.to {
                Vertex::Sink => {
                    done.push((rcost + w * arc.cost as f64, id, cost + arc.cost));
                }
                Vertex::Task(u) => {
                    let (earliest, latest) = g.window(u);
                    let start = earliest.max(time + arc.time);
                    if start > latest {
                        continue;
                    }
                    let label = Label {
                        vertex: u,
                        rcost: rcost + w * arc.cost as f64 - duals.pi[u],
                        cost: cost + arc.cost,
                        time: start,
                        parent: Some(id),
                        alive: true,
                    };
                    if let Some(nid) = insert(&mut labels, &mut at, label) {
                        heap.push(Reverse((start, nid)));
                    }
                }
                Vertex::Source => unreachable!(),
            }
        }
    }

    done.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let min_rcost = done.first().map(|d| d.0);
    let mut seen = HashSet::new();
    let mut columns = Vec::new();
    let mut reduced_costs = Vec::new();
    for &(rc, id, cost) in &done {
        if rc >= -opts.tolerance || columns.len() >= opts.max_cols {
            break;
        }
        let (tasks, starts) = walk(&labels, id);
        if !seen.insert(tasks.clone()) {
            continue;
        }
        columns.push(Column {
            route: Route {
                tasks,
                start_times: Some(starts),
                cost,
            },
        });
        reduced_costs.push(rc);
    }
    Pricing {
        columns,
        reduced_costs,
        min_rcost,
        labels: labels.len(),
    }
}

/// Adds `label` unless an existing label at its vertex dominates it, and
/// retires the labels it dominates.
fn insert(labels: &mut Vec<Label>, at: &mut [Vec<usize>], label: Label) -> Option<usize> {
    let bucket = &mut at[label.vertex];
    if bucket.iter().any(|&o| {
        let o = &labels[o];
        o.rcost <= label.rcost && o.time <= label.time
    }) {
        return None;
    }
    bucket.retain(|&o| {
        let other = &mut labels[o];
        let dominated = label.rcost <= other.rcost && label.time <= other.time;
        if dominated {
            other.alive = false;
        }
        !dominated
    });
    let id = labels.len();
    bucket.push(id);
    labels.push(label);
    Some(id)
}

fn walk(labels: &[Label], mut id: usize) -> (Vec<usize>, Vec<Minutes>) {
    let mut tasks = Vec::new();
    let mut starts = Vec::new();
    loop {
        let l = &labels[id];
        tasks.push(l.vertex);
        starts.push(l.time);
        match l.parent {
            Some(p) => id = p,
            None => break,
        }
    }
    tasks.reverse();
    starts.reverse();
    (tasks, starts)
}
