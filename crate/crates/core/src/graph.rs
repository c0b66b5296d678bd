//! The task graph: one vertex per autonomous task plus a source and a sink.
//!
//! An arc `t -> t'` means one truck can perform `t` and then `t'`. Its time is
//! the duration of `t` plus the empty drive to the origin of `t'`; its cost is
//! the loaded distance of `t` plus that empty drive. Arcs out of the source
//! are free and arcs into the sink carry only the service of their tail, so a
//! route's cost is a plain sum over its arcs.

use std::collections::VecDeque;
use std::fmt::Write;

use crate::instance::Instance;
use crate::{Cost, Minutes};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Source,
    Task(usize),
    Sink,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: Vertex,
    pub to: Vertex,
    pub time: Minutes,
    pub cost: Cost,
}

/// Start window `[max(0, p - delta), p + delta]`.
pub fn time_window(pickup: Minutes, delta: Minutes) -> (Minutes, Minutes) {
    ((pickup - delta).max(0), pickup + delta)
}

/// Time to perform autonomous task `from` and reposition to the origin of `to`.
pub fn arc_time(inst: &Instance, from: usize, to: usize) -> Minutes {
    let (a, b) = (&inst.autonomous()[from], &inst.autonomous()[to]);
    a.duration + inst.reloc_time(a, b)
}

/// Loaded distance of `from` plus the empty drive to the origin of `to`.
pub fn arc_cost(inst: &Instance, from: usize, to: usize) -> Cost {
    let (a, b) = (&inst.autonomous()[from], &inst.autonomous()[to]);
    a.loaded + inst.reloc_cost(a, b)
}

#[derive(Clone, Debug)]
pub struct TaskGraph {
    n_tasks: usize,
    delta: Minutes,
    arcs: Vec<Arc>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
    windows: Vec<(Minutes, Minutes)>,
}

/// Result of [`TaskGraph::is_acyclic`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Acyclicity {
    /// A topological order of the tasks.
    Acyclic(Vec<usize>),
    /// A directed cycle, closed: the first task is repeated at the end.
    Cyclic(Vec<usize>),
}

impl Acyclicity {
    pub fn is_acyclic(&self) -> bool {
        matches!(self, Acyclicity::Acyclic(_))
    }
}

/// Builds the task graph at flexibility `delta`, keeping `t -> t'` iff
/// `p(t) - delta + arc_time(t, t') <= p(t') + delta`.
pub fn build_graph(inst: &Instance, delta: Minutes) -> TaskGraph {
    let tasks = inst.autonomous();
    let n = tasks.len();
    let mut g = TaskGraph {
        n_tasks: n,
        delta,
        arcs: Vec::new(),
        out_arcs: vec![Vec::new(); n + 2],
        in_arcs: vec![Vec::new(); n + 2],
        windows: tasks.iter().map(|t| time_window(t.pickup, delta)).collect(),
    };
    for t in 0..n {
        g.push(Arc {
            from: Vertex::Source,
            to: Vertex::Task(t),
            time: 0,
            cost: 0,
        });
    }
    for (t, a) in tasks.iter().enumerate() {
        for (u, b) in tasks.iter().enumerate() {
            if t == u {
                continue;
            }
            let time = arc_time(inst, t, u);
            if a.pickup - delta + time <= b.pickup + delta {
                g.push(Arc {
                    from: Vertex::Task(t),
                    to: Vertex::Task(u),
                    time,
                    cost: arc_cost(inst, t, u),
                });
            }
        }
        g.push(Arc {
            from: Vertex::Task(t),
            to: Vertex::Sink,
            time: a.duration,
            cost: a.loaded,
        });
    }
    g
}

impl TaskGraph {
    fn push(&mut self, arc: Arc) {
        let id = self.arcs.len();
        let (f, t) = (self.index(arc.from), self.index(arc.to));
        self.out_arcs[f].push(id);
        self.in_arcs[t].push(id);
        self.arcs.push(arc);
    }

    fn index(&self, v: Vertex) -> usize {
        match v {
            Vertex::Task(t) => t,
            Vertex::Source => self.n_tasks,
            Vertex::Sink => self.n_tasks + 1,
        }
    }

    pub fn task_count(&self) -> usize {
        self.n_tasks
    }

    pub fn delta(&self) -> Minutes {
        self.delta
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: usize) -> &Arc {
        &self.arcs[id]
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Ids of the arcs leaving `v`, in insertion order.
    pub fn out_arcs(&self, v: Vertex) -> &[usize] {
        &self.out_arcs[self.index(v)]
    }

    pub fn in_arcs(&self, v: Vertex) -> &[usize] {
        &self.in_arcs[self.index(v)]
    }

    pub fn window(&self, task: usize) -> (Minutes, Minutes) {
        self.windows[task]
    }

    /// Task-to-task arcs only.
    pub fn task_arcs(&self) -> impl Iterator<Item = (usize, usize, &Arc)> + '_ {
        self.arcs.iter().filter_map(|a| match (a.from, a.to) {
            (Vertex::Task(t), Vertex::Task(u)) => Some((t, u, a)),
            _ => None,
        })
    }

    pub fn has_task_arc(&self, from: usize, to: usize) -> bool {
        self.out_arcs[from]
            .iter()
            .any(|&id| self.arcs[id].to == Vertex::Task(to))
    }

    /// Topological sort over task-to-task arcs, or a witness cycle.
    pub fn is_acyclic(&self) -> Acyclicity {
        let n = self.n_tasks;
        let mut indeg = vec![0usize; n];
        for (_, u, _) in self.task_arcs() {
            indeg[u] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&t| indeg[t] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(t) = queue.pop_front() {
            order.push(t);
            for &id in &self.out_arcs[t] {
                if let Vertex::Task(u) = self.arcs[id].to {
                    indeg[u] -= 1;
                    if indeg[u] == 0 {
                        queue.push_back(u);
                    }
                }
            }
        }
        if order.len() == n {
            return Acyclicity::Acyclic(order);
        }

        // Every remaining task has a remaining predecessor: walk backwards
        // until a task repeats.
        let remaining: Vec<bool> = indeg.iter().map(|&d| d > 0).collect();
        let start = remaining.iter().position(|&r| r).expect("cycle exists");
        let mut seen_at = vec![usize::MAX; n];
        let mut walk = Vec::new();
        let mut t = start;
        while seen_at[t] == usize::MAX {
            seen_at[t] = walk.len();
            walk.push(t);
            t = self.in_arcs[t]
                .iter()
                .find_map(|&id| match self.arcs[id].from {
                    Vertex::Task(p) if remaining[p] => Some(p),
                    _ => None,
                })
                .expect("remaining task has a remaining predecessor");
        }
        let mut cycle: Vec<usize> = walk[seen_at[t]..].to_vec();
        cycle.reverse();
        cycle.push(cycle[0]);
        Acyclicity::Cyclic(cycle)
    }

    /// Graphviz rendering for debugging.
    pub fn to_dot(&self, inst: &Instance) -> String {
        let mut s = String::from("digraph tasks {\n  src [shape=box];\n  snk [shape=box];\n");
        let name = |v: Vertex| match v {
            Vertex::Source => "src".to_string(),
            Vertex::Sink => "snk".to_string(),
            Vertex::Task(t) => format!("t{}", inst.autonomous()[t].id),
        };
        for t in 0..self.n_tasks {
            let (e, l) = self.windows[t];
            let _ = writeln!(
                s,
                "  {} [label=\"{} [{e},{l}]\"];",
                name(Vertex::Task(t)),
                inst.autonomous()[t].id
            );
        }
        for a in &self.arcs {
            let _ = writeln!(
                s,
                "  {} -> {} [label=\"{}/{}\"];",
                name(a.from),
                name(a.to),
                a.time,
                a.cost
            );
        }
        s.push_str("}\n");
        s
    }
}
