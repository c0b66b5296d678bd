//! Slow, independent reference implementations used as test oracles.

#![allow(dead_code)]

use hubflow::flow::{FlowNetwork, LinearProgram, Sense};
use hubflow::graph::time_window;
use hubflow::instance::{generate_instance, GeneratorParams};
use hubflow::{Cost, Instance, Minutes};

// ---------------------------------------------------------------------------
// Dense LPs and a textbook tableau simplex.

#[derive(Clone, Debug)]
pub struct DenseLp {
    pub cost: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Sense, f64)>,
}

impl DenseLp {
    pub fn to_lp(&self) -> LinearProgram {
        let mut lp = LinearProgram::new();
        for (_, sense, rhs) in &self.rows {
            lp.add_row(*sense, *rhs);
        }
        for j in 0..self.cost.len() {
            let entries: Vec<(usize, f64)> = self
                .rows
                .iter()
                .enumerate()
                .filter(|(_, r)| r.0[j] != 0.0)
                .map(|(i, r)| (i, r.0[j]))
                .collect();
            lp.add_column(self.cost[j], self.lo[j], self.hi[j], &entries);
        }
        lp
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Outcome {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

/// Two-phase full-tableau simplex with Bland's rule. Bounds are removed by
/// substitution (`x = lo + y`, `x = hi - y`, or `x = y+ - y-`) and finite
/// ranges become extra rows.
pub fn tableau_solve(lp: &DenseLp) -> Outcome {
    let n = lp.cost.len();
    // Each original variable is offset + sum(coef * y_k).
    let mut expr: Vec<(f64, Vec<(usize, f64)>)> = Vec::with_capacity(n);
    let mut ny = 0;
    let mut extra_rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for j in 0..n {
        let (l, h) = (lp.lo[j], lp.hi[j]);
        if l.is_finite() {
            expr.push((l, vec![(ny, 1.0)]));
            if h.is_finite() {
                extra_rows.push((vec![(ny, 1.0)], h - l));
            }
            ny += 1;
        } else if h.is_finite() {
            expr.push((h, vec![(ny, -1.0)]));
            ny += 1;
        } else {
            expr.push((0.0, vec![(ny, 1.0), (ny + 1, -1.0)]));
            ny += 2;
        }
    }
    let mut c = vec![0.0; ny];
    let mut c0 = 0.0;
    for j in 0..n {
        c0 += lp.cost[j] * expr[j].0;
        for &(k, a) in &expr[j].1 {
            c[k] += lp.cost[j] * a;
        }
    }
    // Rows over y: (coefficients, sense, rhs).
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
    for (a, sense, b) in &lp.rows {
        let mut coef = vec![0.0; ny];
        let mut rhs = *b;
        for j in 0..n {
            if a[j] == 0.0 {
                continue;
            }
            rhs -= a[j] * expr[j].0;
            for &(k, e) in &expr[j].1 {
                coef[k] += a[j] * e;
            }
        }
        rows.push((coef, *sense, rhs));
    }
    for (terms, b) in extra_rows {
        let mut coef = vec![0.0; ny];
        for (k, a) in terms {
            coef[k] = a;
        }
        rows.push((coef, Sense::Le, b));
    }
    for r in &mut rows {
        if r.2 < 0.0 {
            r.0.iter_mut().for_each(|v| *v = -*v);
            r.2 = -r.2;
            r.1 = match r.1 {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }

    // Columns: y, one slack or surplus per inequality, one artificial per
    // Ge or Eq row. Tableau rows hold [coefficients | rhs].
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let width = ny + n_slack + n_art;
    let mut t = vec![vec![0.0; width + 1]; m];
    let mut basis = vec![0; m];
    let mut is_art = vec![false; width];
    let (mut s, mut a) = (ny, ny + n_slack);
    for (i, (coef, sense, rhs)) in rows.iter().enumerate() {
        t[i][..ny].copy_from_slice(coef);
        t[i][width] = *rhs;
        match sense {
            Sense::Le => {
                t[i][s] = 1.0;
                basis[i] = s;
                s += 1;
            }
            Sense::Ge => {
                t[i][s] = -1.0;
                s += 1;
                t[i][a] = 1.0;
                is_art[a] = true;
                basis[i] = a;
                a += 1;
            }
            Sense::Eq => {
                t[i][a] = 1.0;
                is_art[a] = true;
                basis[i] = a;
                a += 1;
            }
        }
    }

    let eps = 1e-9;
    // Runs Bland's rule for `cost`; columns in `banned` never enter.
    let run = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, cost: &[f64], banned: &[bool]| -> bool {
        loop {
            let mut entering = None;
            for j in 0..width {
                if banned[j] || basis.contains(&j) {
                    continue;
                }
                let d = cost[j] - (0..t.len()).map(|i| cost[basis[i]] * t[i][j]).sum::<f64>();
                if d < -eps {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..t.len() {
                if t[i][j] > eps {
                    let ratio = t[i][width] / t[i][j];
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => ratio < lr - eps || (ratio <= lr + eps && basis[i] < basis[li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return false };
            let p = t[r][j];
            t[r].iter_mut().for_each(|v| *v /= p);
            let row = t[r].clone();
            for (i, other) in t.iter_mut().enumerate() {
                if i != r && other[j] != 0.0 {
                    let f = other[j];
                    for (d, s) in other.iter_mut().zip(&row) {
                        *d -= f * s;
                    }
                }
            }
            basis[r] = j;
        }
    };

    if n_art > 0 {
        let phase1: Vec<f64> = (0..width).map(|j| if is_art[j] { 1.0 } else { 0.0 }).collect();
        run(&mut t, &mut basis, &phase1, &vec![false; width]);
        let infeas: f64 = (0..m).filter(|&i| is_art[basis[i]]).map(|i| t[i][width]).sum();
        if infeas > 1e-7 {
            return Outcome::Infeasible;
        }
        // Drive remaining (zero) artificials out, dropping redundant rows.
        let mut i = 0;
        while i < t.len() {
            if is_art[basis[i]] {
                if let Some(j) = (0..width).find(|&j| !is_art[j] && t[i][j].abs() > 1e-9) {
                    let p = t[i][j];
                    t[i].iter_mut().for_each(|v| *v /= p);
                    let row = t[i].clone();
                    for (k, other) in t.iter_mut().enumerate() {
                        if k != i && other[j] != 0.0 {
                            let f = other[j];
                            for (d, s) in other.iter_mut().zip(&row) {
                                *d -= f * s;
                            }
                        }
                    }
                    basis[i] = j;
                } else {
                    t.remove(i);
                    basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }
    }
    let mut phase2 = vec![0.0; width];
    phase2[..ny].copy_from_slice(&c);
    if !run(&mut t, &mut basis, &phase2, &is_art) {
        return Outcome::Unbounded;
    }
    let obj: f64 = (0..t.len()).map(|i| phase2[basis[i]] * t[i][width]).sum();
    Outcome::Optimal(c0 + obj)
}

// ---------------------------------------------------------------------------
// Min-cost flow by enumeration.

/// Cheapest integral flow, by trying every flow vector within the bounds.
pub fn brute_force_flow(net: &FlowNetwork) -> Option<i64> {
    let arcs = net.arcs();
    let supply = net.supplies();
    let mut flow = vec![0i64; arcs.len()];
    let mut best: Option<i64> = None;
    fn rec(
        k: usize,
        arcs: &[hubflow::flow::FlowArc],
        supply: &[i64],
        flow: &mut Vec<i64>,
        best: &mut Option<i64>,
    ) {
        if k == arcs.len() {
            let mut bal = supply.to_vec();
            for (a, &f) in arcs.iter().zip(flow.iter()) {
                bal[a.tail] -= f;
                bal[a.head] += f;
            }
            if bal.iter().all(|&b| b == 0) {
                let c: i64 = arcs.iter().zip(flow.iter()).map(|(a, &f)| a.cost * f).sum();
                if best.is_none_or(|b| c < b) {
                    *best = Some(c);
                }
            }
            return;
        }
        for f in arcs[k].lower..=arcs[k].upper {
            flow[k] = f;
            rec(k + 1, arcs, supply, flow, best);
        }
    }
    rec(0, arcs, supply, &mut flow, &mut best);
    best
}

/// The flow problem as a linear program: one equality row per node.
pub fn flow_as_lp(net: &FlowNetwork) -> DenseLp {
    let arcs = net.arcs();
    let nodes = net.node_count();
    let mut rows = vec![(vec![0.0; arcs.len()], Sense::Eq, 0.0); nodes];
    for (v, &s) in net.supplies().iter().enumerate() {
        rows[v].2 = s as f64;
    }
    for (k, a) in arcs.iter().enumerate() {
        rows[a.tail].0[k] += 1.0;
        rows[a.head].0[k] -= 1.0;
    }
    DenseLp {
        cost: arcs.iter().map(|a| a.cost as f64).collect(),
        lo: arcs.iter().map(|a| a.lower as f64).collect(),
        hi: arcs.iter().map(|a| a.upper as f64).collect(),
        rows,
    }
}

// ---------------------------------------------------------------------------
// Routes straight from the instance data.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    /// Positions in `Instance::autonomous`, possibly repeating.
    pub tasks: Vec<usize>,
    pub cost: Cost,
}

/// Every time-feasible walk at flexibility `delta`, computed with the
/// earliest-start rule from the matrices. A task may recur, but not twice
/// in a row.
pub fn enumerate_walks(inst: &Instance, delta: Minutes) -> Vec<Walk> {
    let mut out = Vec::new();
    fn extend(
        inst: &Instance,
        delta: Minutes,
        tasks: &mut Vec<usize>,
        cost: Cost,
        finish: Minutes,
        out: &mut Vec<Walk>,
    ) {
        out.push(Walk {
            tasks: tasks.clone(),
            cost,
        });
        let auto = inst.autonomous();
        let m = inst.matrix();
        let last = auto[*tasks.last().unwrap()];
        for (u, next) in auto.iter().enumerate() {
            if u == *tasks.last().unwrap() {
                continue;
            }
            let (earliest, latest) = time_window(next.pickup, delta);
            let start = earliest.max(finish + m.time(last.dest, next.origin));
            if start > latest {
                continue;
            }
            tasks.push(u);
            let c = cost + m.dist(last.dest, next.origin) + next.loaded;
            extend(inst, delta, tasks, c, start + next.duration, out);
            tasks.pop();
        }
    }
    for (t, task) in inst.autonomous().iter().enumerate() {
        let start = time_window(task.pickup, delta).0;
        let mut tasks = vec![t];
        extend(inst, delta, &mut tasks, task.loaded, start + task.duration, &mut out);
    }
    out
}

/// Minimum over all walks of `cost - sum(pi) - sigma`.
pub fn min_reduced_cost(walks: &[Walk], pi: &[f64], sigma: f64) -> Option<f64> {
    walks
        .iter()
        .map(|w| w.cost as f64 - w.tasks.iter().map(|&t| pi[t]).sum::<f64>() - sigma)
        .reduce(f64::min)
}

/// Set-partitioning LP over every walk, solved by the tableau oracle.
pub fn full_master_lp(inst: &Instance, delta: Minutes) -> Outcome {
    let walks = enumerate_walks(inst, delta);
    let n = inst.autonomous().len();
    let cols = walks.len();
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = (0..n).map(|_| (vec![0.0; cols], Sense::Eq, 1.0)).collect();
    rows.push((vec![1.0; cols], Sense::Le, inst.fleet_size() as f64));
    for (k, w) in walks.iter().enumerate() {
        for &t in &w.tasks {
            rows[t].0[k] += 1.0;
        }
    }
    tableau_solve(&DenseLp {
        cost: walks.iter().map(|w| w.cost as f64).collect(),
        lo: vec![0.0; cols],
        hi: vec![f64::INFINITY; cols],
        rows,
    })
}

// ---------------------------------------------------------------------------
// Instance suites.

/// A tiny instance with `tasks` tasks and a fleet of half as many trucks.
pub fn tiny(tasks: usize, seed: u64) -> Instance {
    let params = GeneratorParams {
        fleet_size: tasks.div_ceil(2),
        ..GeneratorParams::tiny(tasks)
    };
    generate_instance(&params, seed).expect("tiny parameters are valid")
}

// ---------------------------------------------------------------------------
// Random kernels inputs.

use rand::Rng;

/// A small network with integer bounds in `0..=3`, costs that may be
/// negative, and balanced supplies.
pub fn random_network(rng: &mut impl Rng) -> FlowNetwork {
    let nodes = rng.gen_range(2..=5);
    let arcs = rng.gen_range(1..=6);
    random_network_sized(rng, nodes, arcs, 2)
}

/// A network with `nodes` nodes and `arcs` arcs whose ranges are at most
/// `spread` wide.
pub fn random_network_sized(rng: &mut impl Rng, nodes: usize, arcs: usize, spread: i64) -> FlowNetwork {
    let mut net = FlowNetwork::new(nodes);
    // Half the networks take their supplies from a flow that fits the
    // bounds, so they are feasible; the rest draw supplies at random.
    let from_flow = rng.gen_bool(0.5);
    let mut balance = vec![0i64; nodes];
    for _ in 0..arcs {
        let tail = rng.gen_range(0..nodes);
        let mut head = rng.gen_range(0..nodes - 1);
        if head >= tail {
            head += 1;
        }
        let lower = if rng.gen_bool(0.2) { 1 } else { 0 };
        let upper = lower + rng.gen_range(0..=spread);
        net.add_arc(tail, head, lower, upper, rng.gen_range(-3..=6));
        let f = rng.gen_range(lower..=upper);
        balance[tail] += f;
        balance[head] -= f;
    }
    if from_flow {
        for (v, &b) in balance.iter().enumerate() {
            net.set_supply(v, b);
        }
        return net;
    }
    let mut total = 0;
    for v in 0..nodes - 1 {
        let s = rng.gen_range(-2..=2);
        net.set_supply(v, s);
        total += s;
    }
    net.set_supply(nodes - 1, -total);
    net
}

/// A dense LP with small integer data. Variables get a mix of bound types;
/// `degenerate` zeroes most right-hand sides.
pub fn random_lp(rng: &mut impl Rng, degenerate: bool) -> DenseLp {
    let n = rng.gen_range(2..=6);
    let m = rng.gen_range(1..=5);
    random_lp_sized(rng, m, n, degenerate)
}

/// A dense LP with `m` rows and `n` variables.
pub fn random_lp_sized(rng: &mut impl Rng, m: usize, n: usize, degenerate: bool) -> DenseLp {
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for _ in 0..n {
        let (l, h) = match rng.gen_range(0..10) {
            0..=4 => (0.0, f64::INFINITY),
            5 | 6 => (0.0, rng.gen_range(1..=6) as f64),
            7 => {
                let l = rng.gen_range(-4..=2) as f64;
                (l, l + rng.gen_range(0..=5) as f64)
            }
            8 => (f64::NEG_INFINITY, rng.gen_range(-2..=4) as f64),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        };
        lo.push(l);
        hi.push(h);
    }
    let cost = (0..n).map(|_| rng.gen_range(-5..=5) as f64).collect();
    let rows = (0..m)
        .map(|_| {
            let a: Vec<f64> = (0..n)
                .map(|_| if rng.gen_bool(0.35) { 0.0 } else { rng.gen_range(-5..=5) as f64 })
                .collect();
            let sense = match rng.gen_range(0..3) {
                0 => Sense::Le,
                1 => Sense::Ge,
                _ => Sense::Eq,
            };
            let rhs = if degenerate && rng.gen_bool(0.8) { 0.0 } else { rng.gen_range(-10..=10) as f64 };
            (a, sense, rhs)
        })
        .collect();
    DenseLp { cost, lo, hi, rows }
}

/// Whether two LP objectives agree to within `1e-6`, relative above one.
pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-6 * (1.0 + a.abs().max(b.abs()))
}

/// Like [`random_lp`], with right-hand sides chosen so that an integer point
/// inside the bounds satisfies every row.
pub fn random_feasible_lp(rng: &mut impl Rng) -> DenseLp {
    let lp = random_lp(rng, false);
    make_feasible(lp, rng)
}

/// Resets the right-hand sides so that an integer point inside the bounds
/// satisfies every row.
pub fn make_feasible(mut lp: DenseLp, rng: &mut impl Rng) -> DenseLp {
    let x0: Vec<f64> = lp
        .lo
        .iter()
        .zip(&lp.hi)
        .map(|(&l, &h)| {
            let l = if l.is_finite() { l } else { -3.0 };
            let h = if h.is_finite() { h } else { l + 4.0 };
            rng.gen_range(l as i64..=h.max(l) as i64) as f64
        })
        .collect();
    for (a, sense, rhs) in &mut lp.rows {
        let ax: f64 = a.iter().zip(&x0).map(|(a, x)| a * x).sum();
        let slack = rng.gen_range(0..=3) as f64;
        *rhs = match sense {
            Sense::Le => ax + slack,
            Sense::Ge => ax - slack,
            Sense::Eq => ax,
        };
    }
    lp
}

// ---------------------------------------------------------------------------
// Plan mutations with the check each one must trip first.

use hubflow::instance::Check;
use hubflow::Plan;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    ShiftStart,
    DropTask,
    DuplicateTask,
    ForeignTask,
    AddOverlap,
    SplitRoutes,
    MisreportCost,
}

impl Mutation {
    pub const ALL: [Mutation; 7] = [
        Mutation::ShiftStart,
        Mutation::DropTask,
        Mutation::DuplicateTask,
        Mutation::ForeignTask,
        Mutation::AddOverlap,
        Mutation::SplitRoutes,
        Mutation::MisreportCost,
    ];

    pub fn expected(self) -> Check {
        match self {
            Mutation::ShiftStart => Check::TimeWindow,
            Mutation::DropTask | Mutation::DuplicateTask | Mutation::ForeignTask => Check::Coverage,
            Mutation::AddOverlap => Check::Overlap,
            Mutation::SplitRoutes => Check::FleetSize,
            Mutation::MisreportCost => Check::Cost,
        }
    }
}

fn visit_positions(plan: &Plan) -> Vec<(usize, usize)> {
    plan.routes
        .iter()
        .enumerate()
        .flat_map(|(r, route)| (0..route.len()).map(move |i| (r, i)))
        .collect()
}

/// Applies `m` to a valid plan. Returns `None` when the plan offers no
/// place for this mutation (for example, no pair that can be squeezed).
pub fn mutate(plan: &Plan, inst: &Instance, m: Mutation, rng: &mut impl Rng) -> Option<Plan> {
    let mut out = plan.clone();
    let positions = visit_positions(plan);
    if positions.is_empty() {
        return None;
    }
    let (r, i) = positions[rng.gen_range(0..positions.len())];
    let delta = inst.flexibility();
    match m {
        Mutation::ShiftStart => {
            let v = &mut out.routes[r][i];
            let p = inst.task(v.task_id).ok()?.pickup_time;
            let (earliest, latest) = time_window(p, delta);
            let k = rng.gen_range(1..=90);
            v.start_time = if rng.gen_bool(0.5) { latest + k } else { earliest - k };
        }
        Mutation::DropTask => {
            out.routes[r].remove(i);
        }
        Mutation::DuplicateTask => {
            let v = out.routes[r][i];
            let (r2, _) = positions[rng.gen_range(0..positions.len())];
            out.routes[r2].push(v);
        }
        Mutation::ForeignTask => {
            let foreign = inst
                .tasks()
                .iter()
                .filter(|t| t.leg != hubflow::Leg::Autonomous)
                .map(|t| t.id)
                .next()
                .unwrap_or(u32::MAX);
            let id = if rng.gen_bool(0.5) { foreign } else { u32::MAX };
            out.routes[r][i].task_id = id;
        }
        Mutation::AddOverlap => {
            // Pull a visit earlier than its predecessor allows, staying
            // inside its window.
            let net = inst.network();
            let mut candidates = Vec::new();
            for (r, route) in plan.routes.iter().enumerate() {
                for i in 1..route.len() {
                    let a = inst.task(route[i - 1].task_id).ok()?;
                    let b = inst.task(route[i].task_id).ok()?;
                    let ready = route[i - 1].start_time
                        + net.time(a.origin, a.dest).ok()?
                        + 2 * inst.service_time()
                        + net.time(a.dest, b.origin).ok()?;
                    let earliest = time_window(b.pickup_time, delta).0;
                    if ready > earliest {
                        candidates.push((r, i, earliest, ready));
                    }
                }
            }
            if candidates.is_empty() {
                return None;
            }
            let (r, i, earliest, ready) = candidates[rng.gen_range(0..candidates.len())];
            out.routes[r][i].start_time = rng.gen_range(earliest..ready);
        }
        Mutation::SplitRoutes => {
            if plan.task_count() <= inst.fleet_size() {
                return None;
            }
            out.routes = positions.iter().map(|&(r, i)| vec![plan.routes[r][i]]).collect();
        }
        Mutation::MisreportCost => {
            let k = rng.gen_range(1..=50);
            if rng.gen_bool(0.5) {
                out.total_cost += k;
            } else {
                out.empty_cost -= k;
            }
        }
    }
    Some(out)
}
