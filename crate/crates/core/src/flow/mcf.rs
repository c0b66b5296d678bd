//! Min-cost flow by successive shortest augmenting paths with node
//! potentials. All arithmetic is integral.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlowArc {
    pub tail: usize,
    pub head: usize,
    pub lower: i64,
    pub upper: i64,
    pub cost: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlowNetwork {
    arcs: Vec<FlowArc>,
    supplies: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowSolution {
    pub flow: Vec<i64>,
    pub objective: i64,
    /// Node potentials: `cost + pot[tail] - pot[head]` is positive only on
    /// arcs at their lower bound and negative only on arcs at their upper bound.
    pub potentials: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("malformed network: {0}")]
    Malformed(String),
    /// The nodes in `deficient` hold more supply than the arcs leaving the
    /// set can carry.
    #[error("no feasible flow: {} node(s) cannot ship their supply", deficient.len())]
    Infeasible { deficient: Vec<usize> },
    #[error("arithmetic overflow in flow computation")]
    Overflow,
}

/// Magnitude limit for costs times capacities, leaving headroom for
/// potentials and path lengths.
const MAGNITUDE_LIMIT: i128 = (i64::MAX / 4) as i128;

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            arcs: Vec::new(),
            supplies: vec![0; nodes],
        }
    }

    pub fn add_node(&mut self) -> usize {
        self.supplies.push(0);
        self.supplies.len() - 1
    }

    pub fn add_arc(&mut self, tail: usize, head: usize, lower: i64, upper: i64, cost: i64) -> usize {
        self.arcs.push(FlowArc {
            tail,
            head,
            lower,
            upper,
            cost,
        });
        self.arcs.len() - 1
    }

    /// Positive supply is a source, negative a sink.
    pub fn set_supply(&mut self, node: usize, supply: i64) {
        self.supplies[node] = supply;
    }

    pub fn node_count(&self) -> usize {
        self.supplies.len()
    }

    pub fn arcs(&self) -> &[FlowArc] {
        &self.arcs
    }

    pub fn supplies(&self) -> &[i64] {
        &self.supplies
    }

    fn validate(&self) -> Result<(), FlowError> {
        let n = self.node_count();
        let mut magnitude: i128 = 0;
        let mut capacity: i128 = 0;
        for (i, a) in self.arcs.iter().enumerate() {
            if a.tail >= n || a.head >= n {
                return Err(FlowError::Malformed(format!("arc {i} references a missing node")));
            }
            if a.lower < 0 || a.lower > a.upper {
                return Err(FlowError::Malformed(format!(
                    "arc {i} has bounds [{}, {}]",
                    a.lower, a.upper
                )));
            }
            magnitude += (a.cost as i128).abs() * (a.upper as i128).max(1);
            capacity += a.upper as i128;
        }
        if self.supplies.iter().map(|&s| s as i128).sum::<i128>() != 0 {
            return Err(FlowError::Malformed("supplies do not balance".into()));
        }
        capacity += self.supplies.iter().map(|&s| (s as i128).abs()).sum::<i128>();
        if magnitude > MAGNITUDE_LIMIT || capacity > MAGNITUDE_LIMIT {
            return Err(FlowError::Overflow);
        }
        Ok(())
    }

    /// Checks bounds, conservation, the objective and complementary
    /// slackness of a claimed optimal solution.
    pub fn check_optimality(&self, sol: &FlowSolution) -> Result<(), String> {
        if sol.flow.len() != self.arcs.len() || sol.potentials.len() != self.node_count() {
            return Err("solution dimensions do not match the network".into());
        }
        let mut net_out = vec![0i64; self.node_count()];
        let mut objective: i128 = 0;
        for (i, (a, &f)) in self.arcs.iter().zip(&sol.flow).enumerate() {
            if f < a.lower || f > a.upper {
                return Err(format!("arc {i}: flow {f} outside [{}, {}]", a.lower, a.upper));
            }
            net_out[a.tail] += f;
            net_out[a.head] -= f;
            objective += a.cost as i128 * f as i128;
            let rc = a.cost + sol.potentials[a.tail] - sol.potentials[a.head];
            if rc > 0 && f != a.lower {
                return Err(format!("arc {i}: reduced cost {rc} > 0 but flow {f} above lower bound"));
            }
            if rc < 0 && f != a.upper {
                return Err(format!("arc {i}: reduced cost {rc} < 0 but flow {f} below upper bound"));
            }
        }
        if let Some(v) = (0..self.node_count()).find(|&v| net_out[v] != self.supplies[v]) {
            return Err(format!(
                "node {v}: net outflow {} differs from supply {}",
                net_out[v], self.supplies[v]
            ));
        }
        if objective != sol.objective as i128 {
            return Err(format!("objective {} but flow costs {objective}", sol.objective));
        }
        Ok(())
    }
}

struct Residual {
    to: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn with_nodes(n: usize) -> Self {
        Residual {
            to: Vec::new(),
            cap: Vec::new(),
            cost: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    /// Adds an edge and its reverse; the reverse of edge `e` is `e ^ 1`.
    fn link(&mut self, u: usize, v: usize, cap: i64, rev_cap: i64, cost: i64) {
        let e = self.to.len();
        self.to.extend([v, u]);
        self.cap.extend([cap, rev_cap]);
        self.cost.extend([cost, -cost]);
        self.adj[u].push(e);
        self.adj[v].push(e + 1);
    }
}

pub fn solve_min_cost_flow(net: &FlowNetwork) -> Result<FlowSolution, FlowError> {
    net.validate()?;
    let n = net.node_count();
    let (source, sink) = (n, n + 1);
    let mut res = Residual::with_nodes(n + 2);

    // Start every arc at the bound that makes its residual costs
    // nonnegative, so zero potentials are feasible.
    let start: Vec<i64> = net
        .arcs
        .iter()
        .map(|a| if a.cost >= 0 { a.lower } else { a.upper })
        .collect();
    let mut excess = net.supplies.clone();
    for (a, &f) in net.arcs.iter().zip(&start) {
        excess[a.tail] -= f;
        excess[a.head] += f;
        res.link(a.tail, a.head, a.upper - f, f - a.lower, a.cost);
    }
    let mut need = 0i64;
    for (v, &x) in excess.iter().enumerate() {
        if x > 0 {
            res.link(source, v, x, 0, 0);
            need += x;
        } else if x < 0 {
            res.link(v, sink, -x, 0, 0);
        }
    }

    let mut pot = vec![0i64; n + 2];
    let mut dist = vec![i64::MAX; n + 2];
    let mut parent = vec![usize::MAX; n + 2];
    let mut heap = BinaryHeap::new();
    let mut shipped = 0i64;
    while shipped < need {
        dist.fill(i64::MAX);
        parent.fill(usize::MAX);
        dist[source] = 0;
        heap.push(Reverse((0i64, source)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &e in &res.adj[u] {
                if res.cap[e] <= 0 {
                    continue;
                }
                let v = res.to[e];
                let rc = res.cost[e] + pot[u] - pot[v];
                debug_assert!(rc >= 0, "negative reduced cost {rc}");
                let nd = d.checked_add(rc).ok_or(FlowError::Overflow)?;
                if nd < dist[v] {
                    dist[v] = nd;
                    parent[v] = e;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        if dist[sink] == i64::MAX {
            let deficient = (0..n).filter(|&v| dist[v] != i64::MAX).collect();
            return Err(FlowError::Infeasible { deficient });
        }

        let reach = dist[sink];
        for (p, &d) in pot.iter_mut().zip(&dist) {
            *p = p.checked_add(d.min(reach)).ok_or(FlowError::Overflow)?;
        }

        let mut push = need - shipped;
        let mut v = sink;
        while v != source {
            let e = parent[v];
            push = push.min(res.cap[e]);
            v = res.to[e ^ 1];
        }
        let mut v = sink;
        while v != source {
            let e = parent[v];
            res.cap[e] -= push;
            res.cap[e ^ 1] += push;
            v = res.to[e ^ 1];
        }
        shipped += push;
    }

    let flow: Vec<i64> = net
        .arcs
        .iter()
        .enumerate()
        .map(|(i, a)| a.upper - res.cap[2 * i])
        .collect();
    let objective: i128 = net
        .arcs
        .iter()
        .zip(&flow)
        .map(|(a, &f)| a.cost as i128 * f as i128)
        .sum();
    let objective = i64::try_from(objective).map_err(|_| FlowError::Overflow)?;
    pot.truncate(n);
    Ok(FlowSolution {
        flow,
        objective,
        potentials: pot,
    })
}
