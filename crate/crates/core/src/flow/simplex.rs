//! Dense revised simplex for bounded linear programs.
//!
//! Problems are `min c.x` subject to rows `a_i.x (<=|=|>=) b_i` and bounds
//! `l <= x <= u`. Every row gets a logical variable so that the row becomes
//! `a_i.x + s_i = b_i`, with `s_i` in `[0, inf)`, `(-inf, 0]` or `[0, 0]`
//! depending on the sense. Rows the initial basis cannot satisfy get an
//! artificial variable for phase one. The basis inverse is kept explicitly
//! and refactored periodically. Dantzig pricing is used throughout; when the
//! objective stalls on a degenerate vertex the bounds of the basic variables
//! are widened by small random amounts, and the widening is undone at the
//! end with a few dual simplex iterations. A warm start whose basis is dual
//! feasible but not primal feasible, as after a bound change, is also
//! finished by the dual simplex.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
struct Column {
    cost: f64,
    lower: f64,
    upper: f64,
    entries: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearProgram {
    cols: Vec<Column>,
    rows: Vec<(Sense, f64)>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_row(&mut self, sense: Sense, rhs: f64) -> usize {
        self.rows.push((sense, rhs));
        self.rows.len() - 1
    }

    /// Adds a variable with bounds `[lower, upper]` (either may be infinite)
    /// and nonzero coefficients in existing rows.
    pub fn add_column(&mut self, cost: f64, lower: f64, upper: f64, entries: &[(usize, f64)]) -> usize {
        assert!(lower <= upper, "empty variable domain [{lower}, {upper}]");
        assert!(entries.iter().all(|&(r, _)| r < self.rows.len()), "unknown row");
        self.cols.push(Column {
            cost,
            lower,
            upper,
            entries: entries.iter().copied().filter(|&(_, a)| a != 0.0).collect(),
        });
        self.cols.len() - 1
    }

    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.add_column(cost, lower, upper, &[])
    }

    /// Adds a row over existing variables.
    pub fn add_constraint(&mut self, coeffs: &[(usize, f64)], sense: Sense, rhs: f64) -> usize {
        let row = self.add_row(sense, rhs);
        for &(j, a) in coeffs {
            if a != 0.0 {
                self.cols[j].entries.push((row, a));
            }
        }
        row
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        assert!(lower <= upper, "empty variable domain [{lower}, {upper}]");
        self.cols[var].lower = lower;
        self.cols[var].upper = upper;
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.cols[var].lower, self.cols[var].upper)
    }

    pub fn cost(&self, var: usize) -> f64 {
        self.cols[var].cost
    }

    pub fn column(&self, var: usize) -> &[(usize, f64)] {
        &self.cols[var].entries
    }

    pub fn row(&self, row: usize) -> (Sense, f64) {
        self.rows[row]
    }

    pub fn num_vars(&self) -> usize {
        self.cols.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Objective value of `x`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.cols.iter().zip(x).map(|(c, v)| c.cost * v).sum()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut act = vec![0.0; self.rows.len()];
        let mut worst: f64 = 0.0;
        for (c, &v) in self.cols.iter().zip(x) {
            worst = worst.max(c.lower - v).max(v - c.upper);
            for &(r, a) in &c.entries {
                act[r] += a * v;
            }
        }
        for (&(sense, rhs), a) in self.rows.iter().zip(act) {
            let v = match sense {
                Sense::Le => a - rhs,
                Sense::Ge => rhs - a,
                Sense::Eq => (a - rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A basic variable, identified independently of how many columns the
/// program has, so a basis survives column additions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisVar {
    Structural(usize),
    Logical(usize),
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    /// Row duals `y = c_B B^-1`. Nonpositive on `<=` rows and nonnegative
    /// on `>=` rows at optimality.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    /// For infeasible programs, the phase-one duals: any column `j` with
    /// `duals . a_j > 0` reduces the infeasibility.
    pub farkas: Option<Vec<f64>>,
    pub basis: Option<Vec<BasisVar>>,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct SimplexOptions {
    pub max_iterations: Option<usize>,
    /// Non-improving iterations before the bounds are perturbed.
    pub stall_limit: usize,
    pub refactor_every: usize,
    pub primal_tol: f64,
    pub dual_tol: f64,
    pub pivot_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iterations: None,
            stall_limit: 50,
            refactor_every: 50,
            primal_tol: 1e-9,
            dual_tol: 1e-9,
            pivot_tol: 1e-9,
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> LpSolution {
    solve_lp_warm(lp, None, &SimplexOptions::default())
}

/// Solves `lp`, starting from `basis` when it is a valid primal-feasible
/// basis and from scratch otherwise.
pub fn solve_lp_warm(lp: &LinearProgram, basis: Option<&[BasisVar]>, opts: &SimplexOptions) -> LpSolution {
    let mut s = Solver::new(lp, opts);
    let cost = s.phase_two_costs();
    let warm = match basis {
        Some(b) => s.try_warm_start(b, &cost),
        None => Warm::Rejected,
    };
    let warm = match warm {
        Warm::DualFeasible => match s.dual(&cost) {
            Phase::Optimal => Warm::PrimalFeasible,
            Phase::IterationLimit => return s.finish(LpStatus::IterationLimit, &cost, None),
            // Restart so that the infeasibility comes with a phase-one ray.
            _ => {
                s = Solver::new(lp, opts);
                Warm::Rejected
            }
        },
        w => w,
    };
    if warm == Warm::Rejected {
        s.cold_start();
        if s.has_artificials {
            let cost = s.phase_one_costs();
            match s.run(&cost) {
                Phase::Optimal => {}
                Phase::IterationLimit => return s.finish(LpStatus::IterationLimit, &cost, None),
                Phase::Unbounded | Phase::Infeasible => {
                    unreachable!("phase one is bounded below and starts feasible")
                }
            }
            let infeasibility: f64 = s.artificial_range().map(|j| s.x[j]).sum();
            let scale = 1.0 + s.b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if infeasibility > 1e-7 * scale {
                let farkas = s.duals(&cost);
                return s.finish(LpStatus::Infeasible, &s.phase_two_costs(), Some(farkas));
            }
            s.retire_artificials();
        }
    }
    let status = match s.run(&cost) {
        Phase::Optimal => LpStatus::Optimal,
        Phase::Unbounded => LpStatus::Unbounded,
        Phase::IterationLimit | Phase::Infeasible => LpStatus::IterationLimit,
    };
    s.finish(status, &cost, None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable held at zero.
    Free,
}

enum Phase {
    Optimal,
    Unbounded,
    /// The dual simplex found a row that no entering variable can repair.
    Infeasible,
    IterationLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Warm {
    PrimalFeasible,
    DualFeasible,
    Rejected,
}

struct Solver<'a> {
    lp: &'a LinearProgram,
    opts: &'a SimplexOptions,
    m: usize,
    n: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    art_sign: Vec<f64>,
    has_artificials: bool,
    x: Vec<f64>,
    state: Vec<State>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    b: Vec<f64>,
    iterations: usize,
    max_iterations: usize,
    /// Unperturbed bounds while a perturbation is active.
    saved_bounds: Option<(Vec<f64>, Vec<f64>)>,
    rng: ChaCha8Rng,
}

impl<'a> Solver<'a> {
    fn new(lp: &'a LinearProgram, opts: &'a SimplexOptions) -> Self {
        let m = lp.num_rows();
        let n = lp.num_vars();
        let total = n + 2 * m;
        let mut lo = Vec::with_capacity(total);
        let mut hi = Vec::with_capacity(total);
        for c in &lp.cols {
            lo.push(c.lower);
            hi.push(c.upper);
        }
        for &(sense, _) in &lp.rows {
            let (l, h) = match sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lo.push(l);
            hi.push(h);
        }
        // Artificials start fixed at zero; cold_start opens the ones it uses.
        lo.extend(std::iter::repeat_n(0.0, m));
        hi.extend(std::iter::repeat_n(0.0, m));
        Solver {
            lp,
            opts,
            m,
            n,
            lo,
            hi,
            art_sign: vec![1.0; m],
            has_artificials: false,
            x: vec![0.0; total],
            state: vec![State::AtLower; total],
            basis: Vec::new(),
            binv: vec![0.0; m * m],
            b: lp.rows.iter().map(|r| r.1).collect(),
            iterations: 0,
            max_iterations: opts
                .max_iterations
                .unwrap_or_else(|| 10_000.max(50 * (n + m))),
            saved_bounds: None,
            rng: ChaCha8Rng::seed_from_u64(0x5eed),
        }
    }

    fn total(&self) -> usize {
        self.n + 2 * self.m
    }

    fn artificial_range(&self) -> std::ops::Range<usize> {
        self.n + self.m..self.n + 2 * self.m
    }

    fn for_col(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if j < self.n {
            for &(r, a) in &self.lp.cols[j].entries {
                f(r, a);
            }
        } else if j < self.n + self.m {
            f(j - self.n, 1.0);
        } else {
            let r = j - self.n - self.m;
            f(r, self.art_sign[r]);
        }
    }

    fn place_nonbasic(&mut self, j: usize) {
        let (l, h) = (self.lo[j], self.hi[j]);
        let (state, v) = if l.is_finite() {
            (State::AtLower, l)
        } else if h.is_finite() {
            (State::AtUpper, h)
        } else {
            (State::Free, 0.0)
        };
        self.state[j] = state;
        self.x[j] = v;
    }

    fn cold_start(&mut self) {
        let (n, m) = (self.n, self.m);
        for j in 0..self.total() {
            self.place_nonbasic(j);
        }
        let mut r = self.b.clone();
        for j in 0..n {
            let v = self.x[j];
            if v != 0.0 {
                for &(i, a) in &self.lp.cols[j].entries {
                    r[i] -= a * v;
                }
            }
        }
        self.basis = vec![0; m];
        self.binv.fill(0.0);
        for i in 0..m {
            let logical = n + i;
            let tol = self.opts.primal_tol;
            if r[i] >= self.lo[logical] - tol && r[i] <= self.hi[logical] + tol {
                self.basis[i] = logical;
                self.state[logical] = State::Basic;
                self.x[logical] = r[i];
                self.binv[i * m + i] = 1.0;
            } else {
                let art = n + m + i;
                let sign = if r[i] >= 0.0 { 1.0 } else { -1.0 };
                self.art_sign[i] = sign;
                self.hi[art] = f64::INFINITY;
                self.basis[i] = art;
                self.state[art] = State::Basic;
                self.x[art] = r[i].abs();
                self.binv[i * m + i] = sign;
                self.has_artificials = true;
            }
        }
    }

    fn try_warm_start(&mut self, hint: &[BasisVar], cost: &[f64]) -> Warm {
        if hint.len() != self.m {
            return Warm::Rejected;
        }
        let mut basis = Vec::with_capacity(self.m);
        for &v in hint {
            let j = match v {
                BasisVar::Structural(j) if j < self.n => j,
                BasisVar::Logical(i) if i < self.m => self.n + i,
                _ => return Warm::Rejected,
            };
            basis.push(j);
        }
        for j in 0..self.total() {
            self.place_nonbasic(j);
        }
        for &j in &basis {
            if self.state[j] == State::Basic {
                return Warm::Rejected;
            }
            self.state[j] = State::Basic;
        }
        self.basis = basis;
        if !self.refactor() {
            return Warm::Rejected;
        }
        // Boxed nonbasics go to whichever bound their reduced cost favours.
        let y = self.duals(cost);
        let tol = self.dual_tolerance(cost);
        let mut dual_feasible = true;
        for j in 0..self.n + self.m {
            if self.state[j] == State::Basic || self.lo[j] == self.hi[j] {
                continue;
            }
            let d = self.reduced_cost(j, cost, &y);
            if d < 0.0 && self.hi[j].is_finite() {
                self.state[j] = State::AtUpper;
                self.x[j] = self.hi[j];
            }
            dual_feasible &= !self.eligible(j, d, tol);
        }
        self.compute_basic_values();
        if self.max_basic_infeasibility() <= 1e-7 {
            Warm::PrimalFeasible
        } else if dual_feasible {
            Warm::DualFeasible
        } else {
            Warm::Rejected
        }
    }

    fn max_basic_infeasibility(&self) -> f64 {
        self.basis
            .iter()
            .map(|&j| (self.lo[j] - self.x[j]).max(self.x[j] - self.hi[j]).max(0.0))
            .fold(0.0, f64::max)
    }

    fn dual_tolerance(&self, cost: &[f64]) -> f64 {
        self.opts.dual_tol * cost.iter().fold(1.0f64, |m, c| m.max(c.abs()))
    }

    /// Widens the bounds of the basic variables by small random amounts.
    /// Returns false if every basic variable was widened already.
    fn perturb(&mut self) -> bool {
        let saved = self
            .saved_bounds
            .get_or_insert_with(|| (self.lo.clone(), self.hi.clone()));
        let (lo0, hi0) = (saved.0.clone(), saved.1.clone());
        let mut widened = false;
        for pos in 0..self.m {
            let j = self.basis[pos];
            let scale = 1e-7;
            if self.lo[j].is_finite() && self.lo[j] == lo0[j] {
                self.lo[j] -= scale * (1.0 + lo0[j].abs()) * (1.0 + self.rng.gen::<f64>());
                widened = true;
            }
            if self.hi[j].is_finite() && self.hi[j] == hi0[j] {
                self.hi[j] += scale * (1.0 + hi0[j].abs()) * (1.0 + self.rng.gen::<f64>());
                widened = true;
            }
        }
        widened
    }

    /// Restores the original bounds and repairs the primal values.
    fn unperturb(&mut self, cost: &[f64]) -> Phase {
        let Some((lo, hi)) = self.saved_bounds.take() else {
            return Phase::Optimal;
        };
        self.lo = lo;
        self.hi = hi;
        for j in 0..self.total() {
            match self.state[j] {
                State::AtLower => self.x[j] = self.lo[j],
                State::AtUpper => self.x[j] = self.hi[j],
                _ => {}
            }
        }
        self.compute_basic_values();
        self.dual(cost)
    }

    /// Dual simplex from a dual feasible basis until the basic variables are
    /// within their bounds.
    fn dual(&mut self, cost: &[f64]) -> Phase {
        let m = self.m;
        let ptol = self.opts.primal_tol;
        let dtol = self.dual_tolerance(cost);
        let mut since_refactor = 0;
        loop {
            let mut leave: Option<(usize, f64)> = None;
            for (pos, &v) in self.basis.iter().enumerate() {
                let viol = if self.x[v] < self.lo[v] - ptol {
                    self.lo[v] - self.x[v]
                } else if self.x[v] > self.hi[v] + ptol {
                    self.x[v] - self.hi[v]
                } else {
                    continue;
                };
                if leave.is_none_or(|(_, w)| viol > w) {
                    leave = Some((pos, viol));
                }
            }
            let Some((r, _)) = leave else {
                return Phase::Optimal;
            };
            if self.iterations >= self.max_iterations {
                return Phase::IterationLimit;
            }
            self.iterations += 1;
            let leaving = self.basis[r];
            let up = self.x[leaving] < self.lo[leaving];
            let rho = self.binv[r * m..(r + 1) * m].to_vec();
            let y = self.duals(cost);
            // Moving nonbasic j by +1 moves the leaving variable by -alpha_rj.
            let mut cands: Vec<(usize, f64, f64)> = Vec::new();
            for j in 0..self.total() {
                if self.state[j] == State::Basic || self.lo[j] == self.hi[j] {
                    continue;
                }
                let mut a = 0.0;
                self.for_col(j, |i, v| a += rho[i] * v);
                if a.abs() < self.opts.pivot_tol {
                    continue;
                }
                let toward = if up { -a } else { a };
                let ok = match self.state[j] {
                    State::AtLower => toward > 0.0,
                    State::AtUpper => toward < 0.0,
                    State::Free => true,
                    State::Basic => false,
                };
                if ok {
                    let d = self.reduced_cost(j, cost, &y);
                    let slack = match self.state[j] {
                        State::AtLower => d.max(0.0),
                        State::AtUpper => (-d).max(0.0),
                        _ => 0.0,
                    };
                    cands.push((j, slack, a.abs()));
                }
            }
            let bound = cands
                .iter()
                .map(|&(_, slack, a)| (slack + dtol) / a)
                .fold(f64::INFINITY, f64::min);
            let Some(&(j, _, _)) = cands
                .iter()
                .filter(|&&(_, slack, a)| slack / a <= bound)
                .max_by(|p, q| p.2.total_cmp(&q.2).then(q.0.cmp(&p.0)))
            else {
                return Phase::Infeasible;
            };
            let alpha = self.ftran(j);
            self.pivot(r, j, &alpha);
            if up {
                self.state[leaving] = State::AtLower;
                self.x[leaving] = self.lo[leaving];
            } else {
                self.state[leaving] = State::AtUpper;
                self.x[leaving] = self.hi[leaving];
            }
            since_refactor += 1;
            if since_refactor >= self.opts.refactor_every {
                since_refactor = 0;
                self.refactor();
            }
            self.compute_basic_values();
        }
    }

    fn phase_one_costs(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.total()];
        for j in self.artificial_range() {
            c[j] = 1.0;
        }
        c
    }

    fn phase_two_costs(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.total()];
        for (j, col) in self.lp.cols.iter().enumerate() {
            c[j] = col.cost;
        }
        c
    }

    /// Fixes artificials at zero and swaps basic ones out where possible.
    fn retire_artificials(&mut self) {
        let (n, m) = (self.n, self.m);
        for j in self.artificial_range() {
            self.lo[j] = 0.0;
            self.hi[j] = 0.0;
            if self.state[j] != State::Basic {
                self.state[j] = State::AtLower;
                self.x[j] = 0.0;
            }
        }
        for pos in 0..m {
            let art = self.basis[pos];
            if art < n + m {
                continue;
            }
            let row = art - n - m;
            let logical = n + row;
            if self.state[logical] != State::Basic {
                // B e_pos changes from sign * e_row to e_row.
                let sign = self.art_sign[row];
                for v in &mut self.binv[pos * m..(pos + 1) * m] {
                    *v *= sign;
                }
                self.basis[pos] = logical;
                self.state[logical] = State::Basic;
                self.state[art] = State::AtLower;
                self.x[art] = 0.0;
                continue;
            }
            let candidate = (0..n + m).find(|&j| {
                if self.state[j] == State::Basic {
                    return false;
                }
                let mut a = 0.0;
                self.for_col(j, |i, v| a += self.binv[pos * m + i] * v);
                a.abs() > 1e-7
            });
            if let Some(j) = candidate {
                let alpha = self.ftran(j);
                self.pivot(pos, j, &alpha);
                self.state[art] = State::AtLower;
                self.x[art] = 0.0;
            }
        }
        self.compute_basic_values();
    }

    /// Inverts the current basis matrix. Returns false if it is singular.
    fn refactor(&mut self) -> bool {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (pos, &j) in self.basis.iter().enumerate() {
            self.for_col(j, |i, v| a[i * m + pos] = v);
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&p, &q| a[p * m + col].abs().total_cmp(&a[q * m + col].abs()))
                .unwrap();
            if a[piv * m + col].abs() < 1e-11 {
                return false;
            }
            if piv != col {
                for k in 0..m {
                    a.swap(piv * m + k, col * m + k);
                    inv.swap(piv * m + k, col * m + k);
                }
            }
            let p = a[col * m + col];
            for k in 0..m {
                a[col * m + k] /= p;
                inv[col * m + k] /= p;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = a[r * m + col];
                if f != 0.0 {
                    for k in 0..m {
                        a[r * m + k] -= f * a[col * m + k];
                        inv[r * m + k] -= f * inv[col * m + k];
                    }
                }
            }
        }
        self.binv = inv;
        true
    }

    fn compute_basic_values(&mut self) {
        let m = self.m;
        let mut r = self.b.clone();
        for j in 0..self.total() {
            if self.state[j] != State::Basic && self.x[j] != 0.0 {
                let v = self.x[j];
                self.for_col(j, |i, a| r[i] -= a * v);
            }
        }
        for pos in 0..m {
            let row = &self.binv[pos * m..(pos + 1) * m];
            self.x[self.basis[pos]] = row.iter().zip(&r).map(|(a, b)| a * b).sum();
        }
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (pos, &j) in self.basis.iter().enumerate() {
            let c = cost[j];
            if c != 0.0 {
                for (yi, b) in y.iter_mut().zip(&self.binv[pos * m..(pos + 1) * m]) {
                    *yi += c * b;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, cost: &[f64], y: &[f64]) -> f64 {
        let mut d = cost[j];
        self.for_col(j, |i, a| d -= y[i] * a);
        d
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        self.for_col(j, |i, a| {
            for (pos, al) in alpha.iter_mut().enumerate() {
                *al += self.binv[pos * m + i] * a;
            }
        });
        alpha
    }

    fn pivot(&mut self, pos: usize, entering: usize, alpha: &[f64]) {
        let m = self.m;
        let p = alpha[pos];
        for v in &mut self.binv[pos * m..(pos + 1) * m] {
            *v /= p;
        }
        let (before, rest) = self.binv.split_at_mut(pos * m);
        let (pivot_row, after) = rest.split_at_mut(m);
        for (k, row) in before.chunks_mut(m).chain(after.chunks_mut(m)).enumerate() {
            let k = if k < pos { k } else { k + 1 };
            let f = alpha[k];
            if f != 0.0 {
                for (v, pr) in row.iter_mut().zip(pivot_row.iter()) {
                    *v -= f * pr;
                }
            }
        }
        self.basis[pos] = entering;
        self.state[entering] = State::Basic;
    }

    fn eligible(&self, j: usize, d: f64, tol: f64) -> bool {
        match self.state[j] {
            State::Basic => false,
            _ if self.lo[j] == self.hi[j] => false,
            State::AtLower => d < -tol,
            State::AtUpper => d > tol,
            State::Free => d.abs() > tol,
        }
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        cost.iter().zip(&self.x).map(|(c, v)| c * v).sum()
    }

    fn run(&mut self, cost: &[f64]) -> Phase {
        let tol = self.dual_tolerance(cost);
        let mut bland = false;
        let mut best = self.objective(cost);
        let mut stall = 0;
        let mut since_refactor = 0;
        let mut verified = false;
        loop {
            if self.iterations >= self.max_iterations {
                return Phase::IterationLimit;
            }
            let y = self.duals(cost);
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.total() {
                let d = self.reduced_cost(j, cost, &y);
                if !self.eligible(j, d, tol) {
                    continue;
                }
                if bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.is_none_or(|(_, best_d)| d.abs() > best_d.abs()) {
                    entering = Some((j, d));
                }
            }
            let Some((j, d)) = entering else {
                if verified {
                    if self.saved_bounds.is_none() {
                        return Phase::Optimal;
                    }
                    match self.unperturb(cost) {
                        Phase::Optimal => {}
                        other => return other,
                    }
                    best = self.objective(cost);
                    stall = 0;
                    bland = false;
                    verified = false;
                    continue;
                }
                // Confirm optimality on a fresh factorization.
                if self.refactor() {
                    self.compute_basic_values();
                }
                since_refactor = 0;
                verified = true;
                continue;
            };
            verified = false;
            self.iterations += 1;

            let dir = match self.state[j] {
                State::AtUpper => -1.0,
                State::Free if d > 0.0 => -1.0,
                _ => 1.0,
            };
            let alpha = self.ftran(j);
            // Two-pass ratio test: bound the step with every limit relaxed by
            // the primal tolerance, then among the rows blocking within that
            // bound take the largest pivot (or the lowest index under Bland).
            let ptol = self.opts.primal_tol;
            let limits: Vec<(usize, f64, f64, bool)> = alpha
                .iter()
                .enumerate()
                .filter(|(_, a)| a.abs() >= self.opts.pivot_tol)
                .filter_map(|(pos, &a)| {
                    let v = self.basis[pos];
                    let rate = -dir * a;
                    if rate < 0.0 && self.lo[v].is_finite() {
                        Some((pos, (self.x[v] - self.lo[v]) / -rate, -rate, true))
                    } else if rate > 0.0 && self.hi[v].is_finite() {
                        Some((pos, (self.hi[v] - self.x[v]) / rate, rate, false))
                    } else {
                        None
                    }
                })
                .collect();
            let relaxed = limits
                .iter()
                .map(|&(_, lim, rate, _)| lim + ptol / rate)
                .fold(f64::INFINITY, f64::min);
            let span = self.hi[j] - self.lo[j];
            let mut theta = f64::INFINITY;
            let mut leave: Option<(usize, bool)> = None;
            if span.is_finite() && span <= relaxed {
                theta = span;
            } else {
                let mut pick: Option<(usize, f64, bool)> = None;
                for &(pos, lim, _, to_lower) in &limits {
                    if lim > relaxed {
                        continue;
                    }
                    let better = match pick {
                        None => true,
                        Some((cur, _, _)) if bland => self.basis[pos] < self.basis[cur],
                        Some((cur, _, _)) => alpha[pos].abs() > alpha[cur].abs(),
                    };
                    if better {
                        pick = Some((pos, lim, to_lower));
                    }
                }
                if let Some((pos, lim, to_lower)) = pick {
                    theta = lim.max(0.0);
                    leave = Some((pos, to_lower));
                }
            }
            if theta == f64::INFINITY {
                return Phase::Unbounded;
            }

            self.x[j] += dir * theta;
            for (pos, &a) in alpha.iter().enumerate() {
                if a != 0.0 {
                    let v = self.basis[pos];
                    self.x[v] -= dir * theta * a;
                }
            }
            match leave {
                None => {
                    let to_upper = dir > 0.0;
                    self.state[j] = if to_upper { State::AtUpper } else { State::AtLower };
                    self.x[j] = if to_upper { self.hi[j] } else { self.lo[j] };
                }
                Some((pos, to_lower)) => {
                    let v = self.basis[pos];
                    self.pivot(pos, j, &alpha);
                    self.state[v] = if to_lower { State::AtLower } else { State::AtUpper };
                    self.x[v] = if to_lower { self.lo[v] } else { self.hi[v] };
                    since_refactor += 1;
                    if since_refactor >= self.opts.refactor_every {
                        since_refactor = 0;
                        if self.refactor() {
                            self.compute_basic_values();
                        }
                    }
                }
            }

            let obj = self.objective(cost);
            if obj < best - 1e-12 * (1.0 + best.abs()) {
                best = obj;
                stall = 0;
                bland = false;
            } else {
                stall += 1;
                if stall >= self.opts.stall_limit {
                    stall = 0;
                    // Bland's rule only once perturbing has nothing left to widen.
                    bland = !self.perturb();
                    if !bland {
                        best = self.objective(cost);
                    }
                }
            }
        }
    }

    fn finish(&self, status: LpStatus, cost: &[f64], farkas: Option<Vec<f64>>) -> LpSolution {
        let y = self.duals(cost);
        let reduced_costs = (0..self.n).map(|j| self.reduced_cost(j, cost, &y)).collect();
        let x = self.x[..self.n].to_vec();
        let basis = (status == LpStatus::Optimal
            && self.basis.iter().all(|&j| j < self.n + self.m))
        .then(|| {
            self.basis
                .iter()
                .map(|&j| {
                    if j < self.n {
                        BasisVar::Structural(j)
                    } else {
                        BasisVar::Logical(j - self.n)
                    }
                })
                .collect()
        });
        LpSolution {
            status,
            objective: self.lp.evaluate(&x),
            x,
            duals: y,
            reduced_costs,
            farkas,
            basis,
            iterations: self.iterations,
        }
    }
}
