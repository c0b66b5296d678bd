//! Method runs, comparison tables, flexibility sweeps, Gantt export and the
//! savings model behind the `hubflow` command line.

mod gantt;
mod savings;
mod sweep;

pub use gantt::{gantt_csv, gantt_export, GanttSegment, SegmentKind};
pub use savings::{savings_from_costs, savings_report, SavingsReport, DEFAULT_EMPTY_MILE_FACTOR};
pub use sweep::{sweep_flexibility, SweepResult, SweepRow, SWEEP_DELTAS};

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::colgen::{cg_loop, restricted_master_ip, CgLimits, RmhLimits};
use crate::nf::{fixed_miles, format_gap, gap, nf_bound_report, BoundReport};
use crate::oracle::{brute_force_optimal, greedy_baseline};
use crate::{Cost, Error, Instance, Minutes, Plan};

/// Per-method time limit when none is given.
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(60);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    #[serde(rename = "NF")]
    Nf,
    #[serde(rename = "CG")]
    Cg,
    Greedy,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Nf, Method::Cg, Method::Greedy, Method::Oracle];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Nf => "NF",
            Method::Cg => "CG",
            Method::Greedy => "Greedy",
            Method::Oracle => "Oracle",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "nf" => Ok(Method::Nf),
            "cg" => Ok(Method::Cg),
            "greedy" => Ok(Method::Greedy),
            "oracle" => Ok(Method::Oracle),
            _ => Err(format!("unknown method {s:?}; expected nf, cg, greedy or oracle")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub delta: Minutes,
    /// NF ladder; `None` uses [`crate::nf::default_ladder`].
    pub ladder: Option<Vec<Minutes>>,
    /// Applied separately to the lower- and upper-bound phases of CG.
    pub time_limit: Duration,
}

impl RunOptions {
    pub fn new(delta: Minutes) -> Self {
        RunOptions {
            delta,
            ladder: None,
            time_limit: DEFAULT_TIME_LIMIT,
        }
    }
}

/// Outcome of one method on one instance. `plan` is the plan behind
/// `report.ub`; `failure` explains a missing bound.
#[derive(Clone, Debug)]
pub struct MethodRun {
    pub report: BoundReport,
    pub plan: Option<Plan>,
    pub failure: Option<String>,
}

impl MethodRun {
    pub fn succeeded(&self) -> bool {
        self.plan.is_some()
    }
}

/// Runs `method` on `inst` with its flexibility set to `opts.delta`.
/// Infeasibility is reported inside the run; other errors, including the
/// exhaustive solver's size guard, are returned.
pub fn run_method(inst: &Instance, method: Method, opts: &RunOptions) -> crate::Result<MethodRun> {
    let delta = opts.delta;
    let adjusted;
    let inst = if inst.flexibility() == delta {
        inst
    } else {
        adjusted = inst.with_flexibility(delta)?;
        &adjusted
    };
    let tag = method.to_string();
    let infeasible = |e: Error, report: BoundReport| match e {
        Error::Infeasible(msg) => Ok(MethodRun {
            report,
            plan: None,
            failure: Some(msg),
        }),
        e => Err(e),
    };
    match method {
        Method::Nf => {
            let ladder = opts
                .ladder
                .clone()
                .unwrap_or_else(|| crate::nf::default_ladder(delta));
            match nf_bound_report(inst, delta, &ladder) {
                Ok((report, ladder)) => {
                    let failure = ladder
                        .is_none()
                        .then(|| format!("no ladder rung produced a schedule within flexibility {delta}"));
                    Ok(MethodRun {
                        report,
                        plan: ladder.map(|l| l.best),
                        failure,
                    })
                }
                Err(e) => infeasible(e, BoundReport::new(&tag, None, 0.0)),
            }
        }
        Method::Cg => {
            let clock = Instant::now();
            let limits = CgLimits {
                time_limit: Some(opts.time_limit),
                ..CgLimits::default()
            };
            let cg = match cg_loop(inst, delta, &limits) {
                Ok(cg) => cg,
                Err(e) => return infeasible(e, BoundReport::new(&tag, None, clock.elapsed().as_secs_f64())),
            };
            let report = BoundReport::new(&tag, Some(cg.lb_fixed()), clock.elapsed().as_secs_f64());
            let clock = Instant::now();
            let rmh = RmhLimits {
                time_limit: Some(opts.time_limit),
                ..RmhLimits::default()
            };
            match restricted_master_ip(cg.pool(), inst, delta, &rmh) {
                Ok(r) => Ok(MethodRun {
                    report: report.with_ub(r.plan.total_cost, clock.elapsed().as_secs_f64(), Some(delta)),
                    plan: Some(r.plan),
                    failure: None,
                }),
                Err(e) => infeasible(e, report),
            }
        }
        Method::Greedy => {
            let clock = Instant::now();
            match greedy_baseline(inst, delta) {
                Ok(plan) => Ok(MethodRun {
                    report: BoundReport::new(&tag, None, 0.0).with_ub(
                        plan.total_cost,
                        clock.elapsed().as_secs_f64(),
                        Some(delta),
                    ),
                    plan: Some(plan),
                    failure: None,
                }),
                Err(e) => infeasible(e, BoundReport::new(&tag, None, 0.0)),
            }
        }
        Method::Oracle => {
            let clock = Instant::now();
            match brute_force_optimal(inst, delta) {
                Ok(res) => {
                    let secs = clock.elapsed().as_secs_f64();
                    Ok(MethodRun {
                        report: BoundReport::new(&tag, Some(res.optimum), secs).with_ub(res.optimum, secs, Some(delta)),
                        plan: Some(res.plan),
                        failure: None,
                    })
                }
                Err(e) => infeasible(e, BoundReport::new(&tag, None, clock.elapsed().as_secs_f64())),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub instance: String,
    pub method: Method,
    pub lb: Option<Cost>,
    pub lb_time_s: Option<f64>,
    pub ub: Option<Cost>,
    pub ub_time_s: Option<f64>,
    pub gap: Option<f64>,
}

impl ComparisonRow {
    pub fn from_report(instance: &str, method: Method, report: &BoundReport) -> Self {
        ComparisonRow {
            instance: instance.to_string(),
            method,
            lb: report.lb,
            lb_time_s: report.lb.map(|_| report.lb_time),
            ub: report.ub,
            ub_time_s: report.ub.and(report.ub_time),
            gap: match (report.ub, report.lb) {
                (Some(ub), Some(lb)) => Some(gap(ub, lb)),
                _ => None,
            },
        }
    }
}

/// Bounds per instance and method. Missing cells print as `-`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub const CSV_HEADER: &'static str = "instance,method,lb_miles,lb_time_s,ub_miles,ub_time_s,gap";

    pub fn row(&self, instance: &str, method: Method) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.instance == instance && r.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.instance,
                r.method,
                opt_miles(r.lb),
                opt_secs(r.lb_time_s),
                opt_miles(r.ub),
                opt_secs(r.ub_time_s),
                r.gap.map_or("-".to_string(), |g| format!("{g:.6}")),
            ));
        }
        out
    }

    /// Aligned text: lower bounds first, then upper bounds with the gap in
    /// parentheses.
    pub fn to_pretty(&self) -> String {
        let header = ["Instance", "Method", "LB (mi)", "LB time (s)", "UB (mi)", "UB time (s)"];
        let mut cells: Vec<[String; 6]> = vec![header.map(String::from)];
        for r in &self.rows {
            let ub = match (r.ub, r.gap) {
                (Some(ub), Some(g)) => format!("{} ({})", fixed_miles(ub), format_gap(g)),
                (ub, _) => opt_miles(ub),
            };
            cells.push([
                r.instance.clone(),
                r.method.to_string(),
                opt_miles(r.lb),
                r.lb_time_s.map_or("-".into(), |s| format!("{s:.2}")),
                ub,
                r.ub_time_s.map_or("-".into(), |s| format!("{s:.2}")),
            ]);
        }
        let widths: Vec<usize> = (0..6)
            .map(|c| cells.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, row) in cells.iter().enumerate() {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (cell, &w))| if c < 2 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
            if i == 0 {
                let total = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
                out.push_str(&"-".repeat(total));
                out.push('\n');
            }
        }
        out
    }
}

fn opt_miles(c: Option<Cost>) -> String {
    c.map_or("-".to_string(), fixed_miles)
}

fn opt_secs(s: Option<f64>) -> String {
    s.map_or("-".to_string(), |s| format!("{s:.3}"))
}

/// Runs every method in turn on one instance. A method that fails with an
/// error (the oracle on a large instance, say) gets an empty row.
pub fn compare(inst: &Instance, instance_id: &str, methods: &[Method], opts: &RunOptions) -> (ComparisonTable, Vec<(Method, crate::Result<MethodRun>)>) {
    let mut table = ComparisonTable::default();
    let mut runs = Vec::new();
    for &m in methods {
        let run = run_method(inst, m, opts);
        let row = match &run {
            Ok(run) => ComparisonRow::from_report(instance_id, m, &run.report),
            Err(_) => ComparisonRow::from_report(instance_id, m, &BoundReport::new(&m.to_string(), None, 0.0)),
        };
        table.rows.push(row);
        runs.push((m, run));
    }
    (table, runs)
}

/// Process exit status for an error: 2 when the instance has no solution
/// for the method, 1 for bad input or a refused request.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Infeasible(_) => 2,
        Error::Flow(crate::flow::FlowError::Infeasible { .. }) => 2,
        _ => 1,
    }
}
