use std::time::Instant;

use serde::Serialize;

use super::{opt_miles, ComparisonRow, ComparisonTable, Method};
use crate::nf::{delta_ladder_ub, gap, nested_ladder, solve_nf_lb, BoundReport};
use crate::oracle::greedy_baseline;
use crate::{Cost, Error, Instance, Minutes, Result};

pub const SWEEP_DELTAS: [Minutes; 4] = [30, 60, 90, 120];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub delta: Minutes,
    /// Best greedy cost at this or any smaller flexibility.
    pub ub_greedy: Option<Cost>,
    /// Greedy cost at exactly this flexibility.
    pub greedy_at_delta: Option<Cost>,
    pub ub_nf: Option<Cost>,
    pub lb_nf: Option<Cost>,
    pub gap_nf: Option<f64>,
    pub nf_lb_time_s: f64,
    pub nf_ub_time_s: f64,
    pub greedy_time_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub const CSV_HEADER: &'static str = "delta,UB-Greedy,UB-NF,LB-NF,gap_nf";

    /// Plot data, one line per flexibility, in miles.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.delta,
                opt_miles(r.ub_greedy),
                opt_miles(r.ub_nf),
                opt_miles(r.lb_nf),
                r.gap_nf.map_or("-".to_string(), |g| format!("{g:.6}")),
            ));
        }
        out
    }

    /// One NF and one greedy row per flexibility, tagged `instance@delta`.
    pub fn table(&self, instance: &str) -> ComparisonTable {
        let mut table = ComparisonTable::default();
        for r in &self.rows {
            let id = format!("{instance}@{}", r.delta);
            let mut nf = BoundReport::new("NF", r.lb_nf, r.nf_lb_time_s);
            if let Some(ub) = r.ub_nf {
                nf = nf.with_ub(ub, r.nf_ub_time_s, None);
            }
            let mut greedy = BoundReport::new("Greedy", None, 0.0);
            if let Some(ub) = r.ub_greedy {
                greedy = greedy.with_ub(ub, r.greedy_time_s, None);
            }
            table.rows.push(ComparisonRow::from_report(&id, Method::Nf, &nf));
            table.rows.push(ComparisonRow::from_report(&id, Method::Greedy, &greedy));
        }
        table
    }

    pub fn max_gap(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.gap_nf).reduce(f64::max)
    }
}

/// NF bounds and the greedy baseline at each flexibility in `deltas`. The NF
/// upper bound at `d` uses the nested ladder for `d`, so it never increases
/// with `d`; the greedy column reports the running minimum.
pub fn sweep_flexibility(inst: &Instance, deltas: &[Minutes]) -> Result<SweepResult> {
    let mut deltas = deltas.to_vec();
    deltas.sort_unstable();
    deltas.dedup();
    let mut rows = Vec::with_capacity(deltas.len());
    let mut best_greedy: Option<Cost> = None;
    for &d in &deltas {
        let clock = Instant::now();
        let lb_nf = match solve_nf_lb(inst, d) {
            Ok(nf) => Some(nf.lb),
            Err(Error::Infeasible(_)) => None,
            Err(e) => return Err(e),
        };
        let nf_lb_time_s = clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let ub_nf = match delta_ladder_ub(inst, d, &nested_ladder(d)) {
            Ok(l) => Some(l.best.total_cost),
            Err(Error::Infeasible(_)) => None,
            Err(e) => return Err(e),
        };
        let nf_ub_time_s = clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let greedy_at_delta = match greedy_baseline(inst, d) {
            Ok(p) => Some(p.total_cost),
            Err(Error::Infeasible(_)) => None,
            Err(e) => return Err(e),
        };
        let greedy_time_s = clock.elapsed().as_secs_f64();
        best_greedy = match (best_greedy, greedy_at_delta) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };

        rows.push(SweepRow {
            delta: d,
            ub_greedy: best_greedy,
            greedy_at_delta,
            ub_nf,
            lb_nf,
            gap_nf: ub_nf.zip(lb_nf).map(|(u, l)| gap(u, l)),
            nf_lb_time_s,
            nf_ub_time_s,
            greedy_time_s,
        });
    }
    Ok(SweepResult { rows })
}
