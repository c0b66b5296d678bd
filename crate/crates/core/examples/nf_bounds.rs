//! Network-flow lower bound and the flexibility-ladder upper bound on a
//! generated instance, rung by rung.
//!
//! cargo run --release --example nf_bounds -- [orders] [seed]

use hubflow::instance::{generate_instance, GeneratorParams};
use hubflow::nf::{default_ladder, fixed_miles, format_gap, gap, nf_bound_report, BoundReport, RungOutcome};

fn main() -> hubflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let orders = args.next().and_then(|s| s.parse().ok()).unwrap_or(437);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let params = if orders == 437 { GeneratorParams::n17() } else { GeneratorParams::scaled(orders) };
    let inst = generate_instance(&params, seed)?;
    let delta = inst.flexibility();
    let ladder = default_ladder(delta);
    println!("{} tasks, fleet {}, flexibility {delta}, ladder {ladder:?}", inst.autonomous().len(), inst.fleet_size());

    let (report, result) = nf_bound_report(&inst, delta, &ladder)?;
    if let Some(result) = &result {
        for rung in &result.rungs {
            let what = match &rung.outcome {
                RungOutcome::Plan { cost } => format!("plan {}", fixed_miles(*cost)),
                RungOutcome::Cycles { count } => format!("{count} cycles"),
                RungOutcome::RepairFailed { failure } => format!("repair failed: {failure}"),
                RungOutcome::Infeasible => "fleet too small".to_string(),
            };
            println!("  rung {:>3}: lb {:>10}  {what}  ({:.3}s)", rung.delta, rung.lb.map_or("-".into(), fixed_miles), rung.seconds);
        }
    }
    println!("{}\n{}", BoundReport::CSV_HEADER, report.csv_row());
    if let (Some(lb), Some(ub)) = (report.lb, report.ub) {
        println!("gap {}", format_gap(gap(ub, lb)));
    }
    Ok(())
}
