//! Column generation on a mid-sized instance: the LP bound, its convergence
//! history, and a plan from the restricted master.
//!
//! cargo run --release --example column_generation -- [orders] [seed]

use std::time::{Duration, Instant};

use hubflow::colgen::{cg_loop, restricted_master_ip, CgLimits, RmhLimits};
use hubflow::instance::{generate_instance, verify_plan, GeneratorParams};
use hubflow::nf::{fixed_miles, format_gap, gap, solve_nf_lb};

fn main() -> hubflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let orders = args.next().and_then(|s| s.parse().ok()).unwrap_or(60);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let inst = generate_instance(&GeneratorParams::scaled(orders), seed)?;
    let delta = inst.flexibility();

    let clock = Instant::now();
    let nf = solve_nf_lb(&inst, delta)?;
    let nf_time = clock.elapsed();

    let clock = Instant::now();
    let limits = CgLimits {
        time_limit: Some(Duration::from_secs(120)),
        ..CgLimits::default()
    };
    let cg = cg_loop(&inst, delta, &limits)?;
    let cg_time = clock.elapsed();
    println!(
        "CG: {} iterations, {} columns, converged {}, {:.2}s",
        cg.iterations,
        cg.pool().len(),
        cg.converged,
        cg_time.as_secs_f64()
    );
    let every = (cg.history.len() / 8).max(1);
    for (i, v) in cg.history.iter().enumerate().step_by(every) {
        println!("  iteration {:>4}: master {:.1} mi", i + 1, v / hubflow::COST_SCALE as f64);
    }
    println!(
        "lower bounds: CG {} vs NF {} (NF took {:.4}s)",
        fixed_miles(cg.lb_fixed()),
        fixed_miles(nf.lb),
        nf_time.as_secs_f64()
    );

    let rmh = restricted_master_ip(cg.pool(), &inst, delta, &RmhLimits { time_limit: Some(Duration::from_secs(30)), ..RmhLimits::default() })?;
    assert!(verify_plan(&rmh.plan, &inst).passed());
    println!(
        "restricted master: {} routes, cost {} (gap {}), {} nodes, proven optimal over the pool: {}",
        rmh.plan.routes.len(),
        fixed_miles(rmh.plan.total_cost),
        format_gap(gap(rmh.plan.total_cost, cg.lb_fixed())),
        rmh.nodes,
        rmh.proven_optimal
    );
    Ok(())
}
