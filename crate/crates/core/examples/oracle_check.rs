//! Exhaustive optimum of tiny instances next to every bound and heuristic.
//!
//! cargo run --release --example oracle_check -- [tasks] [instances]

use hubflow::colgen::{cg_loop, CgLimits};
use hubflow::instance::{generate_instance, GeneratorParams};
use hubflow::nf::{default_ladder, delta_ladder_ub, solve_nf_lb};
use hubflow::oracle::{brute_force_optimal, greedy_baseline};
use hubflow::Error;

fn main() -> hubflow::Result<()> {
    let mut args = std::env::args().skip(1);
    let tasks: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let count = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    println!("seed  delta    oracle     NF-LB     CG-LB     NF-UB    greedy   nodes");
    for seed in 0..count {
        let params = GeneratorParams {
            fleet_size: tasks.div_ceil(2),
            ..GeneratorParams::tiny(tasks)
        };
        let inst = generate_instance(&params, seed)?;
        let delta = [0, 30, 60][seed as usize % 3];
        let exact = match brute_force_optimal(&inst, delta) {
            Ok(r) => r,
            Err(Error::Infeasible(_)) => {
                println!("{seed:>4} {delta:>6}  no feasible schedule");
                continue;
            }
            Err(e) => return Err(e),
        };
        let nf = solve_nf_lb(&inst, delta)?.lb;
        let cg = cg_loop(&inst, delta, &CgLimits::default())?.lb_fixed();
        let ub = delta_ladder_ub(&inst, delta, &default_ladder(delta)).map(|l| l.best.total_cost).ok();
        let greedy = greedy_baseline(&inst, delta).map(|p| p.total_cost).ok();
        let show = |c: Option<i64>| c.map_or("-".to_string(), |c| c.to_string());
        println!(
            "{seed:>4} {delta:>6} {:>9} {nf:>9} {cg:>9} {:>9} {:>9} {:>7}",
            exact.optimum,
            show(ub),
            show(greedy),
            exact.nodes_explored
        );
        assert!(nf <= exact.optimum && cg <= exact.optimum);
        assert!(ub.is_none_or(|u| u >= exact.optimum));
    }
    Ok(())
}
