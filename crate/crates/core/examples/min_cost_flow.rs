//! Solves a small transportation problem with the min-cost flow kernel and
//! again as a linear program with the simplex kernel.

use hubflow::flow::{solve_lp, solve_min_cost_flow, FlowNetwork, LinearProgram, Sense};

fn main() {
    // Two plants (supply 4 and 3) and three stores (demand 2, 3, 2).
    let costs = [[4, 6, 9], [5, 3, 7]];
    let supply = [4, 3];
    let demand = [2, 3, 2];

    let mut net = FlowNetwork::new(5);
    for (p, row) in costs.iter().enumerate() {
        for (s, &c) in row.iter().enumerate() {
            net.add_arc(p, 2 + s, 0, 10, c);
        }
    }
    for (p, &v) in supply.iter().enumerate() {
        net.set_supply(p, v);
    }
    for (s, &v) in demand.iter().enumerate() {
        net.set_supply(2 + s, -v);
    }
    let sol = solve_min_cost_flow(&net).expect("balanced and uncapacitated");
    net.check_optimality(&sol).expect("potentials certify optimality");
    println!("min-cost flow objective {}", sol.objective);
    for (a, f) in net.arcs().iter().zip(&sol.flow) {
        if *f > 0 {
            println!("  plant {} -> store {}: {f}", a.tail, a.head - 2);
        }
    }

    let mut lp = LinearProgram::new();
    let plant_rows: Vec<usize> = supply.iter().map(|&v| lp.add_row(Sense::Eq, v as f64)).collect();
    let store_rows: Vec<usize> = demand.iter().map(|&v| lp.add_row(Sense::Eq, -v as f64)).collect();
    for (p, row) in costs.iter().enumerate() {
        for (s, &c) in row.iter().enumerate() {
            lp.add_column(c as f64, 0.0, 10.0, &[(plant_rows[p], 1.0), (store_rows[s], -1.0)]);
        }
    }
    let lp_sol = solve_lp(&lp);
    println!("LP objective {:.3} ({})", lp_sol.objective, lp_sol.status);
    assert!((lp_sol.objective - sol.objective as f64).abs() < 1e-6);
}
