//! Savings of an NF plan over direct trips with empty returns, for a few
//! autonomous cost factors.

use hubflow::bench::{savings_report, DEFAULT_EMPTY_MILE_FACTOR};
use hubflow::instance::{generate_instance, GeneratorParams};
use hubflow::nf::{default_ladder, delta_ladder_ub};

fn main() -> hubflow::Result<()> {
    let inst = generate_instance(&GeneratorParams::n17(), 1)?;
    let delta = inst.flexibility();
    let plan = delta_ladder_ub(&inst, delta, &default_ladder(delta))?.best;
    println!("auto_cost_factor  current_mi   athn_mi  savings");
    for factor in [0.5, 0.75, 1.0] {
        let r = savings_report(&inst, &plan, DEFAULT_EMPTY_MILE_FACTOR, Some(factor))?;
        println!(
            "{factor:>16.2}  {:>10.1}  {:>8.1}  {:>6.1}%",
            r.current_cost,
            r.athn_cost,
            100.0 * r.savings_fraction
        );
    }
    Ok(())
}
