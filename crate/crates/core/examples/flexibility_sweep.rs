//! How bounds move as the pickup windows widen.
//!
//! cargo run --release --example flexibility_sweep -- [seed]

use hubflow::bench::{sweep_flexibility, SWEEP_DELTAS};
use hubflow::instance::{generate_instance, GeneratorParams};
use hubflow::nf::format_gap;

fn main() -> hubflow::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let inst = generate_instance(&GeneratorParams::n17(), seed)?;
    let sweep = sweep_flexibility(&inst, &SWEEP_DELTAS)?;
    print!("{}", sweep.to_csv());
    println!();
    print!("{}", sweep.table(&format!("n17-{seed}")).to_pretty());
    if let Some(g) = sweep.max_gap() {
        println!("largest NF gap across the sweep: {}", format_gap(g));
    }
    Ok(())
}
