//! Generates the 17-hub preset, prints a summary and round-trips it through
//! a JSON file.
//!
//! cargo run --release --example generate_instance -- [seed]

use hubflow::instance::{generate_instance, load_instance, save_instance, GeneratorParams};
use hubflow::{to_miles, Leg};

fn main() -> hubflow::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let inst = generate_instance(&GeneratorParams::n17(), seed)?;

    let hubs = inst.network().hubs().count();
    let auto = inst.autonomous();
    let loaded: i64 = auto.iter().map(|t| t.loaded).sum();
    let legs = |leg| inst.tasks().iter().filter(|t| t.leg == leg).count();
    println!("seed {seed}: {hubs} hubs, {} locations", inst.network().locations().len());
    println!(
        "tasks: {} first-mile, {} autonomous, {} last-mile",
        legs(Leg::FirstMile),
        legs(Leg::Autonomous),
        legs(Leg::LastMile)
    );
    println!(
        "fleet {}, flexibility {} min, service {} min, loaded autonomous miles {:.1}",
        inst.fleet_size(),
        inst.flexibility(),
        inst.service_time(),
        to_miles(loaded)
    );

    let path = std::env::temp_dir().join(format!("hubflow-n17-{seed}.json"));
    save_instance(&inst, &path)?;
    let back = load_instance(&path)?;
    assert_eq!(back.to_data(), inst.to_data());
    println!("wrote {}", path.display());
    Ok(())
}
