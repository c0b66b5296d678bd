//! Schedules an instance with the flexibility ladder and writes its Gantt
//! segments as CSV.
//!
//! cargo run --release --example gantt_export -- [out.csv]

use hubflow::bench::{gantt_csv, gantt_export, SegmentKind};
use hubflow::instance::{generate_instance, GeneratorParams};
use hubflow::nf::{default_ladder, delta_ladder_ub};

fn main() -> hubflow::Result<()> {
    let inst = generate_instance(&GeneratorParams::scaled(120), 1)?;
    let delta = inst.flexibility();
    let plan = delta_ladder_ub(&inst, delta, &default_ladder(delta))?.best;
    let segments = gantt_export(&plan, &inst)?;
    let busy = |kind| {
        segments
            .iter()
            .filter(|s| s.kind == kind)
            .map(|s| s.end - s.start)
            .sum::<i64>()
    };
    println!(
        "{} trucks, {} task minutes, {} relocation minutes",
        plan.routes.len(),
        busy(SegmentKind::Task),
        busy(SegmentKind::Relocation)
    );
    let csv = gantt_csv(&segments);
    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, csv)?;
            println!("wrote {path}");
        }
        None => csv.lines().take(12).for_each(|l| println!("{l}")),
    }
    Ok(())
}
