//! Run the slot-level simulator once and dump per-device counters.

use mlo_coex::cli::format_report;
use mlo_coex::params::{PhyParams, ScenarioConfig};
use mlo_coex::sim::{run_sim, write_stats_csv, SimOptions};

fn main() -> mlo_coex::error::Result<()> {
    let cfg = ScenarioConfig::new(4, 4).with_phy(PhyParams::calibrated());
    let opts = SimOptions::default().with_seed(7).with_duration(2.0);
    let (stats, report) = run_sim(&cfg, &opts)?;
    write_stats_csv(&stats, std::io::stdout().lock())?;
    for (l, link) in stats.links.iter().enumerate() {
        println!(
            "link {l}: {} transmissions, {} collisions, busy {:.1}%",
            link.transmissions,
            link.collisions,
            100.0 * link.busy_ns as f64 / link.elapsed_ns.max(1) as f64
        );
    }
    println!("NSTR violations: {}", stats.nstr_violations);
    println!("{}", format_report(&report));
    Ok(())
}
