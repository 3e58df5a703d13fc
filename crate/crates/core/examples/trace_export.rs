//! Record the first slots of a run and export counters plus the slot trace.
//!
//! Usage: `cargo run --example trace_export -- [out.csv]`

use std::path::PathBuf;

use mlo_coex::params::ScenarioConfig;
use mlo_coex::sim::{run_sim, trace_export, SimOptions};

fn main() -> mlo_coex::error::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("mlo_run.csv"), PathBuf::from);
    let opts = SimOptions {
        trace_limit: 500,
        ..SimOptions::default().with_duration(0.05)
    };
    let (stats, _) = run_sim(&ScenarioConfig::new(2, 1), &opts)?;
    let trace = trace_export(&stats, &out)?;
    println!("stats: {}", out.display());
    println!("trace: {} ({} rows)", trace.display(), stats.trace.len());
    Ok(())
}
