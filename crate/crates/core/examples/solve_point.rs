//! Solve the coupled model at one operating point and print the fixed point
//! and the four throughput classes.

use mlo_coex::cli::{format_report, format_state};
use mlo_coex::params::{PhyParams, ScenarioConfig};
use mlo_coex::solver::{analyze, SolverOptions};

fn main() -> mlo_coex::error::Result<()> {
    let cfg = ScenarioConfig::new(3, 3).with_phy(PhyParams::calibrated());
    let (state, report) = analyze(&cfg, &SolverOptions::default())?;
    println!("{}", format_state(&state));
    println!("{}", format_report(&report));
    Ok(())
}
