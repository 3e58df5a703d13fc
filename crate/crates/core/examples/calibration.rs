//! Fit the data rate so the legacy uplink at two MLDs and two legacy
//! stations hits a target throughput.

use mlo_coex::params::{PhyParams, ScenarioConfig};
use mlo_coex::solver::{calibrate_n_a, calibrate_r_su, SolverOptions};

fn main() -> mlo_coex::error::Result<()> {
    let target = std::env::args()
        .nth(1)
        .map_or(158.4, |s| s.parse().expect("target in Mb/s"));
    let opts = SolverOptions::default();

    let base = ScenarioConfig::new(2, 2).with_phy(PhyParams::mcs8_80mhz().with_n_a(256));
    let (r_su, s) = calibrate_r_su(&base, target, (1, 20_000), &opts)?;
    println!("n_a = 256: r_su = {r_su} bits/symbol gives {s:.3} Mb/s");

    // Alternative: keep the MCS 8 rate and search the aggregation level.
    let base = ScenarioConfig::new(2, 2);
    let (n_a, s) = calibrate_n_a(&base, target, 256, &opts)?;
    println!("r_su = 5880: n_a = {n_a} gives {s:.3} Mb/s");
    Ok(())
}
