//! Analysis against simulation over a short legacy sweep, three seeds each.

use mlo_coex::cli::{compare, format_compare, Engines, SweepSpec, Tolerance};
use mlo_coex::params::{PhyParams, ScenarioConfig};
use mlo_coex::sim::SimOptions;
use mlo_coex::solver::SolverOptions;

fn main() -> mlo_coex::error::Result<()> {
    let base = ScenarioConfig::new(2, 2).with_phy(PhyParams::calibrated());
    let spec = SweepSpec::parse_axis("n_sld=2,4,6", 3, Engines::Both)?;
    let sim = SimOptions::default().with_duration(2.0);
    let rows = compare(&base, &spec, &SolverOptions::default(), &sim)?;
    println!("{}", format_compare(&rows, &Tolerance::default()));
    Ok(())
}
