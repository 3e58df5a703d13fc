//! Joint sweep of the analytical model, written as CSV to stdout.

use mlo_coex::cli::{solve_sweep, write_solve_csv, Engines, SweepSpec};
use mlo_coex::params::{PhyParams, ScenarioConfig};
use mlo_coex::solver::SolverOptions;

fn main() -> mlo_coex::error::Result<()> {
    let base = ScenarioConfig::new(2, 2).with_phy(PhyParams::calibrated());
    let spec = SweepSpec::parse_axis("joint=2..7", 1, Engines::Analysis)?;
    let results = solve_sweep(&spec.scenarios(&base), &SolverOptions::default())?;
    let reports: Vec<_> = results.into_iter().map(|(_, r)| r).collect();
    write_solve_csv(&reports, std::io::stdout().lock())
}
