//! Load a TOML scenario, show the derived slot durations, and round-trip it.

use std::path::Path;

use mlo_coex::config::{load_config, to_toml};

fn main() -> mlo_coex::error::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/calibrated.toml").to_string()
    });
    let cfg = load_config(Path::new(&path))?;
    let d = cfg.durations()?;
    println!(
        "T_e = {} us, T_s = {:.1} us, T_c = {:.1} us",
        d.t_empty, d.t_success, d.t_collision
    );
    print!("{}", to_toml(&cfg));
    Ok(())
}
