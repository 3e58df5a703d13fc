use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mlo_coex::cli::{
    compare, format_compare, format_report, format_state, solve_sweep, write_compare_csv,
    write_solve_csv, Engines, SweepSpec, Tolerance,
};
use mlo_coex::config::load_config;
use mlo_coex::coupling::Reading;
use mlo_coex::error::{Error, Result};
use mlo_coex::params::ScenarioConfig;
use mlo_coex::sim::SimOptions;
use mlo_coex::solver::SolverOptions;

/// Analytical model and slot simulator for multi-link and legacy Wi-Fi coexistence.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the analytical model at one point or along a sweep.
    Solve(Common),
    /// Compare analysis and simulation along a sweep.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Simulation seeds per sweep point.
        #[arg(long, default_value_t = 3)]
        seeds: u32,
        /// analysis, sim or both.
        #[arg(long, default_value = "both")]
        engines: Engines,
        /// Virtual seconds per simulation run.
        #[arg(long, default_value_t = 5.0)]
        duration_s: f64,
        /// First seed; runs use seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML); built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// AXIS=RANGE, e.g. joint=2..7 or n_sld=2,3,5.
    #[arg(long)]
    sweep: Option<String>,
    /// Write full-precision CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the literal forms of the coupling and throughput expressions.
    #[arg(long)]
    strict_paper: bool,
    /// Probability that an AP frame goes to a non-AP MLD.
    #[arg(long)]
    gamma: Option<f64>,
}

impl Common {
    fn scenario(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(p) => load_config(p)?,
            None => ScenarioConfig::default(),
        };
        if let Some(g) = self.gamma {
            cfg.gamma = Some(g);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn solver(&self) -> SolverOptions {
        SolverOptions {
            reading: if self.strict_paper {
                Reading::Literal
            } else {
                Reading::Corrected
            },
            ..SolverOptions::default()
        }
    }

    fn spec(&self, base: &ScenarioConfig, seeds: u32, engines: Engines) -> Result<SweepSpec> {
        match &self.sweep {
            Some(s) => SweepSpec::parse_axis(s, seeds, engines),
            None => Ok(SweepSpec {
                repetitions: seeds,
                engines,
                ..SweepSpec::single(base)
            }),
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Solve(c) => {
            let base = c.scenario()?;
            let spec = c.spec(&base, 1, Engines::Analysis)?;
            let results = solve_sweep(&spec.scenarios(&base), &c.solver())?;
            for (state, report) in &results {
                print!("{}{}", format_state(state), format_report(report));
            }
            if let Some(out) = &c.out {
                let reports: Vec<_> = results.into_iter().map(|(_, r)| r).collect();
                write_solve_csv(&reports, BufWriter::new(File::create(out)?))?;
            }
        }
        Cmd::Compare {
            common: c,
            seeds,
            engines,
            duration_s,
            seed,
        } => {
            let base = c.scenario()?;
            let spec = c.spec(&base, seeds, engines)?;
            let sim = SimOptions {
                seed,
                duration_s,
                ..SimOptions::default()
            };
            if engines.sim() && !(duration_s.is_finite() && duration_s > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "duration must be positive, got {duration_s}"
                )));
            }
            let rows = compare(&base, &spec, &c.solver(), &sim)?;
            let tol = Tolerance::default();
            print!("{}", format_compare(&rows, &tol));
            match &c.out {
                Some(out) => write_compare_csv(&rows, &tol, BufWriter::new(File::create(out)?))?,
                None => write_compare_csv(&rows, &tol, io::sink())?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
