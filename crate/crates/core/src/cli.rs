//! Sweep, solve and compare drivers behind the `mlo-coex` binary.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::ScenarioConfig;
use crate::report::ThroughputReport;
use crate::sim::{run_sim, SimOptions};
use crate::solver::{analyze, CouplingState, SolverOptions};

pub const CLASSES: [&str; 4] = ["s_u_sld", "s_u_mld", "s_d_sld", "s_d_mld"];

pub const SOLVE_HEADER: &str =
    "n_mld,n_sld,gamma,s_u_sld,s_u_mld,s_d_sld,s_d_mld,iterations,residual,nth_model,strict_paper";

pub const COMPARE_HEADER: &str = "n_mld,n_sld,gamma,\
ana_s_u_sld,ana_s_u_mld,ana_s_d_sld,ana_s_d_mld,\
sim_s_u_sld_mean,sim_s_u_sld_std,sim_s_u_mld_mean,sim_s_u_mld_std,\
sim_s_d_sld_mean,sim_s_d_sld_std,sim_s_d_mld_mean,sim_s_d_mld_std,\
err_s_u_sld_pct,err_s_u_mld_pct,err_s_d_sld_pct,err_s_d_mld_pct,\
seeds,exceeds";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// `n_mld = n_sld = v`.
    Joint,
    /// `n_sld = v` with `n_mld` from the base scenario.
    Sld,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engines {
    Analysis,
    Sim,
    #[default]
    Both,
}

impl Engines {
    pub fn analysis(self) -> bool {
        self != Engines::Sim
    }

    pub fn sim(self) -> bool {
        self != Engines::Analysis
    }
}

impl FromStr for Engines {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analysis" => Ok(Engines::Analysis),
            "sim" => Ok(Engines::Sim),
            "both" => Ok(Engines::Both),
            _ => Err(Error::invalid(format!(
                "engines must be analysis, sim or both, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub points: Vec<u32>,
    pub repetitions: u32,
    pub engines: Engines,
}

impl SweepSpec {
    /// Single point at the base scenario.
    pub fn single(base: &ScenarioConfig) -> SweepSpec {
        SweepSpec {
            axis: Axis::Sld,
            points: vec![base.n_sld],
            repetitions: 1,
            engines: Engines::Both,
        }
    }

    /// Parses `AXIS=RANGE`: axis `joint` (alias `n`) or `n_sld`; range
    /// `a..b` (inclusive) or a comma list.
    pub fn parse_axis(text: &str, repetitions: u32, engines: Engines) -> Result<SweepSpec> {
        let (axis, range) = text.split_once('=').ok_or_else(|| {
            Error::invalid(format!("sweep must look like AXIS=RANGE, got {text:?}"))
        })?;
        let axis = match axis.trim() {
            "joint" | "n" | "n_mld=n_sld" => Axis::Joint,
            "n_sld" => Axis::Sld,
            other => {
                return Err(Error::invalid(format!(
                    "unknown sweep axis {other:?} (use joint or n_sld)"
                )))
            }
        };
        let num = |s: &str| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| Error::invalid(format!("bad sweep value {s:?}")))
        };
        let points = match range.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
                (a..=b).collect()
            }
            None => range.split(',').map(num).collect::<Result<Vec<_>>>()?,
        };
        let spec = SweepSpec {
            axis,
            points,
            repetitions,
            engines,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::invalid("sweep range is empty"));
        }
        if self.engines.sim() && self.repetitions == 0 {
            return Err(Error::invalid("simulation needs at least one seed"));
        }
        Ok(())
    }

    pub fn scenarios(&self, base: &ScenarioConfig) -> Vec<ScenarioConfig> {
        self.points
            .iter()
            .map(|&v| {
                let mut cfg = base.clone();
                match self.axis {
                    Axis::Joint => {
                        cfg.n_mld = v;
                        cfg.n_sld = v;
                    }
                    Axis::Sld => cfg.n_sld = v,
                }
                cfg
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Relative tolerance on the legacy uplink and any class above the floor.
    pub relative: f64,
    /// Absolute floor in Mb/s for the near-zero classes.
    pub floor: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            relative: 0.15,
            floor: 0.5,
        }
    }
}

impl Tolerance {
    pub fn exceeded(&self, analytical: f64, simulated: f64) -> bool {
        (simulated - analytical).abs() > (self.relative * analytical.abs()).max(self.floor)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spread {
    pub mean: f64,
    pub std: f64,
}

impl Spread {
    /// Mean and sample standard deviation (zero for one sample).
    pub fn of(xs: &[f64]) -> Spread {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Spread { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub scenario: ScenarioConfig,
    pub analytical: Option<ThroughputReport>,
    pub simulated: Option<[Spread; 4]>,
    pub seeds: u32,
}

impl CompareRow {
    /// Percent error of the simulated mean against the analysis.
    pub fn percent_errors(&self) -> Option<[f64; 4]> {
        let (a, s) = (self.analytical.as_ref()?, self.simulated.as_ref()?);
        let a = a.values();
        Some(std::array::from_fn(|i| 100.0 * (s[i].mean - a[i]) / a[i]))
    }

    pub fn exceeds(&self, tol: &Tolerance) -> Vec<&'static str> {
        let (Some(a), Some(s)) = (&self.analytical, &self.simulated) else {
            return Vec::new();
        };
        let a = a.values();
        CLASSES
            .iter()
            .enumerate()
            .filter(|&(i, _)| tol.exceeded(a[i], s[i].mean))
            .map(|(_, c)| *c)
            .collect()
    }
}

/// Analytical solve at every sweep point, in sweep order.
pub fn solve_sweep(
    scenarios: &[ScenarioConfig],
    opts: &SolverOptions,
) -> Result<Vec<(CouplingState, ThroughputReport)>> {
    scenarios
        .par_iter()
        .map(|cfg| analyze(cfg, opts).map_err(|e| at_point(cfg, e)))
        .collect()
}

fn at_point(cfg: &ScenarioConfig, e: Error) -> Error {
    Error::AtPoint {
        n_mld: cfg.n_mld,
        n_sld: cfg.n_sld,
        source: Box::new(e),
    }
}

/// Analysis and/or simulation over the sweep; seeds are `seed0..seed0 + reps`.
pub fn compare(
    base: &ScenarioConfig,
    spec: &SweepSpec,
    solver: &SolverOptions,
    sim: &SimOptions,
) -> Result<Vec<CompareRow>> {
    spec.validate()?;
    let scenarios = spec.scenarios(base);
    let reps = if spec.engines.sim() {
        spec.repetitions
    } else {
        0
    };
    let jobs: Vec<(usize, u32)> = (0..scenarios.len())
        .flat_map(|i| (0..reps).map(move |r| (i, r)))
        .collect();
    let analytical = if spec.engines.analysis() {
        solve_sweep(&scenarios, solver)?
            .into_iter()
            .map(|(_, r)| Some(r))
            .collect()
    } else {
        vec![None; scenarios.len()]
    };
    let runs: Vec<(usize, [f64; 4])> = jobs
        .par_iter()
        .map(|&(i, r)| {
            let opts = sim.clone().with_seed(sim.seed + u64::from(r));
            run_sim(&scenarios[i], &opts)
                .map(|(_, rep)| (i, rep.values()))
                .map_err(|e| at_point(&scenarios[i], e))
        })
        .collect::<Result<_>>()?;

    Ok(scenarios
        .into_iter()
        .zip(analytical)
        .enumerate()
        .map(|(i, (scenario, analytical))| {
            let vals: Vec<[f64; 4]> = runs
                .iter()
                .filter(|(j, _)| *j == i)
                .map(|(_, v)| *v)
                .collect();
            let simulated = (!vals.is_empty()).then(|| {
                std::array::from_fn(|c| Spread::of(&vals.iter().map(|v| v[c]).collect::<Vec<_>>()))
            });
            CompareRow {
                scenario,
                analytical,
                simulated,
                seeds: reps,
            }
        })
        .collect())
}

pub fn write_solve_csv<W: Write>(reports: &[ThroughputReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SOLVE_HEADER.split(','))?;
    for r in reports {
        let m = &r.meta;
        let mut rec = vec![
            r.scenario.n_mld.to_string(),
            r.scenario.n_sld.to_string(),
            r.scenario.gamma().to_string(),
        ];
        rec.extend(r.values().iter().map(f64::to_string));
        rec.push(m.iterations.map(|v| v.to_string()).unwrap_or_default());
        rec.push(m.residual.map(|v| format!("{v:e}")).unwrap_or_default());
        rec.push(m.nth_model.clone().unwrap_or_default());
        rec.push(m.strict_paper.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_compare_csv<W: Write>(rows: &[CompareRow], tol: &Tolerance, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMPARE_HEADER.split(','))?;
    for row in rows {
        let mut rec = vec![
            row.scenario.n_mld.to_string(),
            row.scenario.n_sld.to_string(),
            row.scenario.gamma().to_string(),
        ];
        match &row.analytical {
            Some(a) => rec.extend(a.values().iter().map(f64::to_string)),
            None => rec.extend(std::iter::repeat_n(String::new(), 4)),
        }
        match &row.simulated {
            Some(s) => {
                for c in s {
                    rec.push(c.mean.to_string());
                    rec.push(c.std.to_string());
                }
            }
            None => rec.extend(std::iter::repeat_n(String::new(), 8)),
        }
        match row.percent_errors() {
            Some(e) => rec.extend(e.iter().map(f64::to_string)),
            None => rec.extend(std::iter::repeat_n(String::new(), 4)),
        }
        rec.push(row.seeds.to_string());
        rec.push(row.exceeds(tol).join(";"));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn format_state(state: &CouplingState) -> String {
    let t = &state.taus;
    let p = &state.ps;
    let b = &state.busy;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "converged in {} iterations, residual {:.2e}",
        state.iterations, state.residual_norm
    );
    let _ = writeln!(
        s,
        "tau  ap_sld {:.6}  ap_mld {:.6}  mld {:.6}/{:.6}  sld {:.6}/{:.6}",
        t.tau_ap_sld, t.tau_ap_mld, t.tau_mld_1, t.tau_mld_2, t.tau_sld_1, t.tau_sld_2
    );
    let _ = writeln!(
        s,
        "p    ap_sld {:.6}  ap_mld {:.6}  mld {:.6}/{:.6}  sld {:.6}/{:.6}",
        p.p_ap_sld, p.p_ap_mld, p.p_mld_1, p.p_mld_2, p.p_sld_1, p.p_sld_2
    );
    let _ = writeln!(
        s,
        "X_AP {:.6}  X_MLD {:.6}  Y {:.6}/{:.6}",
        b.x_ap, b.x_mld, b.y_case1, b.y_case2
    );
    s
}

pub fn format_report(r: &ThroughputReport) -> String {
    let labels = [
        "legacy uplink",
        "non-AP MLD uplink",
        "AP downlink to legacy",
        "AP downlink to non-AP MLD",
    ];
    let mut s = format!(
        "n_mld={} n_sld={} gamma={:.3}\n",
        r.scenario.n_mld,
        r.scenario.n_sld,
        r.scenario.gamma()
    );
    for (label, v) in labels.iter().zip(r.values()) {
        let _ = writeln!(s, "  {label:<26} {v:>10.3} Mbps");
    }
    s
}

pub fn format_compare(rows: &[CompareRow], tol: &Tolerance) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>5} {:>5}  {:<8} {:>10} {:>18} {:>8}",
        "n_mld", "n_sld", "class", "analysis", "sim mean ± std", "err %"
    );
    let mut flagged = 0;
    for row in rows {
        let errs = row.percent_errors();
        for (c, class) in CLASSES.iter().enumerate() {
            let ana = row
                .analytical
                .as_ref()
                .map(|a| format!("{:.3}", a.values()[c]))
                .unwrap_or_default();
            let sim = row
                .simulated
                .as_ref()
                .map(|v| format!("{:.3} ± {:.3}", v[c].mean, v[c].std))
                .unwrap_or_default();
            // Relative error is noise below the floor.
            let err = match (errs, &row.analytical) {
                (Some(e), Some(a)) if a.values()[c].abs() >= tol.floor => format!("{:.1}", e[c]),
                (Some(_), _) => "-".into(),
                _ => String::new(),
            };
            let _ = writeln!(
                s,
                "{:>5} {:>5}  {:<8} {:>10} {:>18} {:>8}",
                row.scenario.n_mld, row.scenario.n_sld, class, ana, sim, err
            );
        }
        let ex = row.exceeds(tol);
        if !ex.is_empty() {
            flagged += 1;
            let _ = writeln!(
                s,
                "  exceeds tolerance at n_mld={} n_sld={}: {}",
                row.scenario.n_mld,
                row.scenario.n_sld,
                ex.join(", ")
            );
        }
    }
    let _ = writeln!(
        s,
        "{flagged} of {} points exceed tolerance ({:.0}% relative, {} Mbps floor)",
        rows.len(),
        100.0 * tol.relative,
        tol.floor
    );
    s
}
