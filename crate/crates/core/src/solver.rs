//! Outer fixed-point solve of the coupled model and closed-form throughput.

use log::{debug, warn};

use crate::ap_chain::{ap_tau, ApChainInputs};
use crate::coupling::{
    alignment_probs, busy_probs_with, collision_probs, event_profile_lenient, BusyAlign, PSet,
    Reading, SlotEventProfile, TauSet, RESIDUAL_TOL,
};
use crate::error::{Error, Result};
use crate::legacy::sld_taus;
use crate::nonap_chain::{nonap_stationary, nonap_tau_selfconsistent, NonApChainInputs};
use crate::nth::{n_th, NthModel};
use crate::params::ScenarioConfig;
use crate::report::{RunMeta, Source, ThroughputReport};

/// Upper clamp for every unknown; keeps `1 - x` away from zero.
const PROB_MAX: f64 = 1.0 - 1e-9;
const UNKNOWNS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Damping factor of `x <- (1 - alpha) x + alpha F(x)`.
    pub alpha: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// How many times `alpha` may be halved when the residual keeps growing.
    pub max_halvings: u32,
    /// Anderson mixing depth; `None` for plain damping.
    pub anderson: Option<usize>,
    pub reading: Reading,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            alpha: 0.3,
            tol: 1e-8,
            max_iters: 50_000,
            max_halvings: 4,
            anderson: None,
            reading: Reading::Corrected,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingState {
    pub taus: TauSet,
    pub ps: PSet,
    pub busy: BusyAlign,
    pub residual_norm: f64,
    pub iterations: usize,
}

impl CouplingState {
    pub fn initial(cfg: &ScenarioConfig) -> Self {
        let t0 = 2.0 / (f64::from(cfg.backoff.w0) + 1.0);
        CouplingState {
            taus: TauSet::uniform(t0),
            ps: PSet::uniform(0.1),
            busy: BusyAlign {
                x_ap: 0.1,
                x_mld: 0.1,
                y_case1: 0.1,
                y_case2: 0.1,
            },
            residual_norm: f64::INFINITY,
            iterations: 0,
        }
    }

    fn pack(&self) -> [f64; UNKNOWNS] {
        let mut v = [0.0; UNKNOWNS];
        v[..6].copy_from_slice(&self.taus.to_array());
        v[6..12].copy_from_slice(&self.ps.to_array());
        v[12] = self.busy.x_ap;
        v[13] = self.busy.x_mld;
        v[14] = self.busy.y_case1;
        v[15] = self.busy.y_case2;
        v
    }

    fn unpack(v: &[f64; UNKNOWNS]) -> Self {
        let six = |o: usize| -> [f64; 6] { v[o..o + 6].try_into().expect("six unknowns") };
        CouplingState {
            taus: TauSet::from_array(six(0)),
            ps: PSet::from_array(six(6)),
            busy: BusyAlign {
                x_ap: v[12],
                x_mld: v[13],
                y_case1: v[14],
                y_case2: v[15],
            },
            residual_norm: f64::INFINITY,
            iterations: 0,
        }
    }
}

/// One application of the model map: chains from `(p, X, Y)`, then
/// collision, event, busy and alignment probabilities from the new taus.
pub fn evaluate(
    cfg: &ScenarioConfig,
    x: &CouplingState,
    reading: Reading,
) -> Result<CouplingState> {
    let (nm, ns) = (cfg.n_mld, cfg.n_sld);
    let gamma = cfg.gamma();
    let bo = &cfg.backoff;
    let durations = cfg.durations()?;

    let sld = sld_taus(x.ps.p_sld_1, x.ps.p_sld_2, bo)?;
    let (tau_ap_mld, tau_ap_sld) = ap_tau(&ApChainInputs {
        p_ap_mld: x.ps.p_ap_mld,
        p_ap_sld: x.ps.p_ap_sld,
        x_ap: x.busy.x_ap,
        gamma,
        backoff: *bo,
    })?;
    let (tau_mld_1, tau_mld_2) = if nm == 0 {
        (0.0, 0.0)
    } else {
        (
            nonap_tau_selfconsistent(x.ps.p_mld_1, x.busy.x_mld, x.busy.y_case1, bo)?,
            nonap_tau_selfconsistent(x.ps.p_mld_2, x.busy.x_mld, x.busy.y_case2, bo)?,
        )
    };
    let (tau_sld_1, tau_sld_2) = if ns == 0 {
        (0.0, 0.0)
    } else {
        (sld.tau_case1, sld.tau_case2)
    };
    let taus = TauSet {
        tau_ap_sld,
        tau_ap_mld,
        tau_mld_1,
        tau_mld_2,
        tau_sld_1,
        tau_sld_2,
    };
    let ps = collision_probs(&taus, nm, ns);
    let profile = event_profile_lenient(&taus, &ps, nm, ns, &durations, reading);
    let (x_ap, x_mld) = busy_probs_with(
        &profile, &taus, &ps, gamma, &durations, nm, ns, reading, false,
    )?;

    let (y_case1, y_case2) = if nm == 0 {
        (0.0, 0.0)
    } else {
        let dist = |p_mld: f64, y: f64, tau: f64| {
            nonap_stationary(&NonApChainInputs {
                p_mld,
                x_mld: x.busy.x_mld,
                y,
                tau_mld_prev: tau,
                backoff: *bo,
            })
        };
        let d1 = dist(x.ps.p_mld_1, x.busy.y_case1, tau_mld_1)?;
        let d2 = dist(x.ps.p_mld_2, x.busy.y_case2, tau_mld_2)?;
        alignment_probs(
            &d1,
            &d2,
            profile.case1.p_idle,
            profile.case2.p_idle,
            gamma,
            bo,
        )?
    };

    Ok(CouplingState {
        taus,
        ps,
        busy: BusyAlign {
            x_ap,
            x_mld,
            y_case1,
            y_case2,
        },
        residual_norm: f64::INFINITY,
        iterations: 0,
    })
}

fn max_abs_diff(a: &[f64; UNKNOWNS], b: &[f64; UNKNOWNS]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn clamp_all(v: &mut [f64; UNKNOWNS]) {
    for x in v.iter_mut() {
        *x = x.clamp(0.0, PROB_MAX);
    }
}

pub fn solve_fixed_point(cfg: &ScenarioConfig, opts: &SolverOptions) -> Result<CouplingState> {
    cfg.validate()?;
    if !(opts.alpha > 0.0 && opts.alpha <= 1.0) {
        return Err(Error::invalid(format!(
            "alpha must lie in (0, 1], got {}",
            opts.alpha
        )));
    }
    let mut x = CouplingState::initial(cfg).pack();
    let mut alpha = opts.alpha;
    let mut halvings = 0;
    let mut rising = 0;
    let mut last = f64::INFINITY;
    let mut trace = Vec::new();
    let mut mixer = opts.anderson.map(Anderson::new);

    for it in 0..opts.max_iters {
        let fx = evaluate(cfg, &CouplingState::unpack(&x), opts.reading)?.pack();
        let residual = max_abs_diff(&fx, &x);
        if it % 100 == 0 {
            trace.push(residual);
        }
        if residual < opts.tol {
            let mut state = CouplingState::unpack(&x);
            state.residual_norm = residual;
            state.iterations = it;
            debug!("converged after {it} iterations, residual {residual:.3e}");
            check_converged(cfg, &state, opts.reading);
            return Ok(state);
        }
        if !residual.is_finite() {
            break;
        }

        if residual > last {
            rising += 1;
        } else {
            rising = 0;
        }
        last = residual;
        if rising >= 25 {
            if halvings == opts.max_halvings {
                break;
            }
            halvings += 1;
            alpha /= 2.0;
            rising = 0;
            if let Some(m) = mixer.as_mut() {
                m.reset();
            }
            debug!("residual growing at iteration {it}; alpha -> {alpha}");
        }

        let mut damped = [0.0; UNKNOWNS];
        for k in 0..UNKNOWNS {
            damped[k] = x[k] + alpha * (fx[k] - x[k]);
        }
        x = match mixer.as_mut() {
            Some(m) => m.step(&x, &damped),
            None => damped,
        };
        clamp_all(&mut x);
    }
    let residual = trace.last().copied().unwrap_or(f64::INFINITY).min(last);
    Err(Error::NoConvergence {
        iterations: opts.max_iters,
        residual,
        trace,
    })
}

fn check_converged(cfg: &ScenarioConfig, state: &CouplingState, reading: Reading) {
    let Ok(d) = cfg.durations() else { return };
    let prof = event_profile_lenient(&state.taus, &state.ps, cfg.n_mld, cfg.n_sld, &d, reading);
    for (name, ev) in [("case 1", prof.case1), ("case 2", prof.case2)] {
        if ev.p_c2 < -RESIDUAL_TOL {
            warn!(
                "{name}: residual collision probability {:.3e} at the fixed point",
                ev.p_c2
            );
        }
    }
}

/// Anderson mixing on the damped map.
struct Anderson {
    depth: usize,
    xs: Vec<[f64; UNKNOWNS]>,
    gs: Vec<[f64; UNKNOWNS]>,
}

impl Anderson {
    fn new(depth: usize) -> Self {
        Anderson {
            depth: depth.max(1),
            xs: Vec::new(),
            gs: Vec::new(),
        }
    }

    fn reset(&mut self) {
        self.xs.clear();
        self.gs.clear();
    }

    fn step(&mut self, x: &[f64; UNKNOWNS], g: &[f64; UNKNOWNS]) -> [f64; UNKNOWNS] {
        self.xs.push(*x);
        self.gs.push(*g);
        if self.xs.len() > self.depth + 1 {
            self.xs.remove(0);
            self.gs.remove(0);
        }
        let n = self.xs.len();
        if n < 2 {
            return *g;
        }
        let res = |k: usize| -> [f64; UNKNOWNS] {
            std::array::from_fn(|i| self.gs[k][i] - self.xs[k][i])
        };
        let f_last = res(n - 1);
        let d_f: Vec<[f64; UNKNOWNS]> = (0..n - 1)
            .map(|k| {
                let (a, b) = (res(k + 1), res(k));
                std::array::from_fn(|i| a[i] - b[i])
            })
            .collect();
        let d_g: Vec<[f64; UNKNOWNS]> = (0..n - 1)
            .map(|k| std::array::from_fn(|i| self.gs[k + 1][i] - self.gs[k][i]))
            .collect();
        let dot = |a: &[f64; UNKNOWNS], b: &[f64; UNKNOWNS]| -> f64 {
            a.iter().zip(b).map(|(x, y)| x * y).sum()
        };
        let k = d_f.len();
        let mut a = vec![vec![0.0; k]; k];
        let mut rhs = vec![0.0; k];
        for r in 0..k {
            for c in 0..k {
                a[r][c] = dot(&d_f[r], &d_f[c]);
            }
            a[r][r] *= 1.0 + 1e-10;
            a[r][r] += 1e-300;
            rhs[r] = dot(&d_f[r], &f_last);
        }
        let Some(coef) = solve_dense(a, rhs) else {
            self.reset();
            return *g;
        };
        let mut out = *g;
        for (j, cj) in coef.iter().enumerate() {
            for i in 0..UNKNOWNS {
                out[i] -= cj * d_g[j][i];
            }
        }
        if out.iter().all(|v| v.is_finite()) {
            out
        } else {
            self.reset();
            *g
        }
    }
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let (top, rest) = a.split_at_mut(row);
            for (x, p) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Slot event profile at a solved state.
pub fn profile_at(
    cfg: &ScenarioConfig,
    state: &CouplingState,
    reading: Reading,
) -> Result<SlotEventProfile> {
    let d = cfg.durations()?;
    Ok(event_profile_lenient(
        &state.taus,
        &state.ps,
        cfg.n_mld,
        cfg.n_sld,
        &d,
        reading,
    ))
}

/// Closed-form per-device per-link throughputs in Mb/s.
pub fn throughput(
    cfg: &ScenarioConfig,
    state: &CouplingState,
    nth: &NthModel,
    reading: Reading,
) -> Result<ThroughputReport> {
    let d = cfg.durations()?;
    let prof = profile_at(cfg, state, reading)?;
    let (c1, c2) = (prof.case1, prof.case2);
    let g = cfg.gamma();
    let bits = cfg.phy.payload_bits();
    let ps = &state.ps;

    let s_u_sld = if cfg.n_sld == 0 {
        0.0
    } else {
        ((1.0 - g) * c1.tau2 / c1.phi + g * c2.tau2 / c2.phi) * bits / f64::from(cfg.n_sld)
    };
    let penalty = |p: f64| (1.0 - p).powf(n_th(nth, p));
    let s_u_mld = if cfg.n_mld == 0 {
        0.0
    } else {
        ((1.0 - g) * c1.tau3 / c1.phi * penalty(ps.p_mld_1)
            + g * c2.tau3 / c2.phi * penalty(ps.p_mld_2))
            * bits
            / f64::from(cfg.n_mld)
    };
    let s_d_sld = c1.tau1 / c1.phi * bits;
    let phi_1a = match reading {
        Reading::Corrected => c2.phi,
        Reading::Literal => c1.phi,
    };
    let nth_ap = n_th(nth, ps.p_ap_mld);
    let s_d_mld = (c2.tau1 / phi_1a
        + c2.tau1b / c2.phi * (1.0 - nth_ap * d.t_empty / d.t_data) * penalty(ps.p_ap_mld))
        * bits;

    Ok(ThroughputReport {
        s_u_sld,
        s_u_mld,
        s_d_sld,
        s_d_mld: s_d_mld.max(0.0),
        scenario: cfg.clone(),
        source: Source::Analytical,
        meta: RunMeta {
            iterations: Some(state.iterations),
            residual: Some(state.residual_norm),
            nth_model: Some(nth.label()),
            strict_paper: reading == Reading::Literal,
            ..RunMeta::default()
        },
    })
}

/// Solve and evaluate throughput with the default N_th table.
pub fn analyze(
    cfg: &ScenarioConfig,
    opts: &SolverOptions,
) -> Result<(CouplingState, ThroughputReport)> {
    let state = solve_fixed_point(cfg, opts)?;
    let nth = NthModel::default_for(&cfg.backoff);
    let report = throughput(cfg, &state, &nth, opts.reading)?;
    Ok((state, report))
}

/// Aggregation level `n_a` in `1..=max_n_a` whose analytical legacy uplink
/// throughput at `cfg` is closest to `target` Mb/s.
pub fn calibrate_n_a(
    cfg: &ScenarioConfig,
    target: f64,
    max_n_a: u32,
    opts: &SolverOptions,
) -> Result<(u32, f64)> {
    use rayon::prelude::*;
    let results: Vec<Result<(u32, f64)>> = (1..=max_n_a)
        .into_par_iter()
        .map(|n_a| {
            let c = cfg.clone().with_phy(cfg.phy.with_n_a(n_a));
            let (_, rep) = analyze(&c, opts)?;
            Ok((n_a, rep.s_u_sld))
        })
        .collect();
    let mut best: Option<(u32, f64)> = None;
    for r in results {
        let (n_a, s) = r?;
        if best.is_none_or(|(_, b)| (s - target).abs() < (b - target).abs()) {
            best = Some((n_a, s));
        }
    }
    best.ok_or_else(|| Error::invalid("max_n_a must be >= 1"))
}

/// Integer `r_su` in `lo..=hi` (bits per symbol) whose analytical legacy
/// uplink throughput at `cfg` is closest to `target` Mb/s, keeping `n_a`.
/// Throughput is nondecreasing in `r_su`, so a bisection suffices.
pub fn calibrate_r_su(
    cfg: &ScenarioConfig,
    target: f64,
    (mut lo, mut hi): (u32, u32),
    opts: &SolverOptions,
) -> Result<(u32, f64)> {
    if lo == 0 || lo > hi {
        return Err(Error::invalid(format!("bad r_su search range {lo}..={hi}")));
    }
    let eval = |r: u32| -> Result<f64> {
        let phy = crate::params::PhyParams { r_su: r, ..cfg.phy };
        Ok(analyze(&cfg.clone().with_phy(phy), opts)?.1.s_u_sld)
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if eval(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (a, b) = (eval(lo)?, eval(hi)?);
    Ok(if (a - target).abs() <= (b - target).abs() {
        (lo, a)
    } else {
        (hi, b)
    })
}
