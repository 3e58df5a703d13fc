//! Slot-level simulator of two-link channel access with an STR AP MLD, NSTR
//! non-AP MLDs and legacy stations, all saturated.
//!
//! Both links share one slot grid of `t_empty`. A contention slot on an idle
//! link lets stations whose counter is zero start; everyone else with a
//! nonzero counter decrements. A transmission of length `T` occupies
//! `ceil(T / t_empty)` grid slots starting at its contention slot, but each
//! link's clock is charged the exact `T`, so per-link time is not distorted
//! by the rounding.
//!
//! Randomness comes from ChaCha8 seeded with the run seed, one stream per
//! station and link: stream `2 s + l`, where station `s = 0` is the AP,
//! `1..=n_mld` are the non-AP MLDs and the legacy stations follow link by
//! link (`s = 1 + n_mld + link * n_sld + i`, always with `l = 0`). The AP's
//! destination draws use station `1 + n_mld + 2 n_sld`. A station draws a
//! counter when created and after every transmission or restart.

mod trace;

pub use trace::{
    trace_export, write_stats_csv, write_trace_csv, TraceEvent, TraceRow, STATS_HEADER,
    TRACE_HEADER,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{BackoffParams, Nanos, ScenarioConfig};
use crate::report::{RunMeta, Source, ThroughputReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApMode {
    /// Two-link AP with the restart and end-time alignment rules.
    #[default]
    Mld,
    /// Plain DCF on each link, frames addressed to legacy stations only.
    Legacy,
    /// No AP traffic.
    Disabled,
}

/// Which AP frames are subject to the restart-on-busy rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApRestartScope {
    #[default]
    AllFrames,
    /// Only frames addressed to non-AP MLDs; legacy-bound frames use plain
    /// DCF, as in the analytical AP chain.
    MldFrames,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decrement {
    /// Counters also decrement in a contention slot where others start.
    #[default]
    EveryContentionSlot,
    /// Counters freeze in any slot where a transmission starts.
    StrictFreeze,
}

/// When a non-AP MLD link waiting at zero gives up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaitRule {
    /// Any busyness on either own link.
    #[default]
    Conservative,
    /// Busyness caused only by the AP transmitting to this MLD is ignored.
    Permissive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub seed: u64,
    pub duration_s: f64,
    pub ap_mode: ApMode,
    pub ap_restart: ApRestartScope,
    pub decrement: Decrement,
    pub wait_rule: WaitRule,
    /// Maximum number of per-slot trace rows kept.
    pub trace_limit: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            seed: 1,
            duration_s: 5.0,
            ap_mode: ApMode::Mld,
            ap_restart: ApRestartScope::AllFrames,
            decrement: Decrement::EveryContentionSlot,
            wait_rule: WaitRule::Conservative,
            trace_limit: 0,
        }
    }
}

impl SimOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_duration(mut self, duration_s: f64) -> Self {
        self.duration_s = duration_s;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceKind {
    Ap,
    Mld,
    Sld,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceStats {
    pub kind: DeviceKind,
    /// Index within its kind (legacy stations are numbered per link).
    pub index: usize,
    pub link: usize,
    pub attempts: u64,
    pub successes: u64,
    pub collisions: u64,
    /// AP only: successful frames to non-AP MLDs and to legacy stations.
    pub dl_to_mld: u64,
    pub dl_to_sld: u64,
    /// Backoff restarts because the sibling link was busy (AP) or a wait at
    /// zero was broken (non-AP MLD).
    pub busy_restarts: u64,
    /// Non-AP MLD only: waits at zero that ended in a restart.
    pub waits_broken: u64,
}

impl DeviceStats {
    fn new(kind: DeviceKind, index: usize, link: usize) -> Self {
        DeviceStats {
            kind,
            index,
            link,
            attempts: 0,
            successes: 0,
            collisions: 0,
            dl_to_mld: 0,
            dl_to_sld: 0,
            busy_restarts: 0,
            waits_broken: 0,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            DeviceKind::Ap => "ap".into(),
            DeviceKind::Mld => format!("mld{}", self.index),
            DeviceKind::Sld => format!("sld{}", self.index),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LinkStats {
    /// Exact virtual time of this link.
    pub elapsed_ns: u64,
    pub busy_ns: u64,
    pub idle_ns: u64,
    pub contention_slots: u64,
    pub transmissions: u64,
    pub successes: u64,
    pub collisions: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub seed: u64,
    pub duration_s: f64,
    pub grid_slots: u64,
    pub devices: Vec<DeviceStats>,
    pub links: [LinkStats; 2],
    /// Non-AP MLD transmissions whose two links differ in start or data end,
    /// or that started while one of its links was busy.
    pub nstr_violations: u64,
    /// AP transmissions to one non-AP MLD on both links whose data ends differ.
    pub alignment_violations: u64,
    /// AP frames padded for end-time alignment.
    pub dl_alignments: u64,
    pub trace: Vec<TraceRow>,
    pub trace_truncated: bool,
}

impl SimStats {
    /// Collision ratio over all attempts of one device kind.
    pub fn collision_ratio(&self, kind: DeviceKind) -> f64 {
        let (mut a, mut c) = (0u64, 0u64);
        for d in self.devices.iter().filter(|d| d.kind == kind) {
            a += d.attempts;
            c += d.collisions;
        }
        if a == 0 {
            0.0
        } else {
            c as f64 / a as f64
        }
    }

    pub fn successes(&self, kind: DeviceKind) -> u64 {
        self.devices
            .iter()
            .filter(|d| d.kind == kind)
            .map(|d| d.successes)
            .sum()
    }

    pub fn elapsed_s(&self) -> f64 {
        let l = &self.links;
        (l[0].elapsed_ns.max(l[1].elapsed_ns)) as f64 * 1e-9
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dest {
    Mld(usize),
    Sld(usize),
}

#[derive(Debug)]
struct Counter {
    stage: u32,
    k: u32,
    rng: ChaCha8Rng,
}

impl Counter {
    fn new(seed: u64, stream: u64, backoff: &BackoffParams) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut c = Counter {
            stage: 0,
            k: 0,
            rng,
        };
        c.k = c.draw(backoff);
        c
    }

    fn draw(&mut self, backoff: &BackoffParams) -> u32 {
        self.rng.random_range(0..backoff.window(self.stage))
    }

    fn redraw(&mut self, backoff: &BackoffParams) {
        self.k = self.draw(backoff);
    }

    fn success(&mut self, backoff: &BackoffParams) {
        self.stage = 0;
        self.redraw(backoff);
    }

    fn collision(&mut self, backoff: &BackoffParams) {
        self.stage = (self.stage + 1).min(backoff.m);
        self.redraw(backoff);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Who {
    Ap,
    Mld(usize),
    Sld(usize),
}

#[derive(Debug, Clone)]
struct Tx {
    start: u64,
    data_end_ns: u64,
    /// Destination of the AP frame if the AP is among the transmitters.
    ap_dest: Option<Dest>,
    who: Vec<Who>,
}

#[derive(Debug, Default)]
struct Link {
    busy_until: u64,
    tx: Option<Tx>,
    stats: LinkStats,
}

impl Link {
    fn idle(&self, t: u64) -> bool {
        t >= self.busy_until
    }
}

struct Timing {
    slot: u64,
    data: u64,
    success: u64,
    collision: u64,
}

impl Timing {
    fn grid_slots(&self, dur: u64) -> u64 {
        dur.div_ceil(self.slot).max(1)
    }
}

struct Engine<'a> {
    opts: &'a SimOptions,
    gamma: f64,
    mld_backoff: BackoffParams,
    sld_backoff: BackoffParams,
    timing: Timing,
    links: [Link; 2],
    ap: Option<[Counter; 2]>,
    ap_dest: [Dest; 2],
    ap_rng: [ChaCha8Rng; 2],
    mlds: Vec<[Counter; 2]>,
    slds: [Vec<Counter>; 2],
    stats: SimStats,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a ScenarioConfig, opts: &'a SimOptions) -> Result<Self> {
        let d = cfg.durations()?;
        let timing = Timing {
            slot: Nanos::from_us(d.t_empty).0,
            data: Nanos::from_us(d.t_data).0,
            success: Nanos::from_us(d.t_success).0,
            collision: Nanos::from_us(d.t_collision).0,
        };
        if timing.slot == 0 {
            return Err(Error::invalid("t_empty rounds to zero nanoseconds"));
        }
        let mld_backoff = cfg.backoff;
        let sld_backoff = cfg.backoff.legacy();
        let seed = opts.seed;
        let (nm, ns) = (cfg.n_mld as usize, cfg.n_sld as usize);
        // Stream 2 * station + link; station 0 is the AP, then MLDs, then
        // legacy stations link by link.
        let stream = |station: usize, link: usize| (2 * station + link) as u64;
        let has_ap = match opts.ap_mode {
            ApMode::Disabled => false,
            ApMode::Mld => nm + ns > 0,
            ApMode::Legacy => true,
        };
        let ap = has_ap.then(|| [0, 1].map(|l| Counter::new(seed, stream(0, l), &mld_backoff)));
        // Destination draws use their own streams after all station streams.
        let dest_base = 1 + nm + 2 * ns;
        let ap_rng = [0, 1].map(|l| stream_rng(seed, stream(dest_base, l)));
        let mlds = (0..nm)
            .map(|j| [0, 1].map(|l| Counter::new(seed, stream(1 + j, l), &mld_backoff)))
            .collect();
        let slds = [0, 1].map(|l| {
            (0..ns)
                .map(|i| Counter::new(seed, stream(1 + nm + l * ns + i, 0), &sld_backoff))
                .collect()
        });

        let mut devices = Vec::new();
        if has_ap {
            for l in 0..2 {
                devices.push(DeviceStats::new(DeviceKind::Ap, 0, l));
            }
        }
        for j in 0..nm {
            for l in 0..2 {
                devices.push(DeviceStats::new(DeviceKind::Mld, j, l));
            }
        }
        for l in 0..2 {
            for i in 0..ns {
                devices.push(DeviceStats::new(DeviceKind::Sld, i, l));
            }
        }

        let mut engine = Engine {
            opts,
            gamma: cfg.gamma(),
            mld_backoff,
            sld_backoff,
            timing,
            links: Default::default(),
            ap,
            ap_dest: [Dest::Sld(0); 2],
            ap_rng,
            mlds,
            slds,
            stats: SimStats {
                seed,
                duration_s: opts.duration_s,
                grid_slots: 0,
                devices,
                links: Default::default(),
                nstr_violations: 0,
                alignment_violations: 0,
                dl_alignments: 0,
                trace: Vec::new(),
                trace_truncated: false,
            },
        };
        if engine.ap.is_some() {
            for l in 0..2 {
                engine.ap_dest[l] = engine.draw_dest(l);
            }
        }
        Ok(engine)
    }

    fn dev_index(&self, who: Who, link: usize) -> usize {
        let ap = if self.ap.is_some() { 2 } else { 0 };
        let nm = self.mlds.len();
        match who {
            Who::Ap => link,
            Who::Mld(j) => ap + 2 * j + link,
            Who::Sld(i) => ap + 2 * nm + link * self.slds[0].len() + i,
        }
    }

    fn dev(&mut self, who: Who, link: usize) -> &mut DeviceStats {
        let i = self.dev_index(who, link);
        &mut self.stats.devices[i]
    }

    fn draw_dest(&mut self, link: usize) -> Dest {
        let (nm, ns) = (self.mlds.len(), self.slds[0].len());
        let rng = &mut self.ap_rng[link];
        if self.opts.ap_mode == ApMode::Legacy {
            return Dest::Sld(rng.random_range(0..ns.max(1)));
        }
        let to_mld = nm > 0 && (ns == 0 || rng.random::<f64>() < self.gamma);
        if to_mld {
            Dest::Mld(rng.random_range(0..nm))
        } else {
            Dest::Sld(rng.random_range(0..ns))
        }
    }

    /// Whether link `l` is busy at `t` with something other than the AP
    /// transmitting to MLD `j`.
    fn busy_for_mld(&self, l: usize, t: u64, j: usize) -> bool {
        let link = &self.links[l];
        if link.idle(t) {
            return false;
        }
        if self.opts.wait_rule == WaitRule::Permissive {
            if let Some(tx) = &link.tx {
                if tx.who == [Who::Ap] && tx.ap_dest == Some(Dest::Mld(j)) {
                    return false;
                }
            }
        }
        true
    }

    fn run(mut self) -> SimStats {
        let horizon = ((self.opts.duration_s * 1e9) / self.timing.slot as f64).ceil() as u64;
        let mut t = 0u64;
        while t < horizon {
            let idle = [self.links[0].idle(t), self.links[1].idle(t)];
            self.break_waits(t);
            if !idle[0] && !idle[1] {
                t = self.links[0]
                    .busy_until
                    .min(self.links[1].busy_until)
                    .min(horizon);
                continue;
            }
            self.contention_slot(t, idle);
            t += 1;
        }
        self.stats.grid_slots = horizon;
        for (l, link) in self.links.iter().enumerate() {
            let mut s = link.stats;
            s.idle_ns = s.elapsed_ns - s.busy_ns;
            self.stats.links[l] = s;
        }
        self.stats
    }

    /// Non-AP MLD links at zero restart when either own link is busy.
    fn break_waits(&mut self, t: u64) {
        for j in 0..self.mlds.len() {
            let busy = self.busy_for_mld(0, t, j) || self.busy_for_mld(1, t, j);
            if !busy {
                continue;
            }
            for l in 0..2 {
                if self.mlds[j][l].k == 0 {
                    let bo = self.mld_backoff;
                    self.mlds[j][l].redraw(&bo);
                    let d = self.dev(Who::Mld(j), l);
                    d.busy_restarts += 1;
                    d.waits_broken += 1;
                }
            }
        }
    }

    fn contention_slot(&mut self, t: u64, idle: [bool; 2]) {
        let mut starters: [Vec<Who>; 2] = [Vec::new(), Vec::new()];
        let mut restarted: [Vec<Who>; 2] = [Vec::new(), Vec::new()];

        for l in 0..2 {
            if !idle[l] {
                continue;
            }
            for (i, c) in self.slds[l].iter().enumerate() {
                if c.k == 0 {
                    starters[l].push(Who::Sld(i));
                }
            }
        }

        // AP links; both decide on the state left by earlier slots.
        let mut pad: [Option<u64>; 2] = [None, None];
        if self.ap.is_some() {
            for l in 0..2 {
                if !idle[l] || self.ap.as_ref().unwrap()[l].k != 0 {
                    continue;
                }
                let o = 1 - l;
                let dest = self.ap_dest[l];
                let restart_applies = self.opts.ap_mode == ApMode::Mld
                    && (matches!(dest, Dest::Mld(_))
                        || self.opts.ap_restart == ApRestartScope::AllFrames);
                let other = &self.links[o];
                if !restart_applies || other.idle(t) {
                    starters[l].push(Who::Ap);
                    continue;
                }
                let ap_data = other
                    .tx
                    .as_ref()
                    .filter(|tx| tx.ap_dest.is_some() && t * self.timing.slot < tx.data_end_ns);
                match ap_data {
                    Some(tx) => {
                        if tx.ap_dest == Some(dest) {
                            pad[o] = Some(t - tx.start);
                        }
                        starters[l].push(Who::Ap);
                    }
                    None => {
                        let bo = self.mld_backoff;
                        self.ap.as_mut().unwrap()[l].redraw(&bo);
                        self.dev(Who::Ap, l).busy_restarts += 1;
                        restarted[l].push(Who::Ap);
                    }
                }
            }
        }

        // Non-AP MLDs.
        for j in 0..self.mlds.len() {
            let zero = [self.mlds[j][0].k == 0, self.mlds[j][1].k == 0];
            if zero[0] && zero[1] && idle[0] && idle[1] {
                starters[0].push(Who::Mld(j));
                starters[1].push(Who::Mld(j));
                continue;
            }
            for l in 0..2 {
                if zero[l] && idle[l] && !idle[1 - l] {
                    let bo = self.mld_backoff;
                    self.mlds[j][l].redraw(&bo);
                    self.dev(Who::Mld(j), l).busy_restarts += 1;
                    restarted[l].push(Who::Mld(j));
                }
            }
        }

        for (l, p) in pad.iter().enumerate() {
            if let Some(slots) = p {
                self.pad_link(l, *slots);
            }
        }
        for l in 0..2 {
            if !idle[l] {
                continue;
            }
            if starters[l].is_empty() {
                let link = &mut self.links[l];
                link.stats.elapsed_ns += self.timing.slot;
                link.stats.contention_slots += 1;
                self.record(t, l, TraceEvent::Idle, &[]);
            } else {
                let who = std::mem::take(&mut starters[l]);
                self.start(t, l, who.clone());
                starters[l] = who;
            }
        }
        self.check_pairs(t, &starters);

        for l in 0..2 {
            if !idle[l] {
                continue;
            }
            if self.opts.decrement == Decrement::StrictFreeze && !starters[l].is_empty() {
                continue;
            }
            let skip = |w: Who| starters[l].contains(&w) || restarted[l].contains(&w);
            for (i, c) in self.slds[l].iter_mut().enumerate() {
                if c.k > 0 && !skip(Who::Sld(i)) {
                    c.k -= 1;
                }
            }
            if let Some(ap) = self.ap.as_mut() {
                if ap[l].k > 0 && !skip(Who::Ap) {
                    ap[l].k -= 1;
                }
            }
            for (j, m) in self.mlds.iter_mut().enumerate() {
                if m[l].k > 0 && !skip(Who::Mld(j)) {
                    m[l].k -= 1;
                }
            }
        }
    }

    fn pad_link(&mut self, l: usize, slots: u64) {
        let ns = slots * self.timing.slot;
        let link = &mut self.links[l];
        link.busy_until += slots;
        link.stats.busy_ns += ns;
        link.stats.elapsed_ns += ns;
        if let Some(tx) = link.tx.as_mut() {
            tx.data_end_ns += ns;
        }
        self.stats.dl_alignments += 1;
    }

    fn start(&mut self, t: u64, l: usize, who: Vec<Who>) {
        let success = who.len() == 1;
        let dur = if success {
            self.timing.success
        } else {
            self.timing.collision
        };
        let ap_dest = who.contains(&Who::Ap).then_some(self.ap_dest[l]);
        let start_ns = t * self.timing.slot;
        {
            let link = &mut self.links[l];
            link.busy_until = t + self.timing.grid_slots(dur);
            link.stats.elapsed_ns += dur;
            link.stats.busy_ns += dur;
            link.stats.transmissions += 1;
            if success {
                link.stats.successes += 1;
            } else {
                link.stats.collisions += 1;
            }
        }
        self.record(
            t,
            l,
            if success {
                TraceEvent::Success
            } else {
                TraceEvent::Collision
            },
            &who,
        );

        for &w in &who {
            let dest = self.ap_dest[l];
            let d = self.dev(w, l);
            d.attempts += 1;
            if success {
                d.successes += 1;
                if w == Who::Ap {
                    match dest {
                        Dest::Mld(_) => d.dl_to_mld += 1,
                        Dest::Sld(_) => d.dl_to_sld += 1,
                    }
                }
            } else {
                d.collisions += 1;
            }
            let (mb, sb) = (self.mld_backoff, self.sld_backoff);
            let counter = match w {
                Who::Ap => &mut self.ap.as_mut().expect("AP present")[l],
                Who::Mld(j) => &mut self.mlds[j][l],
                Who::Sld(i) => &mut self.slds[l][i],
            };
            let bo = if matches!(w, Who::Sld(_)) { sb } else { mb };
            if success {
                counter.success(&bo);
            } else {
                counter.collision(&bo);
            }
            if w == Who::Ap && success {
                self.ap_dest[l] = self.draw_dest(l);
            }
        }

        // A same-destination frame already on the other link was padded to end
        // with this one.
        if let (Some(Dest::Mld(j)), Some(other)) = (ap_dest, self.links[1 - l].tx.as_ref()) {
            let other_live = !self.links[1 - l].idle(t) && other.ap_dest == Some(Dest::Mld(j));
            if other_live && other.start != t && other.data_end_ns != start_ns + self.timing.data {
                self.stats.alignment_violations += 1;
            }
        }
        self.links[l].tx = Some(Tx {
            start: t,
            data_end_ns: start_ns + self.timing.data,
            ap_dest,
            who,
        });
    }

    /// Non-AP MLD transmissions must start and end together on both links.
    fn check_pairs(&mut self, t: u64, starters: &[Vec<Who>; 2]) {
        for j in 0..self.mlds.len() {
            let on = [
                starters[0].contains(&Who::Mld(j)),
                starters[1].contains(&Who::Mld(j)),
            ];
            if !on[0] && !on[1] {
                continue;
            }
            let ok = on[0]
                && on[1]
                && match (&self.links[0].tx, &self.links[1].tx) {
                    (Some(a), Some(b)) => {
                        a.start == t && b.start == t && a.data_end_ns == b.data_end_ns
                    }
                    _ => false,
                };
            if !ok {
                self.stats.nstr_violations += 1;
            }
        }
    }

    fn record(&mut self, t: u64, l: usize, event: TraceEvent, who: &[Who]) {
        if self.stats.trace.len() >= self.opts.trace_limit {
            if self.opts.trace_limit > 0 {
                self.stats.trace_truncated = true;
            }
            return;
        }
        let stations = who
            .iter()
            .map(|w| match w {
                Who::Ap => "ap".to_string(),
                Who::Mld(j) => format!("mld{j}"),
                Who::Sld(i) => format!("sld{i}"),
            })
            .collect::<Vec<_>>()
            .join(";");
        self.stats.trace.push(TraceRow {
            slot: t,
            link: l,
            time_ns: t * self.timing.slot,
            event,
            stations,
        });
    }
}

fn report(cfg: &ScenarioConfig, opts: &SimOptions, stats: &SimStats) -> ThroughputReport {
    let bits = cfg.phy.payload_bits();
    // Mb/s = bits per microsecond.
    let rate = |kind: DeviceKind, pick: fn(&DeviceStats) -> u64| -> f64 {
        stats
            .devices
            .iter()
            .filter(|d| d.kind == kind)
            .map(|d| {
                let us = stats.links[d.link].elapsed_ns as f64 / 1000.0;
                if us > 0.0 {
                    pick(d) as f64 * bits / us
                } else {
                    0.0
                }
            })
            .sum()
    };
    let per = |total: f64, n: u32| {
        if n == 0 {
            0.0
        } else {
            total / (2.0 * f64::from(n))
        }
    };
    ThroughputReport {
        s_u_sld: per(rate(DeviceKind::Sld, |d| d.successes), cfg.n_sld),
        s_u_mld: per(rate(DeviceKind::Mld, |d| d.successes), cfg.n_mld),
        s_d_sld: rate(DeviceKind::Ap, |d| d.dl_to_sld) / 2.0,
        s_d_mld: rate(DeviceKind::Ap, |d| d.dl_to_mld) / 2.0,
        scenario: cfg.clone(),
        source: Source::Simulated,
        meta: RunMeta {
            seed: Some(opts.seed),
            duration_s: Some(opts.duration_s),
            ..RunMeta::default()
        },
    }
}

pub fn run_sim(cfg: &ScenarioConfig, opts: &SimOptions) -> Result<(SimStats, ThroughputReport)> {
    cfg.validate()?;
    if !(opts.duration_s.is_finite() && opts.duration_s >= 0.0) {
        return Err(Error::invalid(format!(
            "duration must be a nonnegative number of seconds, got {}",
            opts.duration_s
        )));
    }
    let stats = Engine::new(cfg, opts)?.run();
    let report = report(cfg, opts, &stats);
    Ok((stats, report))
}
