//! Cross-device quantities: collision probabilities, per-slot events and
//! expected slot lengths, sibling-link busy probabilities and the alignment
//! probability `Y`.
//!
//! Case 1 is a slot where the AP's head-of-line frame targets a legacy
//! station, Case 2 one where it targets a non-AP MLD.

use log::debug;

use crate::error::{Error, Result};
use crate::nonap_chain::NonApChainDistribution;
use crate::params::{BackoffParams, SlotDurations};

/// Which form of the coupling and throughput expressions to use.
///
/// `Corrected` fixes apparent index slips in the literal forms (which AP
/// transmit probability and which slot length apply) and removes the
/// device's own trailing empty slot from the busy share.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reading {
    #[default]
    Corrected,
    /// Keep the literal form, without the correction.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TauSet {
    pub tau_ap_sld: f64,
    pub tau_ap_mld: f64,
    pub tau_mld_1: f64,
    pub tau_mld_2: f64,
    pub tau_sld_1: f64,
    pub tau_sld_2: f64,
}

impl TauSet {
    pub fn uniform(t: f64) -> Self {
        TauSet {
            tau_ap_sld: t,
            tau_ap_mld: t,
            tau_mld_1: t,
            tau_mld_2: t,
            tau_sld_1: t,
            tau_sld_2: t,
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.tau_ap_sld,
            self.tau_ap_mld,
            self.tau_mld_1,
            self.tau_mld_2,
            self.tau_sld_1,
            self.tau_sld_2,
        ]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        TauSet {
            tau_ap_sld: a[0],
            tau_ap_mld: a[1],
            tau_mld_1: a[2],
            tau_mld_2: a[3],
            tau_sld_1: a[4],
            tau_sld_2: a[5],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PSet {
    pub p_ap_sld: f64,
    pub p_ap_mld: f64,
    pub p_mld_1: f64,
    pub p_mld_2: f64,
    pub p_sld_1: f64,
    pub p_sld_2: f64,
}

impl PSet {
    pub fn uniform(p: f64) -> Self {
        PSet {
            p_ap_sld: p,
            p_ap_mld: p,
            p_mld_1: p,
            p_mld_2: p,
            p_sld_1: p,
            p_sld_2: p,
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.p_ap_sld,
            self.p_ap_mld,
            self.p_mld_1,
            self.p_mld_2,
            self.p_sld_1,
            self.p_sld_2,
        ]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        PSet {
            p_ap_sld: a[0],
            p_ap_mld: a[1],
            p_mld_1: a[2],
            p_mld_2: a[3],
            p_sld_1: a[4],
            p_sld_2: a[5],
        }
    }
}

/// Event probabilities of one case. In Case 1 `tau1b` is zero and `tau1` is
/// the AP's lone transmission; in Case 2 they are the single-destination and
/// same-destination dual-link AP transmissions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseEvents {
    pub p_idle: f64,
    pub tau1: f64,
    pub tau1b: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub p_c1: f64,
    pub p_c2: f64,
    /// Expected slot length, µs.
    pub phi: f64,
}

impl CaseEvents {
    pub fn successes(&self) -> f64 {
        self.tau1 + self.tau1b + self.tau2 + self.tau3
    }

    pub fn collisions(&self) -> f64 {
        self.p_c1 + self.p_c2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotEventProfile {
    pub case1: CaseEvents,
    pub case2: CaseEvents,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BusyAlign {
    pub x_ap: f64,
    pub x_mld: f64,
    pub y_case1: f64,
    pub y_case2: f64,
}

/// `(1 - t)^n` with the exponent saturating at zero.
fn survive(t: f64, n: u32) -> f64 {
    (1.0 - t).powi(n as i32)
}

fn survive_minus_one(t: f64, n: u32) -> f64 {
    survive(t, n.saturating_sub(1))
}

pub fn collision_probs(taus: &TauSet, n_mld: u32, n_sld: u32) -> PSet {
    let t = taus;
    PSet {
        p_ap_sld: 1.0 - survive(t.tau_sld_1, n_sld) * survive(t.tau_mld_1, n_mld),
        p_mld_1: 1.0
            - (1.0 - t.tau_ap_sld)
                * survive(t.tau_sld_1, n_sld)
                * survive_minus_one(t.tau_mld_1, n_mld),
        p_sld_1: 1.0
            - (1.0 - t.tau_ap_sld)
                * survive_minus_one(t.tau_sld_1, n_sld)
                * survive(t.tau_mld_1, n_mld),
        p_ap_mld: 1.0 - survive(t.tau_sld_2, n_sld) * survive(t.tau_mld_2, n_mld),
        p_mld_2: 1.0
            - (1.0 - t.tau_ap_mld)
                * survive(t.tau_sld_2, n_sld)
                * survive_minus_one(t.tau_mld_2, n_mld),
        p_sld_2: 1.0
            - (1.0 - t.tau_ap_mld)
                * survive_minus_one(t.tau_sld_2, n_sld)
                * survive(t.tau_mld_2, n_mld),
    }
}

fn phi(ev: &CaseEvents, d: &SlotDurations) -> f64 {
    ev.p_idle * d.t_empty
        + ev.successes() * (d.t_success + d.t_empty)
        + ev.collisions() * (d.t_collision + d.t_empty)
}

/// Event profile without the residual sign check. The fixed-point iteration
/// passes through points where the Case 2 residual is negative.
pub(crate) fn event_profile_lenient(
    taus: &TauSet,
    ps: &PSet,
    n_mld: u32,
    n_sld: u32,
    durations: &SlotDurations,
    reading: Reading,
) -> SlotEventProfile {
    let (nm, ns) = (f64::from(n_mld), f64::from(n_sld));

    let p_idle =
        (1.0 - taus.tau_ap_sld) * survive(taus.tau_sld_1, n_sld) * survive(taus.tau_mld_1, n_mld);
    let ap = match reading {
        Reading::Corrected => taus.tau_ap_sld,
        Reading::Literal => taus.tau_ap_mld,
    };
    let tau1 = ap * (1.0 - ps.p_ap_sld);
    let tau2 = ns * taus.tau_sld_1 * (1.0 - ps.p_sld_1);
    let tau3 = nm * taus.tau_mld_1 * (1.0 - ps.p_mld_1);
    let p_c1 = taus.tau_ap_sld * ps.p_ap_sld;
    let mut case1 = CaseEvents {
        p_idle,
        tau1,
        tau1b: 0.0,
        tau2,
        tau3,
        p_c1,
        p_c2: 1.0 - p_idle - (tau1 + tau2 + tau3) - p_c1,
        phi: 0.0,
    };
    case1.phi = phi(&case1, durations);

    let t_ap = taus.tau_ap_mld;
    let same_dest = if n_mld == 0 { 0.0 } else { 1.0 / nm };
    let p_idle = (1.0 - t_ap) * survive(taus.tau_sld_2, n_sld) * survive(taus.tau_mld_2, n_mld);
    let tau1a = (1.0 - same_dest * t_ap) * t_ap;
    let tau1b = same_dest * t_ap * t_ap;
    let tau2 = ns * taus.tau_sld_2 * (1.0 - ps.p_sld_2);
    let tau3 = nm * taus.tau_mld_2 * (1.0 - ps.p_mld_2);
    let p_c1 = t_ap * ps.p_ap_mld;
    let mut case2 = CaseEvents {
        p_idle,
        tau1: tau1a,
        tau1b,
        tau2,
        tau3,
        p_c1,
        p_c2: 1.0 - p_idle - (tau1a + tau1b + tau2 + tau3) - p_c1,
        phi: 0.0,
    };
    case2.phi = phi(&case2, durations);

    SlotEventProfile { case1, case2 }
}

pub const RESIDUAL_TOL: f64 = 1e-9;

pub fn event_profile(
    taus: &TauSet,
    ps: &PSet,
    n_mld: u32,
    n_sld: u32,
    durations: &SlotDurations,
) -> Result<SlotEventProfile> {
    event_profile_with(taus, ps, n_mld, n_sld, durations, Reading::Corrected)
}

pub fn event_profile_with(
    taus: &TauSet,
    ps: &PSet,
    n_mld: u32,
    n_sld: u32,
    durations: &SlotDurations,
    reading: Reading,
) -> Result<SlotEventProfile> {
    let prof = event_profile_lenient(taus, ps, n_mld, n_sld, durations, reading);
    for (name, ev) in [("case 1", &prof.case1), ("case 2", &prof.case2)] {
        if ev.p_c2 < -RESIDUAL_TOL {
            return Err(Error::Inconsistent(format!(
                "{name}: residual collision probability {:.3e} is negative",
                ev.p_c2
            )));
        }
    }
    Ok(prof)
}

/// Fraction of a slot a given device sees the channel busy because of
/// others, with a tolerance for float cancellation.
fn busy_share(
    label: &str,
    ev: &CaseEvents,
    own_tau: f64,
    own_p: f64,
    d: &SlotDurations,
    reading: Reading,
    strict: bool,
) -> Result<f64> {
    // The trailing empty slot of the device's own transmissions is not busy
    // time caused by others.
    let own_tail = match reading {
        Reading::Corrected => d.t_empty,
        Reading::Literal => 0.0,
    };
    let busy = ev.phi
        - ev.p_idle * d.t_empty
        - own_tau * (1.0 - own_p) * (d.t_success + own_tail)
        - own_tau * own_p * (d.t_collision + own_tail);
    if busy < -RESIDUAL_TOL * ev.phi && strict {
        return Err(Error::Inconsistent(format!(
            "{label}: busy time {busy:.3e} µs is negative"
        )));
    }
    let share = busy / ev.phi;
    if !(0.0..=1.0).contains(&share) {
        debug!("{label}: busy share {share:.3e} clamped to [0, 1]");
    }
    Ok(share.clamp(0.0, 1.0))
}

/// `(x_ap, x_mld)`.
///
/// The non-AP MLD collision term splits into collisions with the AP and
/// collisions without it; together they are `tau_mld * p_mld` whenever the
/// probabilities come from [`collision_probs`].
pub fn busy_probs(
    profile: &SlotEventProfile,
    taus: &TauSet,
    ps: &PSet,
    gamma: f64,
    durations: &SlotDurations,
    n_mld: u32,
    n_sld: u32,
) -> Result<(f64, f64)> {
    busy_probs_with(
        profile,
        taus,
        ps,
        gamma,
        durations,
        n_mld,
        n_sld,
        Reading::Corrected,
        true,
    )
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn busy_probs_with(
    profile: &SlotEventProfile,
    taus: &TauSet,
    ps: &PSet,
    gamma: f64,
    d: &SlotDurations,
    n_mld: u32,
    n_sld: u32,
    reading: Reading,
    strict: bool,
) -> Result<(f64, f64)> {
    for ev in [&profile.case1, &profile.case2] {
        if ev.phi.is_nan() || ev.phi <= 0.0 {
            return Err(Error::Inconsistent(format!(
                "slot length {} is not positive",
                ev.phi
            )));
        }
    }
    let ap1 = busy_share(
        "AP case 1",
        &profile.case1,
        taus.tau_ap_sld,
        ps.p_ap_sld,
        d,
        reading,
        strict,
    )?;
    let ap2 = busy_share(
        "AP case 2",
        &profile.case2,
        taus.tau_ap_mld,
        ps.p_ap_mld,
        d,
        reading,
        strict,
    )?;
    let x_ap = (1.0 - gamma) * ap1 + gamma * ap2;

    // Collision probability of one non-AP MLD, split by event.
    let mld_p = |t_ap: f64, t_mld: f64, t_sld: f64| {
        t_ap + (1.0 - t_ap) * (1.0 - survive_minus_one(t_mld, n_mld) * survive(t_sld, n_sld))
    };
    let x_mld = if n_mld == 0 {
        0.0
    } else {
        let p1 = mld_p(taus.tau_ap_sld, taus.tau_mld_1, taus.tau_sld_1);
        let p2 = mld_p(taus.tau_ap_mld, taus.tau_mld_2, taus.tau_sld_2);
        let m1 = busy_share_mld(
            "MLD case 1",
            &profile.case1,
            taus.tau_mld_1,
            ps.p_mld_1,
            p1,
            d,
            reading,
            strict,
        )?;
        let m2 = busy_share_mld(
            "MLD case 2",
            &profile.case2,
            taus.tau_mld_2,
            ps.p_mld_2,
            p2,
            d,
            reading,
            strict,
        )?;
        (1.0 - gamma) * m1 + gamma * m2
    };
    Ok((x_ap, x_mld))
}

#[allow(clippy::too_many_arguments)]
fn busy_share_mld(
    label: &str,
    ev: &CaseEvents,
    tau: f64,
    p_success_side: f64,
    p_collision_side: f64,
    d: &SlotDurations,
    reading: Reading,
    strict: bool,
) -> Result<f64> {
    let own_tail = match reading {
        Reading::Corrected => d.t_empty,
        Reading::Literal => 0.0,
    };
    let busy = ev.phi
        - ev.p_idle * d.t_empty
        - tau * (1.0 - p_success_side) * (d.t_success + own_tail)
        - tau * p_collision_side * (d.t_collision + own_tail);
    if busy < -RESIDUAL_TOL * ev.phi && strict {
        return Err(Error::Inconsistent(format!(
            "{label}: busy time {busy:.3e} µs is negative"
        )));
    }
    Ok((busy / ev.phi).clamp(0.0, 1.0))
}

/// `(y_case1, y_case2)`: probability that a link waiting at zero survives
/// until its sibling's counter reaches zero.
pub fn alignment_probs(
    dist_case1: &NonApChainDistribution,
    dist_case2: &NonApChainDistribution,
    p_idle_1: f64,
    p_idle_2: f64,
    gamma: f64,
    backoff: &BackoffParams,
) -> Result<(f64, f64)> {
    let y1 = alignment_sum(
        &dist_case1.b_dprime,
        p_idle_1,
        dist_case1,
        dist_case2,
        p_idle_1,
        p_idle_2,
        gamma,
        backoff,
    );
    let y2 = alignment_sum(
        &dist_case2.b_dprime,
        p_idle_2,
        dist_case1,
        dist_case2,
        p_idle_1,
        p_idle_2,
        gamma,
        backoff,
    );
    for (name, y) in [("Y case 1", y1), ("Y case 2", y2)] {
        if !(0.0..=1.0).contains(&y) {
            return Err(Error::Inconsistent(format!("{name} = {y} outside [0, 1]")));
        }
    }
    Ok((y1, y2))
}

#[allow(clippy::too_many_arguments)]
fn alignment_sum(
    wait: &[f64],
    p_outer: f64,
    d1: &NonApChainDistribution,
    d2: &NonApChainDistribution,
    p1: f64,
    p2: f64,
    gamma: f64,
    bo: &BackoffParams,
) -> f64 {
    let m = bo.m as usize;
    // Sibling term for counter j, summed over stages i >= from.
    let sibling = |j: usize, from: usize| -> f64 {
        let (a, b) = (p1.powi(j as i32), p2.powi(j as i32));
        (from..=m)
            .map(|i| (1.0 - gamma) * d1.b_at(i, j) * a + gamma * d2.b_at(i, j) * b)
            .sum()
    };
    let w = |i: usize| bo.window(i as u32) as usize;

    let mut y = 0.0;
    let wait_total: f64 = wait.iter().sum();
    for j in 1..w(0) {
        y += wait_total * p_outer.powi(j as i32) * sibling(j, 0);
    }
    for k in 1..=m {
        for (ipp, &b_wait) in wait.iter().enumerate().skip(k) {
            for j in w(ipp - 1)..w(ipp) {
                y += b_wait * p_outer.powi(j as i32) * sibling(j, k);
            }
        }
    }
    y
}
