//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

use mlo_coex::ap_chain::ApChainInputs;
use mlo_coex::nonap_chain::NonApChainInputs;
use mlo_coex::params::{BackoffParams, SlotDurations};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sparse transition lists: `next[s]` holds `(target, probability)`.
pub struct Chain {
    pub next: Vec<Vec<(usize, f64)>>,
}

impl Chain {
    fn new(n: usize) -> Chain {
        Chain {
            next: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, from: usize, to: usize, p: f64) {
        if p != 0.0 {
            self.next[from].push((to, p));
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.next
            .iter()
            .map(|r| r.iter().map(|(_, p)| p).sum())
            .collect()
    }

    /// Lazy power iteration `pi <- (pi + pi P) / 2` from the uniform vector.
    pub fn stationary(&self, tol: f64, max_iters: usize) -> Vec<f64> {
        let n = self.next.len();
        let mut pi = vec![1.0 / n as f64; n];
        let mut out = vec![0.0; n];
        for _ in 0..max_iters {
            out.iter_mut().for_each(|v| *v = 0.0);
            for (s, row) in self.next.iter().enumerate() {
                for &(t, p) in row {
                    out[t] += pi[s] * p;
                }
            }
            let mut diff: f64 = 0.0;
            for (a, b) in pi.iter_mut().zip(&out) {
                let v = 0.5 * (*a + b);
                diff = diff.max((v - *a).abs());
                *a = v;
            }
            if diff < tol {
                break;
            }
        }
        let total: f64 = pi.iter().sum();
        pi.iter().map(|v| v / total).collect()
    }
}

/// State layout of the AP chain: MLO rows, MLO restart states, SLO rows.
pub struct ApLayout {
    pub windows: Vec<usize>,
    mlo: Vec<usize>,
    prime: usize,
    slo: Vec<usize>,
    pub len: usize,
}

impl ApLayout {
    fn new(bo: &BackoffParams) -> ApLayout {
        let windows: Vec<usize> = bo.windows().iter().map(|&w| w as usize).collect();
        let mut off = 0;
        let mut mlo = Vec::new();
        for w in &windows {
            mlo.push(off);
            off += w;
        }
        let prime = off;
        off += windows.len();
        let mut slo = Vec::new();
        for w in &windows {
            slo.push(off);
            off += w;
        }
        ApLayout {
            windows,
            mlo,
            prime,
            slo,
            len: off,
        }
    }

    pub fn mlo(&self, i: usize, k: usize) -> usize {
        self.mlo[i] + k
    }

    pub fn prime(&self, i: usize) -> usize {
        self.prime + i
    }

    pub fn slo(&self, i: usize, k: usize) -> usize {
        self.slo[i] + k
    }
}

/// Transition rules of the AP MLD chain, written directly from the access
/// rules: an MLO counter reaching zero restarts with probability X.
pub fn ap_chain(inp: &ApChainInputs) -> (Chain, ApLayout) {
    let bo = &inp.backoff;
    let lay = ApLayout::new(bo);
    let m = bo.m as usize;
    let x = inp.x_ap;
    let g = inp.gamma;
    let mut c = Chain::new(lay.len);

    // Distribution over targets when a frame enters stage i of either part.
    let mlo_entry = |c: &mut Chain, from: usize, i: usize, mass: f64| {
        let w = lay.windows[i];
        let share = mass / w as f64;
        for k in 1..w {
            c.add(from, lay.mlo(i, k), share);
        }
        c.add(from, lay.mlo(i, 0), share * (1.0 - x));
        c.add(from, lay.prime(i), share * x);
    };
    let slo_entry = |c: &mut Chain, from: usize, i: usize, mass: f64| {
        let w = lay.windows[i];
        for k in 0..w {
            c.add(from, lay.slo(i, k), mass / w as f64);
        }
    };

    for i in 0..=m {
        let w = lay.windows[i];
        let up = (i + 1).min(m);
        for k in 2..w {
            c.add(lay.mlo(i, k), lay.mlo(i, k - 1), 1.0);
            c.add(lay.slo(i, k), lay.slo(i, k - 1), 1.0);
        }
        if w > 1 {
            c.add(lay.mlo(i, 1), lay.mlo(i, 0), 1.0 - x);
            c.add(lay.mlo(i, 1), lay.prime(i), x);
            c.add(lay.slo(i, 1), lay.slo(i, 0), 1.0);
        }
        // Restart: redraw over the same window, zero stays restarted.
        for k in 1..w {
            c.add(lay.prime(i), lay.mlo(i, k), 1.0 / w as f64);
        }
        c.add(lay.prime(i), lay.prime(i), 1.0 / w as f64);

        let (pm, ps) = (inp.p_ap_mld, inp.p_ap_sld);
        let from = lay.mlo(i, 0);
        mlo_entry(&mut c, from, up, pm);
        mlo_entry(&mut c, from, 0, (1.0 - pm) * g);
        slo_entry(&mut c, from, 0, (1.0 - pm) * (1.0 - g));
        let from = lay.slo(i, 0);
        slo_entry(&mut c, from, up, ps);
        mlo_entry(&mut c, from, 0, (1.0 - ps) * g);
        slo_entry(&mut c, from, 0, (1.0 - ps) * (1.0 - g));
    }
    (c, lay)
}

pub struct NonApLayout {
    pub windows: Vec<usize>,
    rows: Vec<usize>,
    prime: usize,
    dprime: usize,
    pub len: usize,
}

impl NonApLayout {
    pub fn b(&self, i: usize, k: usize) -> usize {
        self.rows[i] + k
    }

    pub fn prime(&self, i: usize) -> usize {
        self.prime + i
    }

    pub fn dprime(&self, i: usize) -> usize {
        self.dprime + i
    }
}

/// Transition rules of one non-AP MLD link. A counter reaching zero restarts
/// if the sibling is busy (X), transmits if the sibling also reaches zero
/// (tau), and otherwise waits; a wait survives with probability Y and
/// otherwise redraws like a restart.
pub fn nonap_chain(inp: &NonApChainInputs) -> (Chain, NonApLayout) {
    let bo = &inp.backoff;
    let windows: Vec<usize> = bo.windows().iter().map(|&w| w as usize).collect();
    let m = bo.m as usize;
    let mut off = 0;
    let mut rows = Vec::new();
    for w in &windows {
        rows.push(off);
        off += w;
    }
    let prime = off;
    let dprime = off + windows.len();
    let lay = NonApLayout {
        windows,
        rows,
        prime,
        dprime,
        len: dprime + m + 1,
    };
    let (x, y, t) = (inp.x_mld, inp.y, inp.tau_mld_prev);
    let mut c = Chain::new(lay.len);

    let zero = |c: &mut Chain, from: usize, i: usize, mass: f64| {
        c.add(from, lay.prime(i), mass * x);
        c.add(from, lay.b(i, 0), mass * (1.0 - x) * t);
        c.add(from, lay.dprime(i), mass * (1.0 - x) * (1.0 - t));
    };
    let entry = |c: &mut Chain, from: usize, i: usize, mass: f64| {
        let w = lay.windows[i];
        for k in 1..w {
            c.add(from, lay.b(i, k), mass / w as f64);
        }
        zero(c, from, i, mass / w as f64);
    };
    let redraw = |c: &mut Chain, from: usize, i: usize, mass: f64| {
        let w = lay.windows[i];
        for k in 1..w {
            c.add(from, lay.b(i, k), mass / w as f64);
        }
        c.add(from, lay.prime(i), mass / w as f64);
    };

    for i in 0..=m {
        let w = lay.windows[i];
        for k in 2..w {
            c.add(lay.b(i, k), lay.b(i, k - 1), 1.0);
        }
        if w > 1 {
            zero(&mut c, lay.b(i, 1), i, 1.0);
        }
        redraw(&mut c, lay.prime(i), i, 1.0);
        c.add(lay.dprime(i), lay.b(i, 0), y);
        redraw(&mut c, lay.dprime(i), i, 1.0 - y);
        let p = inp.p_mld;
        entry(&mut c, lay.b(i, 0), (i + 1).min(m), p);
        entry(&mut c, lay.b(i, 0), 0, 1.0 - p);
    }
    (c, lay)
}

/// Legacy DCF transmit probability for collision probability `p`.
pub fn bianchi_tau(p: f64, w: f64, m: u32) -> f64 {
    let mut mean_slots = 0.0;
    let mut reach = 1.0;
    for i in 0..=m {
        let stay = if i < m { reach } else { reach / (1.0 - p) };
        mean_slots += stay * (w * 2f64.powi(i as i32) - 1.0) / 2.0;
        reach *= p;
    }
    // Attempts per frame over slots per frame.
    let attempts = 1.0 / (1.0 - p);
    attempts / (attempts + mean_slots)
}

/// `(tau, p)` of `n` identical saturated DCF stations, by bisection on p.
pub fn bianchi_fixed_point(n: u32, w: f64, m: u32) -> (f64, f64) {
    if n <= 1 {
        return (bianchi_tau(0.0, w, m), 0.0);
    }
    let f = |p: f64| 1.0 - (1.0 - bianchi_tau(p, w, m)).powi(n as i32 - 1) - p;
    let (mut lo, mut hi) = (0.0, 1.0 - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    (bianchi_tau(p, w, m), p)
}

/// Aggregate saturation throughput (Mb/s) of `n` stations with transmit
/// probability `tau`; a transmission slot lasts `t_success` or `t_collision`.
pub fn bianchi_throughput(n: u32, tau: f64, d: &SlotDurations, bits: f64) -> f64 {
    let nf = f64::from(n);
    let p_tr = 1.0 - (1.0 - tau).powf(nf);
    let p_s = nf * tau * (1.0 - tau).powf(nf - 1.0);
    p_s * bits / ((1.0 - p_tr) * d.t_empty + p_s * d.t_success + (p_tr - p_s) * d.t_collision)
}

/// One saturated station alone: a frame per mean backoff plus a success.
pub fn renewal_throughput(w0: u32, d: &SlotDurations, bits: f64) -> f64 {
    bits / ((f64::from(w0) - 1.0) / 2.0 * d.t_empty + d.t_success)
}

/// `E|K1 - K2|` by summing over every pair of counter values.
pub fn brute_force_gap(bo: &BackoffParams, p: f64) -> f64 {
    let m = bo.m as usize;
    let weights: Vec<f64> = (0..=m)
        .map(|i| {
            if i < m {
                (1.0 - p) * p.powi(i as i32)
            } else {
                p.powi(m as i32)
            }
        })
        .collect();
    let w = bo.windows();
    let mut total = 0.0;
    for a in 0..=m {
        for b in 0..=m {
            let (wa, wb) = (w[a] as i64, w[b] as i64);
            let mut s = 0i64;
            for k1 in 0..wa {
                for k2 in 0..wb {
                    s += (k1 - k2).abs();
                }
            }
            total += weights[a] * weights[b] * s as f64 / (wa * wb) as f64;
        }
    }
    total
}

/// Per-slot draws of independent transmitters: AP, `n_mld` MLDs, `n_sld`
/// legacy. Returns `(phi, ap_busy_share, mld_busy_share)` where busy shares
/// count every non-idle slot not involving the tagged device.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_case1(
    tau_ap: f64,
    tau_mld: f64,
    tau_sld: f64,
    n_mld: u32,
    n_sld: u32,
    d: &SlotDurations,
    slots: usize,
    seed: u64,
) -> (f64, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut total, mut ap_busy, mut mld_busy) = (0.0, 0.0, 0.0);
    for _ in 0..slots {
        let ap = rng.random::<f64>() < tau_ap;
        let mut count = u32::from(ap);
        let mut tagged = false;
        for j in 0..n_mld {
            if rng.random::<f64>() < tau_mld {
                count += 1;
                if j == 0 {
                    tagged = true;
                }
            }
        }
        for _ in 0..n_sld {
            if rng.random::<f64>() < tau_sld {
                count += 1;
            }
        }
        let dur = match count {
            0 => d.t_empty,
            1 => d.t_success + d.t_empty,
            _ => d.t_collision + d.t_empty,
        };
        total += dur;
        if count > 0 && !ap {
            ap_busy += dur;
        }
        if count > 0 && !tagged {
            mld_busy += dur;
        }
    }
    (total / slots as f64, ap_busy / total, mld_busy / total)
}

/// The alignment sum evaluated term by term over (wait stage, sibling
/// stage, sibling counter), each term weighted by how many times the
/// double block visits it.
#[allow(clippy::too_many_arguments)]
pub fn enumerate_y(
    wait: &[f64],
    p_outer: f64,
    sib1: &[Vec<f64>],
    sib2: &[Vec<f64>],
    p1: f64,
    p2: f64,
    gamma: f64,
    bo: &BackoffParams,
) -> f64 {
    let w = bo.windows();
    let m = bo.m as usize;
    let at = |d: &[Vec<f64>], i: usize, j: usize| d[i].get(j).copied().unwrap_or(0.0);
    let mut y = 0.0;
    for (ipp, &bw) in wait.iter().enumerate() {
        for i in 0..=m {
            for j in 1..w[m] as usize {
                let mut visits = 0usize;
                if j < w[0] as usize {
                    visits += 1;
                }
                if ipp >= 1 && j >= w[ipp - 1] as usize && j < w[ipp] as usize {
                    visits += ipp.min(i);
                }
                if visits == 0 {
                    continue;
                }
                let sib = (1.0 - gamma) * at(sib1, i, j) * p1.powi(j as i32)
                    + gamma * at(sib2, i, j) * p2.powi(j as i32);
                y += visits as f64 * bw * p_outer.powi(j as i32) * sib;
            }
        }
    }
    y
}
