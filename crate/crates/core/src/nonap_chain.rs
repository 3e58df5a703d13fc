//! Backoff chain of one link of an NSTR non-AP MLD.
//!
//! Besides the usual `(i, k)` states each stage has a restart state `(i', 0)`
//! (sibling link busy) and a wait state `(i'', 0)` where the link holds at
//! zero until the sibling link also reaches zero.

use crate::ap_chain::stage_weights;
use crate::error::{Error, Result};
use crate::params::BackoffParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonApChainInputs {
    pub p_mld: f64,
    pub x_mld: f64,
    /// Probability a wait at zero survives until the sibling counter hits zero.
    pub y: f64,
    /// Transmit probability used inside `lambda3`.
    pub tau_mld_prev: f64,
    pub backoff: BackoffParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonApChainDistribution {
    pub b: Vec<Vec<f64>>,
    pub b_prime: Vec<f64>,
    pub b_dprime: Vec<f64>,
    pub lambda3: f64,
}

impl NonApChainDistribution {
    pub fn total(&self) -> f64 {
        self.b.iter().flatten().sum::<f64>()
            + self.b_prime.iter().sum::<f64>()
            + self.b_dprime.iter().sum::<f64>()
    }

    pub fn tau(&self) -> f64 {
        self.b.iter().map(|r| r[0]).sum()
    }

    /// Stationary probability of `(i, j)`, zero outside the window.
    pub fn b_at(&self, i: usize, j: usize) -> f64 {
        self.b.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0.0)
    }

    pub fn states(&self) -> impl Iterator<Item = f64> + '_ {
        self.b
            .iter()
            .flatten()
            .chain(&self.b_prime)
            .chain(&self.b_dprime)
            .copied()
    }
}

/// Terms shared by every stage, relative to `b[i][0]`.
struct Coefficients {
    /// `X / (1 - X)`.
    r: f64,
    lambda3: f64,
    /// `(1 - tau) / (1 - (1 - tau)(1 - Y))`.
    wait: f64,
}

impl NonApChainInputs {
    fn validate(&self) -> Result<()> {
        self.backoff.validate()?;
        for (name, v) in [
            ("p_mld", self.p_mld),
            ("x_mld", self.x_mld),
            ("y", self.y),
            ("tau_mld_prev", self.tau_mld_prev),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        if self.p_mld == 1.0 {
            return Err(Error::SingularModel("p_mld = 1".into()));
        }
        if self.x_mld == 1.0 {
            return Err(Error::SingularModel("x_mld = 1".into()));
        }
        if self.tau_mld_prev == 0.0 && self.y == 0.0 {
            return Err(Error::SingularModel(
                "1 - (1 - tau)(1 - Y) = 0: a waiting link can never leave".into(),
            ));
        }
        Ok(())
    }

    fn coefficients(&self) -> Coefficients {
        let t = self.tau_mld_prev;
        let q = (1.0 - t) * (1.0 - self.y);
        let wait = (1.0 - t) / (1.0 - q);
        Coefficients {
            r: self.x_mld / (1.0 - self.x_mld),
            lambda3: wait * (1.0 - self.y) / (1.0 - self.x_mld),
            wait,
        }
    }
}

pub fn nonap_stationary(inputs: &NonApChainInputs) -> Result<NonApChainDistribution> {
    inputs.validate()?;
    let Coefficients { r, lambda3, wait } = inputs.coefficients();
    let x = inputs.x_mld;
    let bo = &inputs.backoff;
    let c = stage_weights(inputs.p_mld, bo.m);

    let mut norm = 0.0;
    for (i, ci) in c.iter().enumerate() {
        let w = f64::from(bo.window(i as u32));
        norm += ci * (1.0 + wait);
        norm += ci * ((w - 1.0) / 2.0 + w / 2.0 * (r + lambda3));
        norm += ci * ((r * w + lambda3) / (w - 1.0) + x * lambda3);
    }
    let b00 = 1.0 / norm;

    let mut b = Vec::with_capacity(c.len());
    let mut b_prime = Vec::with_capacity(c.len());
    let mut b_dprime = Vec::with_capacity(c.len());
    for (i, ci) in c.iter().enumerate() {
        let w = bo.window(i as u32);
        let wf = f64::from(w);
        let head = ci * b00;
        let boost = 1.0 + wf / (wf - 1.0) * (r + lambda3);
        b.push(
            (0..w)
                .map(|k| {
                    if k == 0 {
                        head
                    } else {
                        (wf - f64::from(k)) / wf * boost * head
                    }
                })
                .collect(),
        );
        b_prime.push((r * wf / (wf - 1.0) + lambda3 / (wf - 1.0) + x * lambda3) * head);
        b_dprime.push(wait * head);
    }
    Ok(NonApChainDistribution {
        b,
        b_prime,
        b_dprime,
        lambda3,
    })
}

/// `tau_MLD = b[0][0] / (1 - p_mld)` for a given `tau_mld_prev`.
pub fn nonap_tau(inputs: &NonApChainInputs) -> Result<f64> {
    let d = nonap_stationary(inputs)?;
    Ok(d.b[0][0] / (1.0 - inputs.p_mld))
}

pub const SELF_CONSISTENT_TOL: f64 = 1e-10;
pub const SELF_CONSISTENT_MAX_ITERS: usize = 10_000;

/// Fixed point `tau = nonap_tau(.., tau_mld_prev = tau)`.
pub fn nonap_tau_selfconsistent(
    p_mld: f64,
    x_mld: f64,
    y: f64,
    backoff: &BackoffParams,
) -> Result<f64> {
    let mut inputs = NonApChainInputs {
        p_mld,
        x_mld,
        y,
        tau_mld_prev: 2.0 / (f64::from(backoff.w0) + 1.0),
        backoff: *backoff,
    };
    let mut residual = f64::INFINITY;
    let mut trace = Vec::new();
    for it in 0..SELF_CONSISTENT_MAX_ITERS {
        let next = nonap_tau(&inputs)?;
        residual = (next - inputs.tau_mld_prev).abs();
        if residual < SELF_CONSISTENT_TOL {
            return Ok(next);
        }
        if it % 100 == 0 {
            trace.push(residual);
        }
        inputs.tau_mld_prev += 0.5 * (next - inputs.tau_mld_prev);
    }
    Err(Error::NoConvergence {
        iterations: SELF_CONSISTENT_MAX_ITERS,
        residual,
        trace,
    })
}
