//! AP MLD backoff chain: an MLO part whose links restart when the sibling
//! link is busy, and a plain single-link part for legacy destinations.

use crate::error::{Error, Result};
use crate::params::BackoffParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApChainInputs {
    /// Collision probability of AP frames to non-AP MLDs.
    pub p_ap_mld: f64,
    /// Collision probability of AP frames to legacy stations.
    pub p_ap_sld: f64,
    /// Probability the sibling link is busy because of other devices.
    pub x_ap: f64,
    pub gamma: f64,
    pub backoff: BackoffParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApChainDistribution {
    /// `b_mld[i][k]`, `k < W_i`.
    pub b_mld: Vec<Vec<f64>>,
    pub b_sld: Vec<Vec<f64>>,
    /// Restart states `(i', 0)`.
    pub b_mld_prime: Vec<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl ApChainDistribution {
    pub fn total(&self) -> f64 {
        let rows = self.b_mld.iter().chain(&self.b_sld).flatten().sum::<f64>();
        rows + self.b_mld_prime.iter().sum::<f64>()
    }

    pub fn tau_mld(&self) -> f64 {
        self.b_mld.iter().map(|r| r[0]).sum()
    }

    pub fn tau_sld(&self) -> f64 {
        self.b_sld.iter().map(|r| r[0]).sum()
    }

    /// Every state probability, MLO rows then primed states then SLO rows.
    pub fn states(&self) -> impl Iterator<Item = f64> + '_ {
        self.b_mld
            .iter()
            .flatten()
            .chain(&self.b_mld_prime)
            .chain(self.b_sld.iter().flatten())
            .copied()
    }
}

fn check_prob(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid(format!(
            "{name} must lie in [0, 1], got {v}"
        )));
    }
    if v == 1.0 {
        return Err(Error::SingularModel(format!("{name} = 1")));
    }
    Ok(())
}

/// Stage weights `c_i`: `p^i` below the last stage and `p^m / (1 - p)` at it.
pub(crate) fn stage_weights(p: f64, m: u32) -> Vec<f64> {
    let mut c: Vec<f64> = (0..m).map(|i| p.powi(i as i32)).collect();
    c.push(p.powi(m as i32) / (1.0 - p));
    c
}

impl ApChainInputs {
    fn validate(&self) -> Result<()> {
        self.backoff.validate()?;
        check_prob("p_ap_mld", self.p_ap_mld)?;
        check_prob("p_ap_sld", self.p_ap_sld)?;
        check_prob("x_ap", self.x_ap)?;
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::invalid(format!(
                "gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Mass of the MLO part relative to `b_mld[0][0]`.
    fn lambda1(&self) -> f64 {
        let r = self.x_ap / (1.0 - self.x_ap);
        let c = stage_weights(self.p_ap_mld, self.backoff.m);
        let mut sum = 1.0 / (1.0 - self.p_ap_mld);
        for (i, ci) in c.iter().enumerate() {
            let w = f64::from(self.backoff.window(i as u32));
            sum += ((w - 1.0) / 2.0 + r * w / 2.0) * ci;
            sum += r * w / (w - 1.0) * ci;
        }
        sum
    }

    /// Mass of the SLO part relative to `b_sld[0][0]`.
    fn lambda2(&self) -> f64 {
        let c = stage_weights(self.p_ap_sld, self.backoff.m);
        c.iter()
            .enumerate()
            .map(|(i, ci)| (f64::from(self.backoff.window(i as u32)) + 1.0) / 2.0 * ci)
            .sum()
    }
}

pub fn ap_stationary(inputs: &ApChainInputs) -> Result<ApChainDistribution> {
    inputs.validate()?;
    let g = inputs.gamma;
    let lambda1 = inputs.lambda1();
    let lambda2 = inputs.lambda2();
    let (b_mld00, b_sld00) = if g == 1.0 {
        (1.0 / lambda1, 0.0)
    } else if g == 0.0 {
        (0.0, 1.0 / lambda2)
    } else {
        (
            1.0 / (lambda1 + lambda2 * (1.0 - g) / g),
            1.0 / (lambda1 * g / (1.0 - g) + lambda2),
        )
    };

    let b = &inputs.backoff;
    let r = inputs.x_ap / (1.0 - inputs.x_ap);
    let c_mld = stage_weights(inputs.p_ap_mld, b.m);
    let c_sld = stage_weights(inputs.p_ap_sld, b.m);
    let mut b_mld = Vec::with_capacity(c_mld.len());
    let mut b_sld = Vec::with_capacity(c_sld.len());
    let mut b_mld_prime = Vec::with_capacity(c_mld.len());
    for i in 0..=b.m {
        let w = b.window(i);
        let wf = f64::from(w);
        let head = c_mld[i as usize] * b_mld00;
        let boost = 1.0 + r * wf / (wf - 1.0);
        b_mld.push(
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
        b_mld_prime.push(wf / (wf - 1.0) * r * head);
        let head = c_sld[i as usize] * b_sld00;
        b_sld.push((0..w).map(|k| (wf - f64::from(k)) / wf * head).collect());
    }
    Ok(ApChainDistribution {
        b_mld,
        b_sld,
        b_mld_prime,
        lambda1,
        lambda2,
    })
}

/// `(tau_ap_mld, tau_ap_sld)`: per-slot transmit probability towards each
/// destination class.
pub fn ap_tau(inputs: &ApChainInputs) -> Result<(f64, f64)> {
    let d = ap_stationary(inputs)?;
    Ok((
        d.b_mld[0][0] / (1.0 - inputs.p_ap_mld),
        d.b_sld[0][0] / (1.0 - inputs.p_ap_sld),
    ))
}
