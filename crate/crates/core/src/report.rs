//! Per-device per-link throughput reports shared by both engines.

use serde::{Deserialize, Serialize};

use crate::params::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Analytical,
    Simulated,
}

/// Throughputs in Mb/s, per device and per link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputReport {
    pub s_u_sld: f64,
    pub s_u_mld: f64,
    pub s_d_sld: f64,
    pub s_d_mld: f64,
    pub scenario: ScenarioConfig,
    pub source: Source,
    pub meta: RunMeta,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunMeta {
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    pub nth_model: Option<String>,
    pub strict_paper: bool,
    pub seed: Option<u64>,
    pub duration_s: Option<f64>,
}

impl ThroughputReport {
    pub fn values(&self) -> [f64; 4] {
        [self.s_u_sld, self.s_u_mld, self.s_d_sld, self.s_d_mld]
    }
}
