//! Scenario, backoff and PHY/MAC timing parameters.
//!
//! Durations are microseconds (`f64`) on the analytical side. The simulator
//! converts them once into integer nanoseconds via [`Nanos`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of links per multi-link device. The model is only defined for two.
pub const LINKS: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BackoffParams {
    /// Stage-0 contention window of the multi-link devices, in slots.
    pub w0: u32,
    /// Maximum backoff stage.
    pub m: u32,
    /// Minimum contention window of legacy stations (window is `cw_min_sld + 1`).
    pub cw_min_sld: u32,
}

impl Default for BackoffParams {
    fn default() -> Self {
        BackoffParams {
            w0: 16,
            m: 6,
            cw_min_sld: 15,
        }
    }
}

impl BackoffParams {
    /// `W_i = 2^i * W_0`.
    pub fn window(&self, stage: u32) -> u32 {
        self.w0 << stage.min(self.m)
    }

    /// All windows `W_0..=W_m`.
    pub fn windows(&self) -> Vec<u32> {
        (0..=self.m).map(|i| self.window(i)).collect()
    }

    /// Window ladder used by legacy stations: `(CW_min + 1) * 2^i`.
    pub fn legacy(&self) -> BackoffParams {
        BackoffParams {
            w0: self.cw_min_sld + 1,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.w0 < 2 {
            return Err(Error::invalid(format!("w0 must be >= 2, got {}", self.w0)));
        }
        if self.m < 1 {
            return Err(Error::invalid("m must be >= 1"));
        }
        if self.m > 20 {
            return Err(Error::invalid(format!(
                "m = {} is unreasonably large",
                self.m
            )));
        }
        if self.cw_min_sld < 1 {
            return Err(Error::invalid("cw_min_sld must be >= 1"));
        }
        Ok(())
    }
}

pub const CALIBRATED_N_A: u32 = 256;
pub const CALIBRATED_R_SU: u32 = 4682;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhyParams {
    /// PHY preamble + header, µs.
    pub t_phy: f64,
    /// OFDM symbol duration including guard interval, µs.
    pub sigma: f64,
    /// Data bits carried per OFDM symbol.
    pub r_su: u32,
    /// MPDUs aggregated per A-MPDU.
    pub n_a: u32,
    /// Payload per MPDU, bytes.
    pub l_d: u32,
    /// MAC header, FCS, delimiter and padding per MPDU, bytes.
    pub mpdu_overhead: u32,
    pub sifs: f64,
    pub t_ack: f64,
    /// Empty backoff slot, µs.
    pub t_empty: f64,
}

impl Default for PhyParams {
    fn default() -> Self {
        PhyParams::mcs8_80mhz()
    }
}

impl PhyParams {
    /// 802.11ax MCS 8, 80 MHz, one spatial stream, 0.8 µs GI.
    ///
    /// 980 data subcarriers at 256-QAM rate 3/4 carry 5880 bits per
    /// 13.6 µs symbol (432.4 Mb/s).
    pub fn mcs8_80mhz() -> Self {
        PhyParams {
            t_phy: 40.0,
            sigma: 13.6,
            r_su: 5880,
            n_a: 1,
            l_d: 1500,
            mpdu_overhead: 0,
            sifs: 16.0,
            t_ack: 32.0,
            t_empty: 9.0,
        }
    }

    /// Profile fitted to the published legacy uplink magnitudes: the longest
    /// 802.11ax A-MPDU (256 MPDUs) with `r_su` chosen by
    /// [`crate::solver::calibrate_r_su`] at `n_mld = n_sld = 2`.
    pub fn calibrated() -> Self {
        PhyParams {
            n_a: CALIBRATED_N_A,
            r_su: CALIBRATED_R_SU,
            ..PhyParams::mcs8_80mhz()
        }
    }

    pub fn with_n_a(mut self, n_a: u32) -> Self {
        self.n_a = n_a;
        self
    }

    /// A-MPDU length in bits.
    pub fn l_ampdu(&self) -> u64 {
        u64::from(self.n_a) * (u64::from(self.l_d) + u64::from(self.mpdu_overhead)) * 8
    }

    /// Goodput bits delivered by one successful A-MPDU (`n_a * L_D`).
    pub fn payload_bits(&self) -> f64 {
        f64::from(self.n_a) * f64::from(self.l_d) * 8.0
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("t_phy", self.t_phy),
            ("sigma", self.sigma),
            ("t_empty", self.t_empty),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be > 0, got {v}")));
            }
        }
        for (name, v) in [("sifs", self.sifs), ("t_ack", self.t_ack)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("{name} must be >= 0, got {v}")));
            }
        }
        if self.r_su == 0 {
            return Err(Error::invalid("r_su must be > 0"));
        }
        if self.n_a == 0 || self.l_d == 0 {
            return Err(Error::invalid("n_a and l_d must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotDurations {
    pub t_data: f64,
    pub t_success: f64,
    pub t_collision: f64,
    pub t_empty: f64,
}

/// `T_PHY + ceil(L_AMPDU / r_SU) * sigma` for explicit values.
pub fn t_data_for(t_phy: f64, l_ampdu_bits: u64, r_su: u32, sigma: f64) -> Result<f64> {
    if r_su == 0 {
        return Err(Error::invalid("r_su must be > 0"));
    }
    let symbols = l_ampdu_bits.div_ceil(u64::from(r_su));
    Ok(t_phy + symbols as f64 * sigma)
}

pub fn compute_t_data(phy: &PhyParams) -> Result<f64> {
    t_data_for(phy.t_phy, phy.l_ampdu(), phy.r_su, phy.sigma)
}

pub fn compute_slot_durations(phy: &PhyParams) -> Result<SlotDurations> {
    phy.validate()?;
    let t_data = compute_t_data(phy)?;
    Ok(SlotDurations {
        t_data,
        t_success: t_data + phy.sifs + phy.t_ack + phy.sifs,
        t_collision: t_data + phy.sifs,
        t_empty: phy.t_empty,
    })
}

/// Integer nanoseconds.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct Nanos(pub u64);

impl Nanos {
    pub fn from_us(us: f64) -> Nanos {
        Nanos((us * 1000.0).round() as u64)
    }

    pub fn as_us(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    pub fn as_secs(self) -> f64 {
        self.0 as f64 * 1e-9
    }
}

impl std::ops::Add for Nanos {
    type Output = Nanos;
    fn add(self, rhs: Nanos) -> Nanos {
        Nanos(self.0 + rhs.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_mld: u32,
    /// Legacy stations on each link.
    pub n_sld: u32,
    /// Probability that an AP frame is addressed to a non-AP MLD.
    /// `None` picks destinations uniformly over associated stations:
    /// `n_mld / (n_mld + 2 n_sld)`, since `n_sld` legacy stations sit on
    /// each of the two links.
    pub gamma: Option<f64>,
    pub links: u32,
    pub backoff: BackoffParams,
    pub phy: PhyParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n_mld: 2,
            n_sld: 2,
            gamma: None,
            links: LINKS,
            backoff: BackoffParams::default(),
            phy: PhyParams::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn new(n_mld: u32, n_sld: u32) -> Self {
        ScenarioConfig {
            n_mld,
            n_sld,
            ..Default::default()
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_phy(mut self, phy: PhyParams) -> Self {
        self.phy = phy;
        self
    }

    /// Resolved destination split.
    pub fn gamma(&self) -> f64 {
        match self.gamma {
            Some(g) => g,
            None => {
                let total = self.n_mld + 2 * self.n_sld;
                if total == 0 {
                    0.0
                } else {
                    f64::from(self.n_mld) / f64::from(total)
                }
            }
        }
    }

    pub fn durations(&self) -> Result<SlotDurations> {
        compute_slot_durations(&self.phy)
    }

    pub fn validate(&self) -> Result<()> {
        if self.links != LINKS {
            return Err(Error::invalid(format!(
                "only two links are modelled, got links = {}",
                self.links
            )));
        }
        if let Some(g) = self.gamma {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::invalid(format!("gamma must lie in [0, 1], got {g}")));
            }
            if g > 0.0 && self.n_mld == 0 {
                return Err(Error::invalid("gamma > 0 requires at least one non-AP MLD"));
            }
            if g < 1.0 && self.n_sld == 0 && self.n_mld > 0 {
                return Err(Error::invalid(
                    "gamma < 1 requires at least one legacy station",
                ));
            }
        }
        self.backoff.validate()?;
        self.phy.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn t_data_single_symbol() {
        let t = t_data_for(40.0, 12_000, 12_000, 13.6).unwrap();
        assert_relative_eq!(t, 53.6, epsilon = 1e-12);
    }

    #[test]
    fn t_data_ceiling_boundary() {
        let t = t_data_for(40.0, 12_001, 12_000, 13.6).unwrap();
        assert_relative_eq!(t, 67.2, epsilon = 1e-12);
    }

    #[test]
    fn t_data_rejects_zero_rate() {
        assert!(t_data_for(40.0, 100, 0, 13.6).is_err());
        let phy = PhyParams {
            r_su: 0,
            ..PhyParams::default()
        };
        assert!(compute_slot_durations(&phy).is_err());
    }

    #[test]
    fn default_profile_by_hand() {
        // 12000 bits / 5880 bits per symbol -> 3 symbols.
        let d = compute_slot_durations(&PhyParams::default()).unwrap();
        assert_relative_eq!(d.t_data, 40.0 + 3.0 * 13.6, epsilon = 1e-12);
        assert_relative_eq!(d.t_success, 80.8 + 16.0 + 32.0 + 16.0, epsilon = 1e-12);
        assert_relative_eq!(d.t_collision, 80.8 + 16.0, epsilon = 1e-12);
    }

    #[test]
    fn aggregated_profile_by_hand() {
        // 17 * 1500 B = 204000 bits -> ceil(34.69) = 35 symbols.
        let phy = PhyParams::default().with_n_a(17);
        let d = compute_slot_durations(&phy).unwrap();
        assert_relative_eq!(d.t_data, 40.0 + 35.0 * 13.6, epsilon = 1e-9);
        assert_relative_eq!(d.t_success, d.t_data + 64.0, epsilon = 1e-9);
    }

    #[test]
    fn calibrated_profile_by_hand() {
        // 256 * 1500 * 8 = 3_072_000 bits; 3_072_000 / 4682 = 656.13 -> 657 symbols.
        let d = compute_slot_durations(&PhyParams::calibrated()).unwrap();
        assert_relative_eq!(d.t_data, 40.0 + 657.0 * 13.6, epsilon = 1e-9);
        assert_relative_eq!(d.t_success, 8975.2 + 64.0, epsilon = 1e-9);
        assert_relative_eq!(d.t_collision, 8975.2 + 16.0, epsilon = 1e-9);
    }

    #[test]
    fn slot_durations_direct_formula() {
        let phy = PhyParams {
            t_phy: 100.0 - 13.6,
            r_su: 12_000,
            sifs: 16.0,
            t_ack: 32.0,
            ..PhyParams::default()
        };
        let d = compute_slot_durations(&phy).unwrap();
        assert_relative_eq!(d.t_data, 100.0, epsilon = 1e-9);
        assert_relative_eq!(d.t_success, 164.0, epsilon = 1e-9);
        assert_relative_eq!(d.t_collision, 116.0, epsilon = 1e-9);
    }

    #[test]
    fn degenerate_timing() {
        let phy = PhyParams {
            sifs: 0.0,
            t_ack: 0.0,
            ..PhyParams::default()
        };
        let d = compute_slot_durations(&phy).unwrap();
        assert_eq!(d.t_success, d.t_data);
        assert_eq!(d.t_collision, d.t_data);
    }

    #[test]
    fn window_ladder() {
        let b = BackoffParams::default();
        assert_eq!(b.window(b.m) / b.window(0), 1 << b.m);
        assert_eq!(b.windows(), vec![16, 32, 64, 128, 256, 512, 1024]);
        assert_eq!(b.legacy().window(0), 16);
    }

    #[test]
    fn scenario_validation() {
        assert!(ScenarioConfig::default().validate().is_ok());
        let c = ScenarioConfig {
            links: 3,
            ..ScenarioConfig::default()
        };
        assert!(c.validate().is_err());
        assert!(ScenarioConfig::default()
            .with_gamma(1.5)
            .validate()
            .is_err());
        assert!(ScenarioConfig::new(0, 3)
            .with_gamma(0.2)
            .validate()
            .is_err());
        let b = BackoffParams {
            w0: 1,
            ..Default::default()
        };
        assert!(b.validate().is_err());
    }

    #[test]
    fn gamma_default_is_population_share() {
        assert_eq!(ScenarioConfig::new(2, 2).gamma(), 1.0 / 3.0);
        assert_eq!(ScenarioConfig::new(2, 0).gamma(), 1.0);
        assert_eq!(ScenarioConfig::new(0, 4).gamma(), 0.0);
        assert_eq!(ScenarioConfig::new(0, 0).gamma(), 0.0);
        assert_eq!(ScenarioConfig::new(3, 1).with_gamma(0.2).gamma(), 0.2);
    }

    proptest::proptest! {
        #[test]
        fn success_minus_collision_is_sifs_plus_ack(
            n_a in 1u32..64, sifs in 0.0f64..50.0, ack in 0.0f64..80.0, r in 100u32..20_000
        ) {
            let phy = PhyParams { n_a, sifs, t_ack: ack, r_su: r, ..PhyParams::default() };
            let d = compute_slot_durations(&phy).unwrap();
            proptest::prop_assert!((d.t_success - d.t_collision - (sifs + ack)).abs() < 1e-9);
        }

        #[test]
        fn t_data_monotone(l in 1u64..1_000_000, dl in 0u64..10_000, r in 1u32..20_000, dr in 0u32..1000) {
            let a = t_data_for(40.0, l, r, 13.6).unwrap();
            proptest::prop_assert!(t_data_for(40.0, l + dl, r, 13.6).unwrap() >= a);
            proptest::prop_assert!(t_data_for(40.0, l, r + dr, 13.6).unwrap() <= a);
        }
    }
}
