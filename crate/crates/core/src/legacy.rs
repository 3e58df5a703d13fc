//! Transmit probability of legacy single-link stations (binary exponential
//! backoff with infinite retries at the last stage).

use crate::error::{Error, Result};
use crate::params::BackoffParams;

/// Legacy transmit probability in each coexistence case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SldTau {
    pub tau_case1: f64,
    pub tau_case2: f64,
}

/// Per-slot transmit probability of a saturated DCF station.
///
/// Evaluates `[(1 - p - p(2p)^m)/(1 - 2p) * (cw_min + 1)/2 + 1/2]^-1` through
/// the equivalent finite sum `1 + p * sum_{j<m} (2p)^j`, so `p = 1/2` needs no
/// special casing.
pub fn sld_tau(p: f64, cw_min: u32, m: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::SingularModel(format!(
            "legacy collision probability must lie in [0, 1), got {p}"
        )));
    }
    let mut geo = 0.0;
    let mut term = 1.0;
    for _ in 0..m {
        geo += term;
        term *= 2.0 * p;
    }
    let w = f64::from(cw_min) + 1.0;
    let tau = 1.0 / ((1.0 + p * geo) * w / 2.0 + 0.5);
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::ModelValidity(format!(
            "legacy tau = {tau} outside (0, 1]"
        )));
    }
    Ok(tau)
}

pub fn sld_taus(p_case1: f64, p_case2: f64, backoff: &BackoffParams) -> Result<SldTau> {
    Ok(SldTau {
        tau_case1: sld_tau(p_case1, backoff.cw_min_sld, backoff.m)?,
        tau_case2: sld_tau(p_case2, backoff.cw_min_sld, backoff.m)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Closed form, valid away from p = 1/2.
    fn closed_form(p: f64, cw: u32, m: u32) -> f64 {
        let num = 1.0 - p - p * (2.0 * p).powi(m as i32);
        1.0 / (num / (1.0 - 2.0 * p) * (f64::from(cw) + 1.0) / 2.0 + 0.5)
    }

    #[test]
    fn idle_channel() {
        assert_relative_eq!(sld_tau(0.0, 15, 6).unwrap(), 1.0 / 8.5, epsilon = 1e-15);
    }

    #[test]
    fn quarter_collision() {
        assert_relative_eq!(sld_tau(0.25, 15, 6).unwrap(), 0.080402, epsilon = 5e-7);
        assert_relative_eq!(
            sld_tau(0.25, 15, 6).unwrap(),
            closed_form(0.25, 15, 6),
            max_relative = 1e-13
        );
    }

    #[test]
    fn half_is_removable() {
        let mid = sld_tau(0.5, 15, 6).unwrap();
        // (1 + 0.5 * 6) * 8 + 0.5
        assert_relative_eq!(mid, 1.0 / 32.5, epsilon = 1e-15);
        let h = 1e-11;
        assert!((sld_tau(0.5 - h, 15, 6).unwrap() - mid).abs() < 1e-9);
        assert!((sld_tau(0.5 + h, 15, 6).unwrap() - mid).abs() < 1e-9);
        // The closed-form quotient approaches the same value from both sides.
        let lo = closed_form(0.5 - 1e-7, 15, 6);
        let hi = closed_form(0.5 + 1e-7, 15, 6);
        assert!((lo - mid).abs() < 1e-6 && (hi - mid).abs() < 1e-6);
    }

    #[test]
    fn rejects_certain_collision() {
        assert!(sld_tau(1.0, 15, 6).is_err());
        assert!(sld_tau(-0.1, 15, 6).is_err());
        assert!(sld_tau(f64::NAN, 15, 6).is_err());
    }

    proptest! {
        #[test]
        fn matches_closed_form(p in 0.0f64..0.99, cw in 1u32..1024, m in 1u32..8) {
            prop_assume!((p - 0.5).abs() > 1e-3);
            let a = sld_tau(p, cw, m).unwrap();
            prop_assert!((a - closed_form(p, cw, m)).abs() <= 1e-10 * a.max(1e-3));
        }

        #[test]
        fn zero_p_is_two_over_cw_plus_two(cw in 1u32..4096, m in 1u32..10) {
            let t = sld_tau(0.0, cw, m).unwrap();
            prop_assert!((t - 2.0 / (f64::from(cw) + 2.0)).abs() < 1e-15);
        }

        #[test]
        fn decreasing_in_cw(p in 0.0f64..0.99, cw in 1u32..2048, m in 1u32..8) {
            prop_assert!(sld_tau(p, cw + 1, m).unwrap() < sld_tau(p, cw, m).unwrap());
        }

        #[test]
        fn in_unit_interval(p in 0.0f64..0.999, cw in 1u32..2048, m in 1u32..12) {
            let t = sld_tau(p, cw, m).unwrap();
            prop_assert!(t > 0.0 && t <= 1.0);
        }
    }
}
