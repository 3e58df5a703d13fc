mod common;

use approx::assert_abs_diff_eq;
use mlo_coex::ap_chain::{ap_stationary, ApChainInputs};
use mlo_coex::nonap_chain::{nonap_stationary, NonApChainInputs};
use mlo_coex::params::BackoffParams;
use proptest::prelude::*;

fn bo(w0: u32, m: u32) -> BackoffParams {
    BackoffParams {
        w0,
        m,
        cw_min_sld: w0 - 1,
    }
}

fn check_ap(inp: &ApChainInputs, tol: f64) {
    let (chain, lay) = common::ap_chain(inp);
    for s in chain.row_sums() {
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
    }
    let pi = chain.stationary(1e-15, 2_000_000);
    let d = ap_stationary(inp).unwrap();
    for (i, w) in lay.windows.iter().enumerate() {
        for k in 0..*w {
            assert_abs_diff_eq!(d.b_mld[i][k], pi[lay.mlo(i, k)], epsilon = tol);
            assert_abs_diff_eq!(d.b_sld[i][k], pi[lay.slo(i, k)], epsilon = tol);
        }
        assert_abs_diff_eq!(d.b_mld_prime[i], pi[lay.prime(i)], epsilon = tol);
    }
}

fn check_nonap(inp: &NonApChainInputs, tol: f64) {
    let (chain, lay) = common::nonap_chain(inp);
    for s in chain.row_sums() {
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
    }
    let pi = chain.stationary(1e-15, 2_000_000);
    let d = nonap_stationary(inp).unwrap();
    for (i, w) in lay.windows.iter().enumerate() {
        for k in 0..*w {
            assert_abs_diff_eq!(d.b[i][k], pi[lay.b(i, k)], epsilon = tol);
        }
        assert_abs_diff_eq!(d.b_prime[i], pi[lay.prime(i)], epsilon = tol);
        assert_abs_diff_eq!(d.b_dprime[i], pi[lay.dprime(i)], epsilon = tol);
    }
}

#[test]
fn ap_chain_matches_transition_oracle() {
    for w0 in [4, 8, 16] {
        for m in [1, 2, 3] {
            let inp = ApChainInputs {
                p_ap_mld: 0.3,
                p_ap_sld: 0.2,
                x_ap: 0.4,
                gamma: 0.35,
                backoff: bo(w0, m),
            };
            check_ap(&inp, 1e-8);
        }
    }
}

#[test]
fn nonap_chain_matches_transition_oracle() {
    for w0 in [4, 8, 16] {
        for m in [1, 2, 3] {
            let inp = NonApChainInputs {
                p_mld: 0.25,
                x_mld: 0.45,
                y: 0.3,
                tau_mld_prev: 0.12,
                backoff: bo(w0, m),
            };
            check_nonap(&inp, 1e-8);
        }
    }
}

#[test]
fn saturated_sibling() {
    let inp = ApChainInputs {
        p_ap_mld: 0.1,
        p_ap_sld: 0.1,
        x_ap: 0.95,
        gamma: 1.0,
        backoff: bo(8, 2),
    };
    check_ap(&inp, 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ap_oracle_random(
        pm in 0.0f64..0.8, ps in 0.0f64..0.8, x in 0.0f64..0.9, g in 0.0f64..=1.0,
        w0 in prop::sample::select(vec![4u32, 8]), m in 1u32..=3
    ) {
        check_ap(&ApChainInputs { p_ap_mld: pm, p_ap_sld: ps, x_ap: x, gamma: g, backoff: bo(w0, m) }, 1e-8);
    }

    #[test]
    fn nonap_oracle_random(
        p in 0.0f64..0.8, x in 0.0f64..0.9, y in 0.05f64..=1.0, t in 0.01f64..0.5,
        w0 in prop::sample::select(vec![4u32, 8]), m in 1u32..=3
    ) {
        check_nonap(&NonApChainInputs { p_mld: p, x_mld: x, y, tau_mld_prev: t, backoff: bo(w0, m) }, 1e-8);
    }
}
