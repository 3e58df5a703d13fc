//! Stationary distributions of the two MLD backoff chains for fixed inputs.

use mlo_coex::ap_chain::{ap_stationary, ApChainInputs};
use mlo_coex::nonap_chain::{nonap_stationary, NonApChainInputs};
use mlo_coex::params::BackoffParams;

fn main() -> mlo_coex::error::Result<()> {
    let backoff = BackoffParams::default();

    let ap = ap_stationary(&ApChainInputs {
        p_ap_mld: 0.2,
        p_ap_sld: 0.15,
        x_ap: 0.6,
        gamma: 0.5,
        backoff,
    })?;
    println!(
        "AP MLD: tau_mld = {:.5}, tau_sld = {:.5}, restart mass = {:.5}",
        ap.tau_mld(),
        ap.tau_sld(),
        ap.b_mld_prime.iter().sum::<f64>()
    );

    let mld = nonap_stationary(&NonApChainInputs {
        p_mld: 0.2,
        x_mld: 0.6,
        y: 0.1,
        tau_mld_prev: 0.05,
        backoff,
    })?;
    println!(
        "non-AP MLD: tau = {:.5}, restart mass = {:.5}, wait mass = {:.5}",
        mld.tau(),
        mld.b_prime.iter().sum::<f64>(),
        mld.b_dprime.iter().sum::<f64>()
    );
    Ok(())
}
