pub mod ap_chain;
pub mod cli;
pub mod config;
pub mod coupling;
pub mod error;
pub mod legacy;
pub mod nonap_chain;
pub mod nth;
pub mod params;
pub mod report;
pub mod sim;
pub mod solver;
