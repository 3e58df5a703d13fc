//! TOML scenario files with `[scenario]`, `[backoff]` and `[phy]` sections.
//!
//! ```toml
//! [scenario]
//! n_mld = 3
//! n_sld = 3
//! gamma = 0.25      # optional
//!
//! [backoff]
//! w0 = 16
//!
//! [phy]
//! n_a = 256
//! r_su = 4682
//! ```
//!
//! Every section and key is optional; missing values take the defaults of
//! [`ScenarioConfig`], [`BackoffParams`] and [`PhyParams`]. Unknown keys are
//! rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{BackoffParams, PhyParams, ScenarioConfig, LINKS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ScenarioSection {
    n_mld: u32,
    n_sld: u32,
    gamma: Option<f64>,
    links: u32,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        let d = ScenarioConfig::default();
        ScenarioSection {
            n_mld: d.n_mld,
            n_sld: d.n_sld,
            gamma: d.gamma,
            links: LINKS,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ConfigFile {
    scenario: ScenarioSection,
    backoff: BackoffParams,
    phy: PhyParams,
}

/// Parses and validates a scenario.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(0);
        Error::ConfigParse {
            line,
            message: e.message().to_string(),
        }
    })?;
    let cfg = ScenarioConfig {
        n_mld: file.scenario.n_mld,
        n_sld: file.scenario.n_sld,
        gamma: file.scenario.gamma,
        links: file.scenario.links,
        backoff: file.backoff,
        phy: file.phy,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Serializes a scenario in the format read by [`parse_config`].
pub fn to_toml(cfg: &ScenarioConfig) -> String {
    let file = ConfigFile {
        scenario: ScenarioSection {
            n_mld: cfg.n_mld,
            n_sld: cfg.n_sld,
            gamma: cfg.gamma,
            links: cfg.links,
        },
        backoff: cfg.backoff,
        phy: cfg.phy,
    };
    toml::to_string(&file).expect("scenario serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(parse_config("").unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn sections() {
        let cfg = parse_config(
            "[scenario]\nn_mld = 5\nn_sld = 3\ngamma = 0.25\n\n[backoff]\nm = 4\n\n[phy]\nn_a = 256\n",
        )
        .unwrap();
        assert_eq!((cfg.n_mld, cfg.n_sld, cfg.gamma), (5, 3, Some(0.25)));
        assert_eq!(cfg.backoff.m, 4);
        assert_eq!(cfg.backoff.w0, 16);
        assert_eq!(cfg.phy.n_a, 256);
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse_config("[scenario]\nn_mld = 2\n\n[phy]\nrate = 3\n").unwrap_err();
        match err {
            Error::ConfigParse { line, message } => {
                assert_eq!(line, 5);
                assert!(message.contains("rate"), "{message}");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn unknown_section() {
        assert!(matches!(
            parse_config("[radio]\nx = 1\n"),
            Err(Error::ConfigParse { line: 1, .. })
        ));
    }

    #[test]
    fn bad_type_reports_line() {
        let err = parse_config("[scenario]\nn_mld = 2\nn_sld = \"two\"\n").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { line: 3, .. }), "{err}");
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(matches!(
            parse_config("[scenario]\ngamma = 1.5\n"),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            parse_config("[scenario]\nlinks = 3\n"),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn round_trip() {
        let cfg = ScenarioConfig::new(4, 1)
            .with_gamma(0.4)
            .with_phy(PhyParams::calibrated());
        assert_eq!(parse_config(&to_toml(&cfg)).unwrap(), cfg);
    }
}
