//! Configuration file parsing and flag merging.
//!
//! The config file is a flat JSON object whose keys are exactly the
//! [`ExperimentConfig`] field names; unknown keys are rejected. Flag
//! overrides always win over file values, and absent fields fall back to
//! the defaults of [`ExperimentConfig::with_kappa`]. `kappa` has no
//! default and must be supplied by the file or an override.

use crate::error::{Error, Result};
use crate::experiment::ExperimentConfig;
use serde::Deserialize;

/// Flag-level overrides; `None` means "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub kappa: Option<f64>,
    pub n_states: Option<usize>,
    pub n_runs: Option<usize>,
    pub ensemble_sizes: Option<Vec<usize>>,
    pub inv_dqm_grid: Option<Vec<f64>>,
    pub u_range: Option<(f64, f64)>,
    pub center_range: Option<(f64, f64)>,
    pub master_seed: Option<u64>,
    pub deconvolve: Option<bool>,
    pub weighting: Option<bool>,
    pub average_estimates_first: Option<bool>,
    pub d2_printed_form: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    kappa: Option<f64>,
    n_states: Option<usize>,
    n_runs: Option<usize>,
    ensemble_sizes: Option<Vec<usize>>,
    inv_dqm_grid: Option<Vec<f64>>,
    u_range: Option<(f64, f64)>,
    center_range: Option<(f64, f64)>,
    master_seed: Option<u64>,
    deconvolve: Option<bool>,
    weighting: Option<bool>,
    average_estimates_first: Option<bool>,
    d2_printed_form: Option<bool>,
}

/// Parse config bytes, apply overrides, validate. An empty (or
/// whitespace-only) file is treated as `{}`.
pub fn parse_config(bytes: &[u8], overrides: &ConfigOverrides) -> Result<ExperimentConfig> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::ConfigParse(format!("not valid UTF-8: {e}")))?;
    let file: ConfigFile = if text.trim().is_empty() {
        ConfigFile::default()
    } else {
        serde_json::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?
    };

    let kappa = overrides
        .kappa
        .or(file.kappa)
        .ok_or(Error::ConfigInvalid {
            field: "kappa",
            reason: "required; there is no default temperature".into(),
        })?;
    let mut cfg = ExperimentConfig::with_kappa(kappa);

    macro_rules! merge {
        ($($field:ident),+ $(,)?) => {
            $(
                if let Some(value) = overrides.$field.clone().or(file.$field) {
                    cfg.$field = value;
                }
            )+
        };
    }
    merge!(
        n_states,
        n_runs,
        ensemble_sizes,
        inv_dqm_grid,
        u_range,
        center_range,
        master_seed,
        deconvolve,
        weighting,
        average_estimates_first,
        d2_printed_form,
    );

    cfg.validate()?;
    Ok(cfg)
}
