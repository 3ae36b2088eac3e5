//! Run configuration. Every key has a default, so a config file only needs
//! to list the keys it overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// 1-based CSV column holding the price (kline open).
    pub price_column: usize,
    /// 1-based CSV column holding the base-asset volume.
    pub volume_column: usize,
    pub volume_scale: f64,
    /// Minimum relative move for a raw price to be kept.
    pub filter_threshold: f64,

    /// Lower bound on the magnitude of relative-movement denominators.
    pub denom_floor: f64,
    /// Euclidean norm of the non-bias feature components fed to the networks.
    pub feature_norm: f64,

    pub gamma: f64,
    /// Floor for the savings threshold.
    pub mlimn: f64,
    /// Chance per step of resetting the exploration counter.
    pub prob_eps: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Half-period of the cosine learning-rate cycle, in steps.
    pub t_alpha: u64,
    pub fee_rate: f64,
    pub initial_mon: f64,
    pub hidden_size: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            price_column: 2,
            volume_column: 6,
            volume_scale: 1e-7,
            filter_threshold: 0.01,
            denom_floor: 1e-9,
            feature_norm: 6.0,
            gamma: 0.05,
            mlimn: 75.0,
            prob_eps: 1e-4,
            alpha_min: 1e-3,
            alpha_max: 1.0,
            t_alpha: 1000,
            fee_rate: 0.001,
            initial_mon: 100.0,
            hidden_size: 50,
        }
    }
}

impl Config {
    /// Loads overrides from a TOML file, or JSON when the extension is `.json`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Config = if path.extension().is_some_and(|ext| ext == "json") {
            serde_json::from_str(&text)?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, msg: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(msg.to_string()))
            }
        }
        check(self.price_column >= 1, "price_column is 1-based")?;
        check(self.volume_column >= 1, "volume_column is 1-based")?;
        check(
            self.volume_scale > 0.0 && self.volume_scale.is_finite(),
            "volume_scale must be positive",
        )?;
        check(self.filter_threshold > 0.0, "filter_threshold must be positive")?;
        check(self.denom_floor > 0.0, "denom_floor must be positive")?;
        check(self.feature_norm > 0.0, "feature_norm must be positive")?;
        check((0.0..=1.0).contains(&self.gamma), "gamma must lie in [0, 1]")?;
        check((0.0..=1.0).contains(&self.prob_eps), "prob_eps must lie in [0, 1]")?;
        check(
            self.alpha_min > 0.0 && self.alpha_min < self.alpha_max,
            "need 0 < alpha_min < alpha_max",
        )?;
        check(self.t_alpha >= 1, "t_alpha must be at least 1")?;
        check((0.0..1.0).contains(&self.fee_rate), "fee_rate must lie in [0, 1)")?;
        check(self.initial_mon > 0.0, "initial_mon must be positive")?;
        check(self.hidden_size >= 1, "hidden_size must be at least 1")?;
        Ok(())
    }
}
