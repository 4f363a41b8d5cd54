//! Run configuration read from a JSON file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use helpercap_core::{validate_config, ChannelConfig, OptimizerBudget, RateUnit};
use serde::{Deserialize, Serialize};

/// Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSettings {
    pub n: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            n: 1_000_000,
            seed: 7,
            tol: 0.01,
        }
    }
}

/// Everything a run needs. The channel parameters are validated on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub eta1: f64,
    pub eta2: f64,
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
    pub q2: f64,
    /// Number of weighted-sum directions for the inner bound.
    #[serde(default = "default_directions")]
    pub directions: usize,
    /// Resolution of the correlation search for the outer bound.
    #[serde(default = "default_rho_grid")]
    pub rho_grid: usize,
    #[serde(default)]
    pub budget: OptimizerBudget,
    #[serde(default)]
    pub unit: RateUnit,
    #[serde(default)]
    pub mc: McSettings,
    /// Output directory, overridden by `--out`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_directions() -> usize {
    16
}

fn default_rho_grid() -> usize {
    16
}

impl RunConfig {
    /// Configuration with default settings for the given channel.
    pub fn for_channel(cfg: &ChannelConfig) -> Self {
        let [eta1, eta2, p0, p1, p2, q1, q2] = cfg.to_array();
        RunConfig {
            eta1,
            eta2,
            p0,
            p1,
            p2,
            q1,
            q2,
            directions: default_directions(),
            rho_grid: default_rho_grid(),
            budget: OptimizerBudget::default(),
            unit: RateUnit::default(),
            mc: McSettings::default(),
            out: None,
        }
    }

    pub fn channel(&self) -> Result<ChannelConfig> {
        Ok(validate_config([
            self.eta1, self.eta2, self.p0, self.p1, self.p2, self.q1, self.q2,
        ])?)
    }

    /// Checks every setting; the channel parameters first.
    pub fn validate(&self) -> Result<()> {
        self.channel()?;
        self.budget.validate()?;
        anyhow::ensure!(self.directions > 0, "directions must be positive");
        anyhow::ensure!(self.rho_grid > 0, "rho_grid must be positive");
        anyhow::ensure!(self.mc.n >= 2, "mc.n must be at least 2");
        anyhow::ensure!(self.mc.tol > 0.0, "mc.tol must be positive");
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).context("malformed config")?;
        cfg.validate().context("invalid config")?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_fields() {
        let c = RunConfig::from_json(r#"{"eta1":1,"eta2":1,"p0":2,"p1":5,"p2":5,"q1":12,"q2":12}"#)
            .unwrap();
        assert_eq!(c.directions, 16);
        assert_eq!(c.budget, OptimizerBudget::default());
        assert_eq!(c.unit, RateUnit::Bits);
        assert_eq!(c.mc, McSettings::default());
    }

    #[test]
    fn negative_power_is_reported_by_name() {
        let err = RunConfig::from_json(r#"{"eta1":1,"eta2":1,"p0":-1,"p1":5,"p2":5,"q1":12,"q2":12}"#)
            .unwrap_err();
        assert!(format!("{err:#}").contains("p0 negative"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"eta1":1,"eta2":1,"p0":2,"p1":5,"p2":5,"q1":12,"q2":12,"p3":1}"#;
        assert!(RunConfig::from_json(text).is_err());
    }

    #[test]
    fn nested_settings_parse() {
        let text = r#"{"eta1":1,"eta2":1,"p0":2,"p1":5,"p2":5,"q1":12,"q2":12,
            "unit":"nats","budget":{"restarts":2},"mc":{"n":10,"tol":1e-6}}"#;
        let c = RunConfig::from_json(text).unwrap();
        assert_eq!(c.unit, RateUnit::Nats);
        assert_eq!(c.budget.restarts, 2);
        assert_eq!(c.budget.max_iters, OptimizerBudget::default().max_iters);
        assert_eq!((c.mc.n, c.mc.seed), (10, 7));
    }
}
