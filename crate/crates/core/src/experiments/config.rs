//! Experiment configuration, stored as TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytic::AnalyticConfig;
use crate::btp::DEFAULT_MAX_PARTICLES;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Analytic,
    Fpp,
    Btp,
    Walk,
    Verify,
    Pilot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Everything that determines an experiment's output. Worker thread count is
/// deliberately absent: results do not depend on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub command: Command,
    pub n: u32,
    pub trials: u64,
    pub seed: u64,
    /// Time horizon or integration limit; `θ` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    pub tol: f64,
    pub max_subdivisions: usize,
    pub covering: bool,
    pub max_particles: usize,
    /// Norm orders for `‖T_n − θ‖_p`.
    pub p: Vec<u32>,
    /// Emit one row per trial instead of the summary table.
    pub per_trial: bool,
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let a = AnalyticConfig::default();
        Self {
            schema_version: SCHEMA_VERSION,
            command: Command::Fpp,
            n: 10,
            trials: 1000,
            seed: 1,
            horizon: None,
            tol: a.tol,
            max_subdivisions: a.max_subdivisions,
            covering: false,
            max_particles: DEFAULT_MAX_PARTICLES,
            p: vec![1, 2],
            per_trial: false,
            format: Format::Csv,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if let Some(h) = self.horizon {
            if !(h.is_finite() && h >= 0.0) {
                return Err(Error::InvalidArgument(format!("horizon must be finite and non-negative, got {h}")));
            }
        }
        if self.p.is_empty() || self.p.contains(&0) {
            return Err(Error::InvalidArgument("norm orders must be positive".into()));
        }
        if self.max_particles == 0 {
            return Err(Error::InvalidArgument("max_particles must be positive".into()));
        }
        self.analytic().validate()
    }

    pub fn analytic(&self) -> AnalyticConfig {
        AnalyticConfig { tol: self.tol, max_subdivisions: self.max_subdivisions }
    }

    pub fn horizon_or_theta(&self) -> f64 {
        self.horizon.unwrap_or_else(crate::analytic::theta)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}
