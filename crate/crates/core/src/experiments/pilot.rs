//! Pilot calibration of finite-n bands for quantities known only up to
//! constants. The pilot runs on its own seed; acceptance reuses the frozen
//! bands with a different seed.

use serde::{Deserialize, Serialize};

use super::config::{Command, ExperimentConfig, SCHEMA_VERSION};
use super::output::VERSION;
use super::runner::{run_fpp, RunOptions};
use crate::error::{Error, Result};

pub const PILOT_DIMENSIONS: [u32; 3] = [8, 12, 16];
pub const PILOT_SEED: u64 = 0x7069_6c6f_7431;
pub const PILOT_TRIALS: u64 = 10_000;
/// Half-width of each band in standard errors.
pub const BAND_SE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub value: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PilotPoint {
    pub n: u32,
    pub trials: u64,
    /// `n·‖T_n − θ‖₁`.
    pub n_norm_l1: Measurement,
    /// `n²·Var(T_n)`.
    pub n2_var: Measurement,
    /// `n·‖T_n⁻‖₁`.
    pub n_t_minus_l1: Measurement,
    /// Mean geodesic length over `n`.
    pub length_over_n: Measurement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lower: Option<f64>,
    pub upper: f64,
}

impl Band {
    pub fn contains(&self, x: f64) -> bool {
        self.lower.is_none_or(|l| x >= l) && x <= self.upper
    }

    /// `[min(x − k·se), max(x + k·se)]` over the measurements.
    pub fn covering(ms: &[Measurement], two_sided: bool) -> Self {
        let lower = ms.iter().map(|m| m.value - BAND_SE * m.se).fold(f64::INFINITY, f64::min);
        let upper = ms.iter().map(|m| m.value + BAND_SE * m.se).fold(f64::NEG_INFINITY, f64::max);
        Self { lower: two_sided.then_some(lower), upper }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bands {
    pub n_norm_l1: Band,
    pub n2_var: Band,
    pub n_t_minus_l1: Band,
    /// At the largest pilot dimension.
    pub geodesic_length_over_n: Band,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub schema_version: u32,
    pub version: String,
    pub seed: u64,
    pub band_se: f64,
    pub points: Vec<PilotPoint>,
    pub bands: Bands,
}

impl Calibration {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map(|s| s + "\n").map_err(|e| Error::Parse(e.to_string()))
    }
}

fn measure(summary: &super::stats::TrialSummary, metric: &str) -> Result<Measurement> {
    let row = summary.get(metric).ok_or_else(|| Error::InvalidArgument(format!("missing {metric}")))?;
    Ok(Measurement { value: row.mean, se: row.stderr.unwrap_or(0.0) })
}

/// FPP statistics at one dimension.
pub fn pilot_point(n: u32, trials: u64, seed: u64, opts: RunOptions) -> Result<PilotPoint> {
    let cfg = ExperimentConfig { command: Command::Fpp, n, trials, seed, p: vec![1], ..Default::default() };
    let o = run_fpp(&cfg, opts)?;
    Ok(PilotPoint {
        n,
        trials,
        n_norm_l1: measure(&o.summary, "n_norm_l1")?,
        n2_var: measure(&o.summary, "n2_var")?,
        n_t_minus_l1: measure(&o.summary, "n_t_minus_l1")?,
        length_over_n: measure(&o.summary, "length_over_n")?,
    })
}

pub fn run_pilot(dims: &[u32], trials: u64, seed: u64, opts: RunOptions) -> Result<Calibration> {
    if dims.is_empty() {
        return Err(Error::InvalidArgument("no pilot dimensions".into()));
    }
    let points = dims.iter().map(|&n| pilot_point(n, trials, seed, opts)).collect::<Result<Vec<_>>>()?;
    let pick = |f: fn(&PilotPoint) -> Measurement| points.iter().map(f).collect::<Vec<_>>();
    let last = points.iter().max_by_key(|p| p.n).expect("non-empty");
    let bands = Bands {
        n_norm_l1: Band::covering(&pick(|p| p.n_norm_l1), true),
        n2_var: Band::covering(&pick(|p| p.n2_var), true),
        n_t_minus_l1: Band::covering(&pick(|p| p.n_t_minus_l1), false),
        geodesic_length_over_n: Band::covering(&[last.length_over_n], true),
    };
    Ok(Calibration {
        schema_version: SCHEMA_VERSION,
        version: VERSION.to_string(),
        seed,
        band_se: BAND_SE,
        points,
        bands,
    })
}
