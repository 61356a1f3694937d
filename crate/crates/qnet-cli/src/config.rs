//! On-disk run and sweep configurations.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use qnet::network::{NetworkConfig, StatePreset};
use qnet::tol::Tolerances;

use crate::CliError;

/// One simulation/analysis run: network, initial states, and knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub network: NetworkConfig,
    pub system_state: StatePreset,
    pub env_state: StatePreset,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_observe")]
    pub observe: (usize, usize),
    #[serde(default)]
    pub tolerances: TolOverrides,
    /// When set, simulate additionally runs the Monte-Carlo sampler with this
    /// many shots and reports its distance to the exact iterate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
}

fn default_steps() -> usize {
    40
}

fn default_observe() -> (usize, usize) {
    (0, 1)
}

/// Partial overrides on the library tolerance record.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converge: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nullspace: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separable: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_cap: Option<usize>,
}

impl TolOverrides {
    pub fn apply(&self, mut base: Tolerances) -> Tolerances {
        if let Some(x) = self.converge {
            base.converge = x;
        }
        if let Some(x) = self.max_iter {
            base.max_iter = x;
        }
        if let Some(x) = self.nullspace {
            base.nullspace = x;
        }
        if let Some(x) = self.separable {
            base.separable = x;
        }
        if let Some(x) = self.oracle_cap {
            base.oracle_cap = x;
        }
        base
    }
}

/// Sweep axis over a base run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    EnvSize,
    Alpha,
    Phi,
    WeightReseeds,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub axis: Axis,
    pub values: Vec<f64>,
}

pub fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::validation(format!(
            "{}: parse error at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

/// Swap a Bloch angle θ → π−θ everywhere in the environment preset, turning
/// the corrected benchmark state back into the literal caption state.
pub fn literalize_delta(preset: &StatePreset) -> StatePreset {
    match preset {
        StatePreset::Bloch { theta } => StatePreset::Bloch { theta: PI - theta },
        StatePreset::Product { factors } => StatePreset::Product {
            factors: factors.iter().map(literalize_delta).collect(),
        },
        other => other.clone(),
    }
}
