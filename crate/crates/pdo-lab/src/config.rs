//! Experiment configuration: a small documented JSON schema.
//!
//! ```json
//! {
//!   "scenario": "index-invariance",
//!   "seed": 0,
//!   "grid": { "dim": 1, "box_radius": 8.0, "points": 256 },
//!   "symbols": [ { "name": "ladder-up", "params": { } } ],
//!   "specs": [ { "s": 0.0, "p": 2.0 } ],
//!   "tolerances": { "index_gap_floor": 10.0 },
//!   "out_dir": "reports",
//!   "workers": 2
//! }
//! ```
//!
//! Only `scenario` is required; every other field falls back to the
//! scenario's registered defaults.  The `tolerances` block is documentation
//! only: each entry must restate a bound from the tolerance registry exactly,
//! because asserted bounds have a single source of truth and cannot be
//! loosened or tightened per run.  The environment variable `PDO_LAB_SEED`
//! overrides `seed`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{self, CorpusError, Params};
use crate::tolerances;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub dim: usize,
    pub box_radius: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSelection {
    pub name: String,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecParams {
    pub s: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridParams>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub symbols: Vec<SymbolSelection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub specs: Vec<SpecParams>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read configuration file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("configuration is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unknown scenario `{name}`; known scenarios: {known}")]
    UnknownScenario { name: String, known: String },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("grid: {0}")]
    Grid(String),
    #[error("spec (s = {s}, p = {p}): {why}")]
    Spec { s: f64, p: f64, why: String },
    #[error("tolerance `{0}` is not in the registry; bounds have a single source of truth")]
    UnknownTolerance(String),
    #[error(
        "tolerance `{name}` restated as {given} but the registry fixes {fixed}; \
         bounds cannot be overridden per run"
    )]
    ToleranceMismatch { name: String, given: f64, fixed: f64 },
    #[error("workers must be at least 1")]
    BadWorkers,
    #[error("seed override {0}: not an unsigned 64-bit integer")]
    BadSeed(String),
}

impl ExperimentConfig {
    /// A default configuration for a registered scenario name.
    pub fn for_scenario(scenario: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            seed: None,
            grid: None,
            symbols: Vec::new(),
            specs: Vec::new(),
            tolerances: BTreeMap::new(),
            out_dir: None,
            workers: None,
        }
    }

    /// Parse a JSON configuration file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Validate every cross-reference: scenario and symbol names, grid and
    /// spec sanity, and tolerance restatements.
    pub fn validate(&self, known_scenarios: &[&str]) -> Result<(), ConfigError> {
        if !known_scenarios.contains(&self.scenario.as_str()) {
            return Err(ConfigError::UnknownScenario {
                name: self.scenario.clone(),
                known: known_scenarios.join(", "),
            });
        }
        for sel in &self.symbols {
            // Building exercises the full parameter validation.
            corpus::build(&sel.name, &sel.params)?;
        }
        if let Some(g) = &self.grid {
            pdo_core::grid::Grid::new(g.dim, g.box_radius, g.points)
                .map_err(|e| ConfigError::Grid(e.to_string()))?;
        }
        for sp in &self.specs {
            pdo_core::spaces::SpaceSpec::new(sp.s, sp.p)
                .map_err(|e| ConfigError::Spec { s: sp.s, p: sp.p, why: e.to_string() })?;
        }
        for (name, &value) in &self.tolerances {
            let fixed = tolerances::get(name)
                .ok_or_else(|| ConfigError::UnknownTolerance(name.clone()))?;
            if !(value > 0.0) || value != fixed {
                return Err(ConfigError::ToleranceMismatch { name: name.clone(), given: value, fixed });
            }
        }
        if self.workers == Some(0) {
            return Err(ConfigError::BadWorkers);
        }
        Ok(())
    }

    /// The seed after the `PDO_LAB_SEED` environment override.
    pub fn effective_seed(&self, env_override: Option<&str>) -> Result<u64, ConfigError> {
        match env_override {
            Some(text) => text
                .trim()
                .parse::<u64>()
                .map_err(|_| ConfigError::BadSeed(text.to_string())),
            None => Ok(self.seed.unwrap_or(0)),
        }
    }
}
