//! Run configuration: one JSON document plus command-line overrides.

use std::path::Path;

use bloch_lindblad::analysis::{LyapunovConfig, Plane};
use bloch_lindblad::solver::IntegratorConfig;
use bloch_lindblad::{BlochVector, Model};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Model,
    #[serde(default)]
    pub initial_state: BlochVector,
    pub integrator: Option<IntegratorConfig>,
    #[serde(default)]
    pub fixed_points: FixedPointsOptions,
    pub sweep: Option<SweepOptions>,
    pub lyapunov: Option<LyapunovConfig>,
    #[serde(default)]
    pub portrait: PortraitOptions,
    #[serde(default)]
    pub validate: ValidateOptions,
    pub seed: Option<u64>,
    #[serde(default = "default_prefix")]
    pub out_prefix: String,
}

fn default_prefix() -> String {
    "out".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FixedPointsOptions {
    pub grid_n: usize,
}

impl Default for FixedPointsOptions {
    fn default() -> Self {
        Self { grid_n: 9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepOptions {
    pub param: String,
    pub start: f64,
    pub end: f64,
    pub steps: usize,
    #[serde(default = "default_sweep_grid")]
    pub grid_n: usize,
}

fn default_sweep_grid() -> usize {
    5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PortraitOptions {
    pub plane: Plane,
    pub n: usize,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        Self {
            plane: Plane::Y0,
            n: 21,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateOptions {
    /// Sphere and ball samples for the flux and consistency checks.
    pub n_samples: usize,
    /// Grid points of the one-dimensional nonnegativity scan.
    pub scan_n: usize,
    /// Length of the trajectory along which `h` is checked.
    pub trajectory_time: f64,
    pub psd_tol: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            n_samples: 1000,
            scan_n: 201,
            trajectory_time: 100.0,
            psd_tol: 1e-9,
        }
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub set: Vec<String>,
    pub seed: Option<u64>,
    pub out_prefix: Option<String>,
}

/// Reads the config document (or starts from `{}`), applies overrides and
/// deserializes.
pub fn load(path: Option<&Path>, overrides: &Overrides) -> anyhow::Result<RunConfig> {
    let mut doc = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))?
        }
        None => Value::Object(Map::new()),
    };
    for item in &overrides.set {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| anyhow::anyhow!("--set expects key=value, got {item:?}"))?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        set_path(&mut doc, key, value)?;
    }
    if let Some(seed) = overrides.seed {
        set_path(&mut doc, "seed", seed.into())?;
    }
    if let Some(prefix) = &overrides.out_prefix {
        set_path(&mut doc, "out_prefix", prefix.clone().into())?;
    }
    Ok(serde_json::from_value(doc)?)
}

/// Sets `value` at a dotted `key`, creating intermediate objects.
pub fn set_path(doc: &mut Value, key: &str, value: Value) -> anyhow::Result<()> {
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        anyhow::bail!("invalid key {key:?}");
    }
    for part in &parts[..parts.len() - 1] {
        if node.is_null() {
            *node = Value::Object(Map::new());
        }
        let Value::Object(map) = node else {
            anyhow::bail!("{key:?}: {part:?} is not an object");
        };
        node = map.entry(part.to_string()).or_insert(Value::Null);
    }
    if node.is_null() {
        *node = Value::Object(Map::new());
    }
    let Value::Object(map) = node else {
        anyhow::bail!("{key:?}: parent is not an object");
    };
    map.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
