//! Configuration file layout and dotted-key overrides.

use couette_lab::multiplier::{SweepSpec, WeightParams};
use couette_lab::sim::{EchoSpec, GridConfig, Profile, SeedMode, SimConfig, SimParams};
use couette_lab::toy::ToyParams;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {reason}")]
    File { path: String, reason: String },
    #[error("override `{0}` is not of the form key=value")]
    Malformed(String),
    #[error("invalid override `{key}`: {reason}")]
    Override { key: String, reason: String },
    #[error("config: {0}")]
    Invalid(String),
}

/// Inviscid damping table of Gaussian data on the `[grid]` lattice.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearSection {
    pub k_modes: usize,
    pub width: f64,
    pub amplitude: f64,
    /// Log-spaced sample times on `[t_min, t_max]`.
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    /// Window of the log-log slope fit.
    pub fit: (f64, f64),
}

impl Default for LinearSection {
    fn default() -> Self {
        Self {
            k_modes: 4,
            width: 1.0,
            amplitude: 1.0,
            t_min: 1.0,
            t_max: 100.0,
            samples: 200,
            fit: (10.0, 100.0),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToySection {
    pub beta: f64,
    pub gamma: f64,
    pub c_growth: f64,
}

impl Default for ToySection {
    fn default() -> Self {
        Self {
            beta: 0.25,
            gamma: 16.0,
            c_growth: 1.5,
        }
    }
}

impl ToySection {
    pub fn params(&self) -> ToyParams {
        ToyParams {
            beta: self.beta,
            gamma: self.gamma,
            c_growth: self.c_growth,
        }
    }
}

/// Weight profile export; `mu` defaults to the value implied by `[weight]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightProfileSection {
    pub eta: f64,
    pub mu: Option<f64>,
    pub ks: Vec<i64>,
    /// Uniform sample times on `[t_min, t_max]`.
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
}

impl Default for WeightProfileSection {
    fn default() -> Self {
        Self {
            eta: 400.0,
            mu: None,
            ks: vec![2],
            t_min: 0.0,
            t_max: 1000.0,
            samples: 5001,
        }
    }
}

impl WeightProfileSection {
    pub fn times(&self) -> Vec<f64> {
        if self.samples == 1 {
            return vec![self.t_min];
        }
        let n = (self.samples - 1) as f64;
        (0..self.samples)
            .map(|i| self.t_min + (self.t_max - self.t_min) * i as f64 / n)
            .collect()
    }
}

/// Everything a run may read; each verb uses its own sections.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabConfig {
    pub grid: GridConfig,
    pub weight: WeightParams,
    pub sim: SimParams,
    pub seed: Vec<SeedMode>,
    pub profile: Option<Profile>,
    pub echo: Option<EchoSpec>,
    pub linear: LinearSection,
    pub toy: ToySection,
    pub weight_profile: WeightProfileSection,
    pub sweep: SweepSpec,
}

impl LabConfig {
    pub fn simulation(&self) -> SimConfig {
        SimConfig {
            grid: self.grid,
            weight: self.weight,
            sim: self.sim,
            seed: self.seed.clone(),
            profile: self.profile,
            echo: self.echo,
        }
    }
}

/// Read a TOML file into a table; a missing path means an empty table.
pub fn read_table(path: Option<&Path>) -> Result<Table, ConfigError> {
    let Some(path) = path else {
        return Ok(Table::new());
    };
    let file_err = |reason: String| ConfigError::File {
        path: path.display().to_string(),
        reason,
    };
    let text = std::fs::read_to_string(path).map_err(|e| file_err(e.to_string()))?;
    text.parse::<Table>().map_err(|e| file_err(e.to_string()))
}

/// Parse `value` as a TOML value, falling back to a bare string.
fn parse_value(value: &str) -> Value {
    format!("v = {value}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(value.to_string()))
}

/// Set `key` (dotted, numeric segments index arrays) to `value` inside `table`.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<(), ConfigError> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::Malformed(assignment.to_string()))?;
    let key = key.trim();
    let segments: Vec<&str> = key.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(ConfigError::Malformed(assignment.to_string()));
    }
    let bad = |reason: String| ConfigError::Override {
        key: key.to_string(),
        reason,
    };
    let mut slot = table
        .entry(segments[0])
        .or_insert_with(|| Value::Table(Table::new()));
    for (depth, seg) in segments.iter().enumerate().skip(1) {
        let parent = segments[..depth].join(".");
        slot = match slot {
            Value::Table(t) => t.entry(*seg).or_insert_with(|| Value::Table(Table::new())),
            Value::Array(a) => {
                let i: usize = seg
                    .parse()
                    .map_err(|_| bad(format!("`{parent}` is a list, `{seg}` is not an index")))?;
                let len = a.len();
                a.get_mut(i)
                    .ok_or_else(|| bad(format!("`{parent}` has {len} entries")))?
            }
            _ => return Err(bad(format!("`{parent}` is not a table"))),
        };
    }
    *slot = parse_value(value.trim());
    Ok(())
}

/// Deserialize a table into a config.
pub fn parse_config(table: &Table) -> Result<LabConfig, String> {
    Value::Table(table.clone())
        .try_into()
        .map_err(|e: toml::de::Error| e.message().to_string())
}

/// Apply overrides, deserialize and run `check`; a failure is attributed to the first
/// override whose application makes the config invalid.
pub fn resolve<T>(
    base: Table,
    overrides: &[String],
    check: impl Fn(&LabConfig) -> Result<T, String>,
) -> Result<(LabConfig, T), ConfigError> {
    let run = |t: &Table| parse_config(t).and_then(|c| check(&c).map(|v| (c, v)));
    let mut tables = vec![base];
    for o in overrides {
        let mut t = tables.last().expect("non-empty").clone();
        apply_override(&mut t, o)?;
        tables.push(t);
    }
    let full = run(tables.last().expect("non-empty"));
    if full.is_ok() {
        return full.map_err(ConfigError::Invalid);
    }
    if let Err(reason) = run(&tables[0]) {
        return Err(ConfigError::Invalid(reason));
    }
    for (i, t) in tables.iter().enumerate().skip(1) {
        if let Err(reason) = run(t) {
            return Err(ConfigError::Override {
                key: overrides[i - 1].clone(),
                reason,
            });
        }
    }
    // each prefix is valid but the combination is not: blame the last override
    Err(ConfigError::Override {
        key: overrides.last().cloned().unwrap_or_default(),
        reason: full.err().unwrap_or_default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_create_nested_keys() {
        let mut t = Table::new();
        apply_override(&mut t, "sim.dt=0.01").unwrap();
        apply_override(&mut t, "weight_profile.ks=[1, 2]").unwrap();
        apply_override(&mut t, "sim.policy=monitor").unwrap();
        let c = parse_config(&t).unwrap();
        assert_eq!(c.sim.dt, 0.01);
        assert_eq!(c.weight_profile.ks, vec![1, 2]);
        assert_eq!(c.sim.policy, couette_lab::sim::ZeroModePolicy::Monitor);
    }

    #[test]
    fn overrides_index_lists() {
        let mut t: Table = "seed = [[1, 2.0, 0.5]]".parse().unwrap();
        apply_override(&mut t, "seed.0.2=0.75").unwrap();
        let c = parse_config(&t).unwrap();
        assert_eq!(c.seed[0].re, 0.75);
        assert!(apply_override(&mut t, "seed.3.re=1").is_err());
        assert!(apply_override(&mut t, "seed.x=1").is_err());
    }

    #[test]
    fn blame_names_the_override() {
        let check = |c: &LabConfig| c.simulation().validate().map_err(|e| e.to_string());
        let base: Table = "seed = [[1, 1.0, 1.0]]".parse().unwrap();
        let err = resolve(
            base.clone(),
            &["sim.t_end=5".into(), "sim.dt=-1".into()],
            check,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("`sim.dt=-1`"), "{err}");
        let err = resolve(base, &["grid.nope=1".into()], check)
            .unwrap_err()
            .to_string();
        assert!(err.contains("`grid.nope=1`"), "{err}");
        assert!(matches!(
            apply_override(&mut Table::new(), "sim.dt"),
            Err(ConfigError::Malformed(_))
        ));
    }
}
