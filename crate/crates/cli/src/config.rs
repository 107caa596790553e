//! Run configuration.
//!
//! A [`RunConfig`] is assembled in layers: the job's defaults, then the TOML
//! file given by `--config`, then `--set key=value` overrides, then the
//! dedicated flags (`--out`, `--format`, `--steps`, `--v`, `--v-list`).
//! Unknown keys are rejected at every layer.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qfi_core::models::{ConstValue, ModelRegistry, ModelSpec};
use qfi_core::propagator::{EvolutionConfig, StepRule, StepperRegistry, MIN_STEPS};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::RunError;

/// Grids longer than this are almost certainly a typo in `step`.
pub const MAX_GRID_POINTS: usize = 100_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Destination file; standard output when absent.
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// Model family name plus its constants as plain keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub variant: String,
    #[serde(flatten)]
    pub constants: BTreeMap<String, ConstValue>,
}

impl ModelConfig {
    pub fn spec(&self) -> ModelSpec {
        ModelSpec {
            variant: self.variant.clone(),
            constants: self.constants.clone(),
        }
    }
}

/// Values of one parameter (or scanned model constant): either explicit
/// `values`, or `start`, `stop` and `step` with both ends included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub param: String,
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>, RunError> {
        let points = match (&self.values, self.start, self.stop, self.step) {
            (Some(values), None, None, None) => values.clone(),
            (None, Some(start), Some(stop), Some(step)) => {
                if !(step > 0.0) || !step.is_finite() || !(stop >= start) {
                    return Err(RunError::config(format!(
                        "grid needs step > 0 and stop >= start, got start {start}, stop {stop}, step {step}"
                    )));
                }
                let span = (stop - start) / step;
                if span > MAX_GRID_POINTS as f64 {
                    return Err(RunError::config(format!(
                        "grid has more than {MAX_GRID_POINTS} points"
                    )));
                }
                // Tolerate rounding in (stop − start)/step so `stop` is kept.
                let n = (span + 1e-9).floor() as usize;
                (0..=n).map(|k| start + k as f64 * step).collect()
            }
            _ => {
                return Err(RunError::config(
                    "grid takes either `values` or all of `start`, `stop`, `step`",
                ))
            }
        };
        if points.is_empty() || points.iter().any(|x| !x.is_finite()) {
            return Err(RunError::config("grid values must be finite and non-empty"));
        }
        Ok(points)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub job: String,
    /// Reserved; every job is deterministic.
    #[serde(default)]
    pub seed: u64,
    pub model: ModelConfig,
    /// Base parameter point: the target for oracle and extraction jobs, the
    /// ramp start for `qfim-sum`. Grid values replace one entry.
    #[serde(default)]
    pub params: Vec<f64>,
    /// Driven (or reported) parameters by name.
    #[serde(default)]
    pub which: Vec<String>,
    /// Ramp excursion, the same at every grid point.
    pub delta: Option<f64>,
    /// Fixed ramp start of the driven parameter; the excursion then follows
    /// the target.
    pub origin: Option<f64>,
    /// Single final rate. Without it, estimates are sweep extrapolations
    /// over `velocities`, or over the default grid.
    pub v: Option<f64>,
    pub velocities: Option<Vec<f64>>,
    pub grid: Option<Grid>,
    /// Scans only: skip the extraction and report the spectrum.
    #[serde(default)]
    pub spectrum_only: bool,
    /// Scans only: lowest energies reported per grid point.
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_levels() -> usize {
    4
}

/// Top-level keys of [`RunConfig`].
pub const TOP_LEVEL_KEYS: &[&str] = &[
    "job",
    "seed",
    "model",
    "params",
    "which",
    "delta",
    "origin",
    "v",
    "velocities",
    "grid",
    "spectrum_only",
    "levels",
    "evolution",
    "output",
];

/// Keys that cannot both be set; giving one drops the other from lower layers.
const EXCLUSIVE: &[(&str, &str)] = &[("v", "velocities"), ("delta", "origin")];

/// Tables merged key by key across layers; other keys are replaced whole.
const MERGED_TABLES: &[&str] = &["evolution", "output"];

/// Command-line overrides applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub set: Vec<String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub steps: Option<usize>,
    pub v: Option<f64>,
    pub v_list: Option<Vec<f64>>,
}

fn drop_exclusive(base: &mut Table, key: &str) {
    for &(a, b) in EXCLUSIVE {
        if key == a {
            base.remove(b);
        } else if key == b {
            base.remove(a);
        }
    }
}

fn merge_layer(base: &mut Table, layer: Table) {
    for (key, value) in layer {
        drop_exclusive(base, &key);
        match (key.as_str(), value) {
            ("model", Value::Table(model)) => merge_model(base, model),
            (k, Value::Table(inner)) if MERGED_TABLES.contains(&k) => match base.get_mut(k) {
                Some(Value::Table(existing)) => existing.extend(inner),
                _ => {
                    base.insert(key, Value::Table(inner));
                }
            },
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}

/// A layer naming a different variant replaces the model table; otherwise its
/// constants are merged in.
fn merge_model(base: &mut Table, layer: Table) {
    let same_variant = match (
        base.get("model").and_then(|m| m.get("variant")),
        layer.get("variant"),
    ) {
        (_, None) => true,
        (Some(a), Some(b)) => a == b,
        (None, Some(_)) => false,
    };
    match base.get_mut("model") {
        Some(Value::Table(existing)) if same_variant => existing.extend(layer),
        _ => {
            base.insert("model".into(), Value::Table(layer));
        }
    }
}

fn parse_value(raw: &str) -> Value {
    toml::from_str::<Table>(&format!("value = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("value"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

fn model_constant_names(table: &Table) -> Vec<String> {
    let Some(variant) = table
        .get("model")
        .and_then(|m| m.get("variant"))
        .and_then(Value::as_str)
    else {
        return Vec::new();
    };
    ModelRegistry::builtin()
        .get(variant)
        .map(|f| f.constants().iter().map(|c| c.name.to_string()).collect())
        .unwrap_or_default()
}

/// Applies one `key=value` override. Dotted keys address nested tables; a bare
/// key that is not a top-level field but is a constant of the configured model
/// goes into `model`.
pub fn apply_set(table: &mut Table, assignment: &str) -> Result<(), RunError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| RunError::config(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    let mut path: Vec<&str> = key.split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(RunError::config(format!("malformed override key `{key}`")));
    }
    if path.len() == 1
        && !TOP_LEVEL_KEYS.contains(&key)
        && model_constant_names(table).iter().any(|c| c == key)
    {
        path.insert(0, "model");
    }
    let value = parse_value(raw.trim());
    let (last, parents) = path.split_last().expect("path is non-empty");
    let mut node = &mut *table;
    for (depth, part) in parents.iter().enumerate() {
        if depth == 0 {
            drop_exclusive(node, part);
        }
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        node = entry.as_table_mut().ok_or_else(|| {
            RunError::config(format!("`{}` is not a table", path[..=depth].join(".")))
        })?;
    }
    if parents.is_empty() {
        drop_exclusive(node, last);
    }
    node.insert(last.to_string(), value);
    Ok(())
}

/// Parses a TOML document into a table.
pub fn parse_table(text: &str, origin: &str) -> Result<Table, RunError> {
    toml::from_str(text).map_err(|e| RunError::config(format!("{origin}: {e}")))
}

/// Layers `defaults`, the optional file and `overrides` into a validated
/// config for `job`.
pub fn resolve(
    job: &str,
    defaults: Table,
    file: Option<&Path>,
    overrides: &Overrides,
) -> Result<RunConfig, RunError> {
    let mut table = defaults;
    table.insert("job".into(), Value::String(job.to_string()));
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
        let layer = parse_table(&text, &path.display().to_string())?;
        if let Some(named) = layer.get("job") {
            if named.as_str() != Some(job) {
                return Err(RunError::config(format!(
                    "{} is a config for job {named}, not `{job}`",
                    path.display()
                )));
            }
        }
        merge_layer(&mut table, layer);
    }
    for assignment in &overrides.set {
        apply_set(&mut table, assignment)?;
    }
    if table.get("job").and_then(Value::as_str) != Some(job) {
        return Err(RunError::config("`job` is set by the subcommand"));
    }
    let mut config: RunConfig = table
        .try_into()
        .map_err(|e: toml::de::Error| RunError::config(e.to_string().trim().to_string()))?;
    if let Some(path) = &overrides.out {
        config.output.path = Some(path.clone());
    }
    if let Some(format) = overrides.format {
        config.output.format = format;
    }
    if let Some(n) = overrides.steps {
        config.evolution.steps = StepRule::Fixed(n);
    }
    if let Some(v) = overrides.v {
        config.v = Some(v);
        config.velocities = None;
    }
    if let Some(list) = &overrides.v_list {
        config.velocities = Some(list.clone());
        config.v = None;
    }
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Checks that do not need a built model.
    pub fn validate(&self) -> Result<(), RunError> {
        let registry = ModelRegistry::builtin();
        let family = registry.get(&self.model.variant).map_err(|_| {
            RunError::config(format!(
                "unknown model `{}` (known: {})",
                self.model.variant,
                registry.names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        let declared = family.constants();
        if let Some(unknown) = self
            .model
            .constants
            .keys()
            .find(|k| !declared.iter().any(|d| d.name == k.as_str()))
        {
            return Err(RunError::config(format!(
                "unknown constant `{unknown}` for model `{}`",
                self.model.variant
            )));
        }
        let names = family.param_names();
        if self.params.len() != names.len() {
            return Err(RunError::config(format!(
                "model `{}` takes {} parameters ({}), `params` has {}",
                self.model.variant,
                names.len(),
                names.join(", "),
                self.params.len()
            )));
        }
        if self.params.iter().any(|x| !x.is_finite()) {
            return Err(RunError::config("`params` must be finite"));
        }
        for w in &self.which {
            if !names.contains(&w.as_str()) {
                return Err(RunError::config(format!(
                    "`which` names unknown parameter `{w}` (model `{}` has {})",
                    self.model.variant,
                    names.join(", ")
                )));
            }
        }
        if self.delta.is_some() && self.origin.is_some() {
            return Err(RunError::config("set at most one of `delta` and `origin`"));
        }
        if let Some(d) = self.delta {
            if !d.is_finite() || d == 0.0 {
                return Err(RunError::config(format!(
                    "`delta` must be finite and nonzero, got {d}"
                )));
            }
        }
        if self.origin.is_some_and(|o| !o.is_finite()) {
            return Err(RunError::config("`origin` must be finite"));
        }
        match (self.v, &self.velocities) {
            (Some(_), Some(_)) => {
                return Err(RunError::config("set at most one of `v` and `velocities`"))
            }
            (Some(v), None) if !(v > 0.0) || !v.is_finite() => {
                return Err(RunError::config(format!("`v` must be positive, got {v}")))
            }
            (None, Some(list)) => {
                if list.len() < 3 {
                    return Err(RunError::config("`velocities` needs at least 3 values"));
                }
                if list.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                    return Err(RunError::config("`velocities` must be positive and finite"));
                }
                let up = list.windows(2).all(|w| w[0] < w[1]);
                let down = list.windows(2).all(|w| w[0] > w[1]);
                if !up && !down {
                    return Err(RunError::config("`velocities` must be strictly monotone"));
                }
            }
            _ => {}
        }
        if let Some(grid) = &self.grid {
            grid.points()?;
        }
        if self.levels == 0 {
            return Err(RunError::config("`levels` must be at least 1"));
        }
        self.validate_evolution()
    }

    fn validate_evolution(&self) -> Result<(), RunError> {
        let e = &self.evolution;
        match e.steps {
            StepRule::Fixed(n) if n < MIN_STEPS => {
                return Err(RunError::config(format!(
                    "at least {MIN_STEPS} steps are required, got {n}"
                )))
            }
            StepRule::Spectral { phase_per_step } if !(phase_per_step > 0.0) => {
                return Err(RunError::config(format!(
                    "`phase_per_step` must be positive, got {phase_per_step}"
                )))
            }
            _ => {}
        }
        let steppers = StepperRegistry::builtin();
        if e.stepper != "auto" && !steppers.names().any(|n| n == e.stepper) {
            return Err(RunError::config(format!(
                "unknown stepper `{}` (known: auto, {})",
                e.stepper,
                steppers.names().collect::<Vec<_>>().join(", ")
            )));
        }
        if !(e.norm_tol > 0.0) || !(e.convergence_tol > 0.0) {
            return Err(RunError::config("tolerances must be positive"));
        }
        Ok(())
    }

    pub fn param_names(&self) -> Vec<&'static str> {
        ModelRegistry::builtin()
            .get(&self.model.variant)
            .map(|f| f.param_names().to_vec())
            .unwrap_or_default()
    }

    /// Index of a parameter already checked by [`RunConfig::validate`].
    pub fn param_index(&self, name: &str) -> Result<usize, RunError> {
        self.param_names()
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| {
                RunError::config(format!(
                    "model `{}` has no parameter `{name}`",
                    self.model.variant
                ))
            })
    }

    /// Ramp excursion into a target value of the driven parameter.
    pub fn delta_for(&self, target: f64) -> Result<f64, RunError> {
        match (self.delta, self.origin) {
            (Some(d), None) => Ok(d),
            (None, Some(o)) => Ok(target - o),
            _ => Err(RunError::config(format!(
                "job `{}` needs `delta` or `origin`",
                self.job
            ))),
        }
    }
}
