//! Run configuration: JSON files, built-in defaults and dotted-path overrides.

use std::path::{Path, PathBuf};

use hetssd::distributions::PriorSpec;
use hetssd::ssd::{CostSpec, SearchConfig, SimSizes, SsdPriors, SsdTarget};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub analysis_prior: PriorSpec,
    pub design_prior: PriorSpec,
    /// Analysis-prior Monte Carlo size.
    pub s: usize,
    /// Predictive replicates per model.
    pub t_count: usize,
    pub seed: u64,
    pub m_values: Vec<u32>,
    pub target: SsdTarget,
    #[serde(default)]
    pub cost: Option<CostSpec>,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub output: OutputSpec,
}

impl RunConfig {
    /// Standard settings: Half-t(4, 1/7) analysis prior, Folded-t(4, 0.2, 1/55)
    /// design prior, S = 10 000, T = 50 000, m = 3..=17, conditional target
    /// with power 0.8 at alpha 0.01.
    pub fn standard() -> Self {
        let sizes = SimSizes::FULL;
        RunConfig {
            analysis_prior: PriorSpec::default_analysis(),
            design_prior: PriorSpec::default_design(),
            s: sizes.s,
            t_count: sizes.t,
            seed: DEFAULT_SEED,
            m_values: (3..=17).collect(),
            target: SsdTarget::conditional(0.8, 0.01),
            cost: None,
            search: SearchConfig::default(),
            output: OutputSpec::default(),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let field = |name: &str, e: hetssd::Error| CliError::config(format!("{name}: {e}"));
        self.analysis_prior.build().map_err(|e| field("analysis_prior", e))?;
        self.design_prior.build().map_err(|e| field("design_prior", e))?;
        if self.s < 100 {
            return Err(CliError::config(format!("s must be at least 100, got {}", self.s)));
        }
        if self.t_count < 100 {
            return Err(CliError::config(format!("t_count must be at least 100, got {}", self.t_count)));
        }
        if self.m_values.is_empty() {
            return Err(CliError::config("m_values must not be empty"));
        }
        if let Some(m) = self.m_values.iter().find(|&&m| m < 3) {
            return Err(CliError::config(format!("m_values: every m must be at least 3, got {m}")));
        }
        self.target.validate().map_err(|e| field("target", e))?;
        if let Some(c) = &self.cost {
            c.validate().map_err(|e| field("cost", e))?;
        }
        if self.search.n_init == 0 || self.search.n_max < self.search.n_init {
            return Err(CliError::config("search: need 1 <= n_init <= n_max"));
        }
        Ok(())
    }

    pub fn priors(&self) -> SsdPriors {
        SsdPriors {
            analysis: self.analysis_prior,
            design: self.design_prior,
        }
    }

    pub fn sizes(&self) -> SimSizes {
        SimSizes {
            s: self.s,
            t: self.t_count,
        }
    }
}

/// Recursively merges `top` into `base`; objects merge key by key, anything
/// else replaces.
pub fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Applies `key.path=value`. The value is read as JSON when it parses,
/// otherwise as a plain string. Missing objects along the path are created.
pub fn apply_override(root: &mut Value, spec: &str) -> CliResult<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::config(format!("override `{spec}` is not KEY=VAL")))?;
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(CliError::config(format!("override `{spec}` has an empty key segment")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    for seg in key.split('.') {
        node = match node {
            Value::Array(items) => {
                let i: usize = seg
                    .parse()
                    .map_err(|_| CliError::config(format!("override `{key}`: `{seg}` is not an array index")))?;
                let len = items.len();
                items
                    .get_mut(i)
                    .ok_or_else(|| CliError::config(format!("override `{key}`: index {i} out of range ({len})")))?
            }
            other => {
                if !other.is_object() {
                    *other = Value::Object(Map::new());
                }
                other
                    .as_object_mut()
                    .expect("object")
                    .entry(seg)
                    .or_insert(Value::Null)
            }
        };
    }
    *node = value;
    Ok(())
}

/// Parses `3..17` (inclusive), `3..=17`, `3,5,8` or a single value.
pub fn parse_m_values(s: &str) -> Result<Vec<u32>, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("`{t}`: {e}"));
    let out: Vec<u32> = if let Some((a, b)) = s.split_once("..") {
        let (lo, hi) = (num(a)?, num(b.trim_start_matches('='))?);
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        (lo..=hi).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if out.is_empty() {
        return Err("no values".into());
    }
    Ok(out)
}

/// Inputs that decide the configuration of a run.
#[derive(Debug, Clone, Default)]
pub struct ConfigSources<'a> {
    pub file: Option<&'a Path>,
    pub standard_defaults: bool,
    pub overrides: &'a [String],
    pub seed: Option<u64>,
    pub m_values: Option<Vec<u32>>,
}

/// Builds the run configuration. Defaults apply when `--paper-defaults` is
/// given or when no file is given at all; file values sit on top of them,
/// then overrides, then the dedicated flags.
pub fn load(src: &ConfigSources) -> CliResult<RunConfig> {
    let mut root = if src.standard_defaults || src.file.is_none() {
        serde_json::to_value(RunConfig::standard()).expect("defaults serialize")
    } else {
        Value::Object(Map::new())
    };
    if let Some(path) = src.file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let file: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        if !file.is_object() {
            return Err(CliError::config(format!("{}: top level must be an object", path.display())));
        }
        merge(&mut root, file);
    }
    for o in src.overrides {
        apply_override(&mut root, o)?;
    }
    if let Some(seed) = src.seed {
        root["seed"] = seed.into();
    }
    if let Some(ms) = &src.m_values {
        root["m_values"] = serde_json::to_value(ms).expect("m values serialize");
    }
    let cfg: RunConfig = serde_path_to_error::deserialize(root).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            CliError::config(e.inner().to_string())
        } else {
            CliError::config(format!("{path}: {}", e.inner()))
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}
