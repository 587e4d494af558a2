use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::env::{load_trace, BernoulliEnv, Environment, GroupedEnv, TraceSchema};
use crate::error::{Error, Result};
use crate::policy::{FeasibleFamily, PolicyConfig, PolicyKind};

pub const DEFAULT_RECORD_INTERVAL: u64 = 100;

fn default_record_interval() -> u64 {
    DEFAULT_RECORD_INTERVAL
}

/// Where rewards come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EnvironmentSpec {
    Bernoulli { mu: Vec<f64> },
    Grouped { mu: Vec<Vec<f64>> },
    TraceFlat { path: PathBuf },
    TraceSnr { path: PathBuf, rate_table: Vec<f64> },
}

impl EnvironmentSpec {
    pub fn build(&self) -> Result<Environment> {
        Ok(match self {
            EnvironmentSpec::Bernoulli { mu } => Environment::Bernoulli(BernoulliEnv::new(mu.clone())?),
            EnvironmentSpec::Grouped { mu } => Environment::Grouped(GroupedEnv::new(mu.clone())?),
            EnvironmentSpec::TraceFlat { path } => Environment::Trace(load_trace(path, &TraceSchema::Flat)?),
            EnvironmentSpec::TraceSnr { path, rate_table } => Environment::Trace(load_trace(
                path,
                &TraceSchema::Snr {
                    rate_table: rate_table.clone(),
                },
            )?),
        })
    }

    fn resolve_against(&mut self, dir: &Path) {
        if let EnvironmentSpec::TraceFlat { path } | EnvironmentSpec::TraceSnr { path, .. } = self {
            if path.is_relative() {
                *path = dir.join(&*path);
            }
        }
    }
}

/// A complete experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub environment: EnvironmentSpec,
    pub family: FeasibleFamily,
    pub policy: PolicyConfig,
    pub horizon: u64,
    pub seeds: Vec<u64>,
    #[serde(default = "default_record_interval")]
    pub record_interval: u64,
    /// Tightness at which the regret benchmark LP is solved.
    pub benchmark_delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Reads a JSON config; relative trace paths are taken relative to the file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_json(&text)?;
        if let Some(dir) = path.parent() {
            config.environment.resolve_against(dir);
        }
        Ok(config)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Shape checks that need no file access.
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be at least 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidParameter("at least one seed is required".into()));
        }
        if self.record_interval == 0 {
            return Err(Error::InvalidParameter("record_interval must be at least 1".into()));
        }
        if !(self.benchmark_delta >= 0.0 && self.benchmark_delta.is_finite()) {
            return Err(Error::InvalidParameter("benchmark_delta must be >= 0".into()));
        }
        self.policy.validate()
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn with_horizon(mut self, horizon: u64) -> Self {
        self.horizon = horizon;
        self
    }
}

/// Parameter a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Alpha,
    Beta,
    Epsilon,
    Kind,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(SweepAxis::Alpha),
            "beta" => Ok(SweepAxis::Beta),
            "epsilon" => Ok(SweepAxis::Epsilon),
            "kind" | "policy" => Ok(SweepAxis::Kind),
            other => Err(Error::InvalidParameter(format!("unknown sweep axis `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    Number(f64),
    Kind(PolicyKind),
}

impl std::fmt::Display for SweepValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepValue::Number(x) => write!(f, "{x}"),
            SweepValue::Kind(k) => f.write_str(k.name()),
        }
    }
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Alpha => "alpha",
            SweepAxis::Beta => "beta",
            SweepAxis::Epsilon => "epsilon",
            SweepAxis::Kind => "kind",
        }
    }

    /// Parses one command-line value for this axis.
    pub fn parse_value(self, raw: &str) -> Result<SweepValue> {
        let raw = raw.trim();
        match self {
            SweepAxis::Kind => raw.parse().map(SweepValue::Kind),
            _ => raw
                .parse::<f64>()
                .map(SweepValue::Number)
                .map_err(|_| Error::InvalidParameter(format!("`{raw}` is not a number"))),
        }
    }

    pub fn apply(self, base: &RunConfig, value: &SweepValue) -> Result<RunConfig> {
        let mut c = base.clone();
        match (self, value) {
            (SweepAxis::Alpha, SweepValue::Number(x)) => c.policy.alpha = *x,
            (SweepAxis::Beta, SweepValue::Number(x)) => c.policy.beta = *x,
            (SweepAxis::Epsilon, SweepValue::Number(x)) => c.policy.fairness.epsilon = *x,
            (SweepAxis::Kind, SweepValue::Kind(k)) => c.policy.kind = *k,
            (axis, v) => {
                return Err(Error::InvalidParameter(format!(
                    "value `{v}` does not fit sweep axis {}",
                    axis.name()
                )))
            }
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub axis: SweepAxis,
    pub values: Vec<SweepValue>,
}

impl SweepConfig {
    pub fn new(base: RunConfig, axis: SweepAxis, values: Vec<SweepValue>) -> Self {
        Self { base, axis, values }
    }

    pub fn numeric(base: RunConfig, axis: SweepAxis, values: &[f64]) -> Self {
        Self::new(base, axis, values.iter().map(|&v| SweepValue::Number(v)).collect())
    }

    pub fn points(&self) -> Result<Vec<RunConfig>> {
        if self.values.is_empty() {
            return Err(Error::InvalidParameter("sweep needs at least one value".into()));
        }
        self.values.iter().map(|v| self.axis.apply(&self.base, v)).collect()
    }
}
