//! JSON experiment configs for the batch front-end.
//!
//! Every config is a single object tagged by `command` and carrying
//! `schema_version`. Unknown keys are rejected. Parsing then serializing a
//! config yields its canonical form, which is a fixed point.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::PulseSequence;
use crate::nogo::{OptimizationTask, DEFAULT_NOGO_PHASE_TOL};
use crate::observables::Variant;
use crate::optics::NsSearchConfig;
use crate::sector::{AtomNumber, DickeModel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{message} at line {line}, column {column}")]
    Parse {
        message: String,
        line: usize,
        column: usize,
    },
    #[error("schema_version {found} is not supported (expected {SCHEMA_VERSION})")]
    SchemaVersion { found: u32 },
    #[error("config is for `{found}`, not `{expected}`")]
    WrongCommand { expected: String, found: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    Evolve(EvolveConfig),
    Tradeoff(TradeoffConfig),
    NogoCert(NogoCertConfig),
    Scaling(ScalingConfig),
    Bs(BsConfig),
    Ns(NsConfig),
}

/// Optimizer settings shared by `tradeoff` and `nogo-cert`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSettings {
    pub n_segments: usize,
    pub coupling_bound: f64,
    pub duration_bound: f64,
    pub seed: u64,
    pub restarts: usize,
    pub feasibility_tol: f64,
    pub evals_per_stage: usize,
    pub drive_phases: bool,
}

impl Default for SearchSettings {
    fn default() -> Self {
        let t = OptimizationTask::new(DickeModel::bosonic(), Variant::TwoMode, 0.0);
        SearchSettings {
            n_segments: t.n_segments,
            coupling_bound: t.coupling_bound,
            duration_bound: t.duration_bound,
            seed: t.seed,
            restarts: t.restarts,
            feasibility_tol: t.feasibility_tol,
            evals_per_stage: t.evals_per_stage,
            drive_phases: t.drive_phases,
        }
    }
}

impl SearchSettings {
    pub fn task(&self, model: DickeModel, variant: Variant, loss_budget: f64) -> OptimizationTask {
        OptimizationTask {
            model,
            variant,
            n_segments: self.n_segments,
            coupling_bound: self.coupling_bound,
            duration_bound: self.duration_bound,
            loss_budget,
            seed: self.seed,
            restarts: self.restarts,
            feasibility_tol: self.feasibility_tol,
            evals_per_stage: self.evals_per_stage,
            drive_phases: self.drive_phases,
        }
    }
}

fn two_mode() -> Variant {
    Variant::TwoMode
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub schema_version: u32,
    pub model: DickeModel,
    #[serde(default = "two_mode")]
    pub variant: Variant,
    pub sequence: PulseSequence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TradeoffConfig {
    pub schema_version: u32,
    pub model: DickeModel,
    #[serde(default = "two_mode")]
    pub variant: Variant,
    pub budgets: Vec<f64>,
    #[serde(default)]
    pub search: SearchSettings,
}

fn default_models() -> Vec<AtomNumber> {
    vec![
        AtomNumber::Finite(2),
        AtomNumber::Finite(4),
        AtomNumber::Finite(8),
        AtomNumber::Bosonic,
    ]
}

fn both_variants() -> Vec<Variant> {
    vec![Variant::TwoMode, Variant::OneMode]
}

fn default_cert_budget() -> f64 {
    0.0
}

fn default_cert_tol() -> f64 {
    DEFAULT_NOGO_PHASE_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NogoCertConfig {
    pub schema_version: u32,
    #[serde(default = "default_models")]
    pub models: Vec<AtomNumber>,
    #[serde(default = "both_variants")]
    pub variants: Vec<Variant>,
    #[serde(default = "default_cert_budget")]
    pub loss_budget: f64,
    #[serde(default = "default_cert_tol")]
    pub phase_tol: f64,
    #[serde(default)]
    pub search: SearchSettings,
}

fn default_scaling_n() -> Vec<usize> {
    vec![1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024]
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub schema_version: u32,
    #[serde(default = "default_scaling_n")]
    pub n_values: Vec<usize>,
    #[serde(default = "unit")]
    pub eps: f64,
}

fn half() -> [f64; 2] {
    [0.5, 0.0]
}

fn default_d_steps() -> usize {
    11
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BsConfig {
    pub schema_version: u32,
    /// `[re, im]` of the transmission amplitude.
    #[serde(default = "half")]
    pub t: [f64; 2],
    /// `[re, im]` of the reflection amplitude.
    #[serde(default = "half")]
    pub r: [f64; 2],
    /// Number of evenly spaced distinguishability values in `[0, 1]`.
    #[serde(default = "default_d_steps")]
    pub d_steps: usize,
}

fn default_ns_restarts() -> usize {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NsConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_ns_restarts")]
    pub restarts: usize,
    #[serde(default = "NsConfig::default_evals")]
    pub evals_per_stage: usize,
    #[serde(default = "NsConfig::default_infidelity")]
    pub infidelity_tol: f64,
}

impl NsConfig {
    fn default_evals() -> usize {
        NsSearchConfig::new(0, 1).evals_per_stage
    }

    fn default_infidelity() -> f64 {
        NsSearchConfig::new(0, 1).infidelity_tol
    }

    pub fn search(&self) -> NsSearchConfig {
        NsSearchConfig {
            seed: self.seed,
            restarts: self.restarts,
            evals_per_stage: self.evals_per_stage,
            infidelity_tol: self.infidelity_tol,
        }
    }
}

impl ExperimentConfig {
    pub fn command(&self) -> &'static str {
        match self {
            ExperimentConfig::Evolve(_) => "evolve",
            ExperimentConfig::Tradeoff(_) => "tradeoff",
            ExperimentConfig::NogoCert(_) => "nogo-cert",
            ExperimentConfig::Scaling(_) => "scaling",
            ExperimentConfig::Bs(_) => "bs",
            ExperimentConfig::Ns(_) => "ns",
        }
    }

    pub fn schema_version(&self) -> u32 {
        match self {
            ExperimentConfig::Evolve(c) => c.schema_version,
            ExperimentConfig::Tradeoff(c) => c.schema_version,
            ExperimentConfig::NogoCert(c) => c.schema_version,
            ExperimentConfig::Scaling(c) => c.schema_version,
            ExperimentConfig::Bs(c) => c.schema_version,
            ExperimentConfig::Ns(c) => c.schema_version,
        }
    }

    /// Seed used by stochastic commands, if any.
    pub fn seed(&self) -> Option<u64> {
        match self {
            ExperimentConfig::Tradeoff(c) => Some(c.search.seed),
            ExperimentConfig::NogoCert(c) => Some(c.search.seed),
            ExperimentConfig::Ns(c) => Some(c.seed),
            _ => None,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            ExperimentConfig::Tradeoff(c) => c.search.seed = seed,
            ExperimentConfig::NogoCert(c) => c.search.seed = seed,
            ExperimentConfig::Ns(c) => c.seed = seed,
            _ => {}
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let found = self.schema_version();
        if found != SCHEMA_VERSION {
            return Err(ConfigError::SchemaVersion { found });
        }
        let invalid = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        match self {
            ExperimentConfig::Evolve(_) => {}
            ExperimentConfig::Tradeoff(c) => {
                if c.budgets.is_empty() {
                    return invalid("budgets must not be empty");
                }
                c.search
                    .task(c.model.clone(), c.variant, c.budgets[0])
                    .validate()
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
            }
            ExperimentConfig::NogoCert(c) => {
                if c.models.is_empty() || c.variants.is_empty() {
                    return invalid("models and variants must not be empty");
                }
                c.search
                    .task(DickeModel::bosonic(), Variant::TwoMode, c.loss_budget)
                    .validate()
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
            }
            ExperimentConfig::Scaling(c) => {
                if c.n_values.contains(&0) {
                    return invalid("n_values must be positive");
                }
            }
            ExperimentConfig::Bs(c) => {
                if c.d_steps < 2 {
                    return invalid("d_steps must be at least 2");
                }
            }
            ExperimentConfig::Ns(c) => {
                if c.restarts == 0 {
                    return invalid("restarts must be positive");
                }
            }
        }
        Ok(())
    }
}

impl Default for NogoCertConfig {
    fn default() -> Self {
        NogoCertConfig {
            schema_version: SCHEMA_VERSION,
            models: default_models(),
            variants: both_variants(),
            loss_budget: default_cert_budget(),
            phase_tol: default_cert_tol(),
            search: SearchSettings::default(),
        }
    }
}

/// Typed parse; errors carry the line and column of the offending token.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        message: strip_position(&e.to_string()),
        line: e.line(),
        column: e.column(),
    })?;
    let config = ExperimentConfig::deserialize(value).map_err(|e| {
        let message = e.to_string();
        match offending_key(&message).and_then(|k| locate_key(text, k)) {
            Some((line, column)) => ConfigError::Parse { message, line, column },
            None => ConfigError::Invalid(message),
        }
    })?;
    config.validate()?;
    Ok(config)
}

fn strip_position(message: &str) -> String {
    message.split(" at line ").next().unwrap_or_default().to_string()
}

fn offending_key(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("unknown field `")?;
    rest.split('`').next()
}

/// 1-based line and column of the first `"key":` in `text`.
fn locate_key(text: &str, key: &str) -> Option<(usize, usize)> {
    let needle = format!("\"{key}\"");
    let mut from = 0;
    while let Some(pos) = text[from..].find(&needle) {
        let at = from + pos;
        let after = text[at + needle.len()..].trim_start();
        if after.starts_with(':') {
            let before = &text[..at];
            let line = before.matches('\n').count() + 1;
            let column = at - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            return Some((line, column));
        }
        from = at + needle.len();
    }
    None
}

/// Canonical text: pretty-printed with two-space indent and a trailing newline.
pub fn to_canonical(config: &ExperimentConfig) -> String {
    let mut s = serde_json::to_string_pretty(config).expect("config serializes");
    s.push('\n');
    s
}

pub fn canonicalize(text: &str) -> Result<String, ConfigError> {
    parse_config(text).map(|c| to_canonical(&c))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"command":"evolve","schema_version":1,"model":{"n_atoms":2},"sequence":{"segments":[]}}"#;

    #[test]
    fn canonical_is_fixed_point() {
        let once = canonicalize(MINIMAL).unwrap();
        let twice = canonicalize(&once).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn key_order_does_not_matter() {
        let shuffled = r#"{"sequence":{"segments":[]},"model":{"n_atoms":2},"schema_version":1,"command":"evolve"}"#;
        assert_eq!(canonicalize(MINIMAL).unwrap(), canonicalize(shuffled).unwrap());
    }

    #[test]
    fn unknown_key_is_named() {
        let text = r#"{"command":"scaling","schema_version":1,"epsilon":2.0}"#;
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("epsilon"), "{err}");
        assert!(matches!(err, ConfigError::Parse { line: 1, column: 41, .. }), "{err:?}");
    }

    #[test]
    fn truncated_json_has_position() {
        let err = parse_config(&MINIMAL[..40]).unwrap_err();
        match err {
            ConfigError::Parse { line, column, .. } => assert!(line == 1 && column > 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schema_version_checked() {
        let text = r#"{"command":"scaling","schema_version":7}"#;
        assert_eq!(parse_config(text).unwrap_err(), ConfigError::SchemaVersion { found: 7 });
    }

    #[test]
    fn infinite_atom_number() {
        let text = r#"{"command":"nogo-cert","schema_version":1,"models":[2,"inf"]}"#;
        let ExperimentConfig::NogoCert(c) = parse_config(text).unwrap() else {
            panic!()
        };
        assert_eq!(c.models, vec![AtomNumber::Finite(2), AtomNumber::Bosonic]);
        assert_eq!(c.variants.len(), 2);
    }

    #[test]
    fn seed_override() {
        let mut c = parse_config(r#"{"command":"ns","schema_version":1}"#).unwrap();
        c.set_seed(42);
        assert_eq!(c.seed(), Some(42));
        let mut s = parse_config(r#"{"command":"scaling","schema_version":1}"#).unwrap();
        s.set_seed(42);
        assert_eq!(s.seed(), None);
    }
}
