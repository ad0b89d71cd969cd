//! TOML experiment configuration.
//!
//! ```toml
//! environment = "env.json"      # or an inline table with the env-file fields
//! agents = ["optpess_lp", "optpess_pd", "fixed:optimal"]
//! episodes = 2000
//! delta = 0.1
//! seeds = [1, 2, 3]
//! bonus_scale = 1.0
//! output = "results"
//!
//! [noise]
//! kind = "gaussian"
//! sigma = 0.1
//!
//! [c0_mode]
//! kind = "appendix_e"
//! delta2 = 0.1
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use optpess_core::TabularCmdp;
use serde::{Deserialize, Serialize};

use crate::envfile::{EnvironmentFile, SafeBaseline};
use crate::noise::{NoiseConfig, NoiseSpec};
use crate::{io_err, LabError};

pub const DEFAULT_DELTA: f64 = 0.1;
pub const DEFAULT_OUTPUT: &str = "results";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPolicy {
    /// The exact CMDP optimum of the true model.
    Optimal,
    /// The environment's declared safe policy.
    Safe,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentSpec {
    OptPessLp,
    OptPessPd,
    NaiveOptimistic,
    Fixed(FixedPolicy),
}

impl AgentSpec {
    pub fn label(&self) -> &'static str {
        match self {
            AgentSpec::OptPessLp => "optpess_lp",
            AgentSpec::OptPessPd => "optpess_pd",
            AgentSpec::NaiveOptimistic => "naive_optimistic",
            AgentSpec::Fixed(FixedPolicy::Optimal) => "fixed:optimal",
            AgentSpec::Fixed(FixedPolicy::Safe) => "fixed:safe",
            AgentSpec::Fixed(FixedPolicy::Uniform) => "fixed:uniform",
        }
    }

    /// Label usable in a file name.
    pub fn file_stem(&self) -> String {
        self.label().replace(':', "-")
    }

    pub fn needs_safe_policy(&self) -> bool {
        matches!(
            self,
            AgentSpec::OptPessLp | AgentSpec::OptPessPd | AgentSpec::Fixed(FixedPolicy::Safe)
        )
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AgentSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "optpess_lp" => AgentSpec::OptPessLp,
            "optpess_pd" => AgentSpec::OptPessPd,
            "naive_optimistic" => AgentSpec::NaiveOptimistic,
            "fixed:optimal" => AgentSpec::Fixed(FixedPolicy::Optimal),
            "fixed:safe" => AgentSpec::Fixed(FixedPolicy::Safe),
            "fixed:uniform" => AgentSpec::Fixed(FixedPolicy::Uniform),
            other => return Err(format!("unknown agent {other:?}")),
        })
    }
}

/// How the OptPess-LP agent learns `c⁰`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum C0Mode {
    /// Use the environment's declared `safe_cost`.
    Known,
    /// Estimate it by running the safe policy first, with confidence `δ''`.
    AppendixE { delta2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum C0Kind {
    Known,
    AppendixE,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct C0ModeConfig {
    pub kind: C0Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta2: Option<f64>,
}

impl Default for C0ModeConfig {
    fn default() -> Self {
        Self {
            kind: C0Kind::Known,
            delta2: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvironmentSource {
    Path(String),
    Inline(Box<EnvironmentFile>),
}

/// The document as written, before defaults and semantic checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub agents: Vec<String>,
    pub episodes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bonus_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub environment: EnvironmentSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0_mode: Option<C0ModeConfig>,
}

/// A fully resolved, validated experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: TabularCmdp,
    pub safe: Option<SafeBaseline>,
    pub agents: Vec<AgentSpec>,
    pub episodes: usize,
    pub delta: f64,
    pub seeds: Vec<u64>,
    pub noise: NoiseSpec,
    pub c0_mode: C0Mode,
    pub bonus_scale: f64,
    pub output: PathBuf,
    /// The input with every default filled in, as TOML.
    pub resolved_text: String,
}

/// Strict TOML parse; unknown keys are rejected with their location.
pub fn parse_config(text: &str) -> Result<RawConfig, LabError> {
    toml::from_str(text).map_err(|e| LabError::Config(format!("config parse error: {e}")))
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, LabError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config(&text)?.resolve(base)
}

impl RawConfig {
    /// Applies defaults, loads the environment (relative paths against
    /// `base_dir`) and runs the semantic checks.
    pub fn resolve(&self, base_dir: &Path) -> Result<ExperimentConfig, LabError> {
        let delta = self.delta.unwrap_or(DEFAULT_DELTA);
        if !(delta > 0.0 && delta < 1.0) {
            return Err(LabError::Config(format!("delta = {delta} must lie in (0, 1)")));
        }
        if self.episodes == 0 {
            return Err(LabError::Config("episodes must be at least 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(LabError::Config("seeds must not be empty".into()));
        }
        let bonus_scale = self.bonus_scale.unwrap_or(1.0);
        if !(bonus_scale > 0.0 && bonus_scale <= 1.0) {
            return Err(LabError::Config(format!(
                "bonus_scale = {bonus_scale} must lie in (0, 1]"
            )));
        }
        if self.agents.is_empty() {
            return Err(LabError::Config("agents must not be empty".into()));
        }
        let agents = self
            .agents
            .iter()
            .map(|a| a.parse::<AgentSpec>().map_err(LabError::Config))
            .collect::<Result<Vec<_>, _>>()?;

        let noise_cfg = self.noise.clone().unwrap_or_else(|| NoiseSpec::default().into());
        let noise = noise_cfg.resolve()?;
        let c0_cfg = self.c0_mode.clone().unwrap_or_default();
        let c0_mode = match c0_cfg.kind {
            C0Kind::Known => {
                if c0_cfg.delta2.is_some() {
                    return Err(LabError::Config(
                        "c0_mode.delta2 only applies to kind = \"appendix_e\"".into(),
                    ));
                }
                C0Mode::Known
            }
            C0Kind::AppendixE => {
                let delta2 = c0_cfg.delta2.unwrap_or(delta);
                if !(delta2 > 0.0 && delta2 < 1.0) {
                    return Err(LabError::Config(format!(
                        "c0_mode.delta2 = {delta2} must lie in (0, 1)"
                    )));
                }
                C0Mode::AppendixE { delta2 }
            }
        };

        let env = match &self.environment {
            EnvironmentSource::Path(p) => EnvironmentFile::read(&base_dir.join(p))?,
            EnvironmentSource::Inline(env) => (**env).clone(),
        };
        let model = env.to_model()?;
        let safe = env.safe_baseline(&model)?;
        if safe.is_none() {
            let needy = agents.iter().find(|a| a.needs_safe_policy()).map(|a| a.label());
            let needy = needy.or(match c0_mode {
                C0Mode::AppendixE { .. } => Some("c0_mode = appendix_e"),
                C0Mode::Known => None,
            });
            if let Some(who) = needy {
                return Err(LabError::Config(format!(
                    "safe policy required by {who}: the environment declares no safe_policy/safe_cost"
                )));
            }
        }

        let output = self.output.clone().unwrap_or_else(|| DEFAULT_OUTPUT.to_string());
        let resolved = RawConfig {
            agents: self.agents.clone(),
            episodes: self.episodes,
            delta: Some(delta),
            seeds: self.seeds.clone(),
            bonus_scale: Some(bonus_scale),
            output: Some(output.clone()),
            environment: self.environment.clone(),
            noise: Some(noise.into()),
            c0_mode: Some(match c0_mode {
                C0Mode::Known => C0ModeConfig::default(),
                C0Mode::AppendixE { delta2 } => C0ModeConfig {
                    kind: C0Kind::AppendixE,
                    delta2: Some(delta2),
                },
            }),
        };
        let resolved_text = toml::to_string(&resolved)
            .map_err(|e| LabError::Config(format!("cannot echo resolved config: {e}")))?;

        Ok(ExperimentConfig {
            model,
            safe,
            agents,
            episodes: self.episodes,
            delta,
            seeds: self.seeds.clone(),
            noise,
            c0_mode,
            bonus_scale,
            output: base_dir.join(output),
            resolved_text,
        })
    }
}
