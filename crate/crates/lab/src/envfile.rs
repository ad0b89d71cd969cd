//! JSON environment documents.
//!
//! Arrays are flat and step-major: transitions are indexed `(h, s, a, s')`,
//! payoffs and the optional safe policy `(h, s, a)`.

use std::path::Path;

use optpess_core::{evaluate_policy, Dims, Kernel, MarkovPolicy, StepTable, TabularCmdp};
use serde::{Deserialize, Serialize};

use crate::{io_err, LabError};

/// Slack allowed between a declared safe cost and its exact value.
pub const SAFE_COST_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentFile {
    pub num_states: usize,
    pub num_actions: usize,
    pub horizon: usize,
    pub transitions: Vec<f64>,
    pub reward: Vec<f64>,
    pub cost: Vec<f64>,
    pub initial_dist: Vec<f64>,
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub safe_policy: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub safe_cost: Option<f64>,
}

/// A strictly safe policy together with the cost bound `c⁰` agents are told.
#[derive(Debug, Clone, PartialEq)]
pub struct SafeBaseline {
    pub policy: MarkovPolicy,
    pub cost_bound: f64,
}

impl EnvironmentFile {
    pub fn from_model(model: &TabularCmdp, safe: Option<&SafeBaseline>) -> Self {
        Self {
            num_states: model.dims.states,
            num_actions: model.dims.actions,
            horizon: model.dims.horizon,
            transitions: model.transitions.probs.clone(),
            reward: model.reward.values.clone(),
            cost: model.cost.values.clone(),
            initial_dist: model.initial_dist.clone(),
            threshold: model.threshold,
            safe_policy: safe.map(|b| b.policy.probs.clone()),
            safe_cost: safe.map(|b| b.cost_bound),
        }
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.num_states, self.num_actions, self.horizon)
    }

    /// Builds the model without validating it, so broken files can still be
    /// diagnosed. Only array lengths are checked here.
    pub fn to_model_unchecked(&self) -> Result<TabularCmdp, LabError> {
        let dims = self.dims();
        let transitions = Kernel::from_vec(dims, self.transitions.clone())?;
        let reward = StepTable::from_vec(dims, self.reward.clone())?;
        let cost = StepTable::from_vec(dims, self.cost.clone())?;
        Ok(TabularCmdp {
            dims,
            transitions,
            reward,
            cost,
            threshold: self.threshold,
            initial_dist: self.initial_dist.clone(),
        })
    }

    pub fn to_model(&self) -> Result<TabularCmdp, LabError> {
        let model = self.to_model_unchecked()?;
        let violations = model.validate();
        if !violations.is_empty() {
            return Err(LabError::InvalidModel(violations));
        }
        Ok(model)
    }

    /// The declared safe baseline, checked against the model: the policy
    /// must be a valid table and `c⁰` may not understate its exact cost.
    pub fn safe_baseline(&self, model: &TabularCmdp) -> Result<Option<SafeBaseline>, LabError> {
        let (probs, cost_bound) = match (&self.safe_policy, self.safe_cost) {
            (None, None) => return Ok(None),
            (Some(p), Some(c)) => (p, c),
            _ => {
                return Err(LabError::EnvFile(
                    "safe_policy and safe_cost must be given together".into(),
                ))
            }
        };
        let policy = MarkovPolicy::from_probs(model.dims, probs.clone())?;
        let exact = evaluate_policy(&model.transitions, &model.cost, &policy, &model.initial_dist)?
            .initial_value;
        if cost_bound < exact - SAFE_COST_SLACK {
            return Err(LabError::EnvFile(format!(
                "declared safe_cost {cost_bound} is below the policy's exact cost {exact}"
            )));
        }
        Ok(Some(SafeBaseline { policy, cost_bound }))
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("plain data serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::EnvFile(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text).map_err(|e| match e {
            LabError::EnvFile(msg) => LabError::EnvFile(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), LabError> {
        std::fs::write(path, self.to_json()).map_err(io_err(path))
    }
}
