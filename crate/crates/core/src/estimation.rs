//! Visit counts, empirical models and confidence-bonus payoff tables.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::{ln, sqrt};
use crate::model::{Dims, Kernel, StepTable};
use crate::{Error, Result};

/// One step of an episode: `(S_h, A_h, R_h, C_h, S_{h+1})` with noisy
/// observed reward and cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
    pub cost: f64,
    pub next_state: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// 1-based episode index.
    pub episode: usize,
    pub steps: Vec<Step>,
}

impl Trajectory {
    pub fn validate(&self, dims: Dims) -> Result<()> {
        if self.steps.len() != dims.horizon {
            return Err(Error::MalformedTrajectory(format!(
                "{} steps, expected {}",
                self.steps.len(),
                dims.horizon
            )));
        }
        for (h, step) in self.steps.iter().enumerate() {
            if step.state >= dims.states || step.next_state >= dims.states {
                return Err(Error::MalformedTrajectory(format!(
                    "state out of range at step {}",
                    h + 1
                )));
            }
            if step.action >= dims.actions {
                return Err(Error::MalformedTrajectory(format!(
                    "action out of range at step {}",
                    h + 1
                )));
            }
            if !step.reward.is_finite() || !step.cost.is_finite() {
                return Err(Error::MalformedTrajectory(format!(
                    "non-finite observation at step {}",
                    h + 1
                )));
            }
            if let Some(next) = self.steps.get(h + 1) {
                if next.state != step.next_state {
                    return Err(Error::MalformedTrajectory(format!(
                        "step {} does not start where step {} ended",
                        h + 2,
                        h + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Observed cumulative cost `Σ_h C_h`.
    pub fn total_cost(&self) -> f64 {
        self.steps.iter().map(|s| s.cost).sum()
    }

    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|s| s.reward).sum()
    }
}

/// Streaming visit counts and sums. Estimates divide by `N ∨ 1`, so
/// unvisited pairs have an all-zero transition row and zero means.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalModel {
    dims: Dims,
    counts: Vec<u64>,
    transition_counts: Vec<u64>,
    reward_sum: Vec<f64>,
    cost_sum: Vec<f64>,
    episodes: u64,
}

impl EmpiricalModel {
    pub fn new(dims: Dims) -> Self {
        Self {
            dims,
            counts: vec![0; dims.step_len()],
            transition_counts: vec![0; dims.kernel_len()],
            reward_sum: vec![0.0; dims.step_len()],
            cost_sum: vec![0.0; dims.step_len()],
            episodes: 0,
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn episodes(&self) -> u64 {
        self.episodes
    }

    #[inline]
    pub fn count(&self, h: usize, s: usize, a: usize) -> u64 {
        self.counts[self.dims.idx(h, s, a)]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Records one episode. The model is left untouched on error.
    pub fn update_counts(&mut self, trajectory: &Trajectory) -> Result<()> {
        trajectory.validate(self.dims)?;
        for (h, step) in trajectory.steps.iter().enumerate() {
            let i = self.dims.idx(h, step.state, step.action);
            self.counts[i] += 1;
            self.transition_counts[i * self.dims.states + step.next_state] += 1;
            self.reward_sum[i] += step.reward;
            self.cost_sum[i] += step.cost;
        }
        self.episodes += 1;
        Ok(())
    }

    pub fn kernel_hat(&self) -> Kernel {
        let ns = self.dims.states;
        let probs = self
            .transition_counts
            .iter()
            .enumerate()
            .map(|(i, &n)| n as f64 / self.counts[i / ns].max(1) as f64)
            .collect();
        Kernel {
            dims: self.dims,
            probs,
        }
    }

    fn mean(&self, sums: &[f64]) -> StepTable {
        let values = sums
            .iter()
            .zip(&self.counts)
            .map(|(s, &n)| s / n.max(1) as f64)
            .collect();
        StepTable {
            dims: self.dims,
            values,
        }
    }

    pub fn reward_hat(&self) -> StepTable {
        self.mean(&self.reward_sum)
    }

    pub fn cost_hat(&self) -> StepTable {
        self.mean(&self.cost_sum)
    }

    fn radii(&self, z: f64) -> impl Iterator<Item = f64> + '_ {
        self.counts.iter().map(move |&n| confidence_radius(n, z))
    }
}

/// Confidence parameters shared by every bonus: `δ`, `K`, and
/// `Z = ln(16|S|²|A|HK/δ)`.
///
/// `bonus_scale` multiplies the bonus coefficients `α_r` and `1 + H|S|`. It
/// is 1 unless an experiment deliberately shrinks the bonuses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceConfig {
    pub delta: f64,
    pub num_episodes: usize,
    pub z: f64,
    pub bonus_scale: f64,
}

impl ConfidenceConfig {
    pub fn new(dims: Dims, delta: f64, num_episodes: usize) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: format!("{delta} is outside (0, 1)"),
            });
        }
        if num_episodes == 0 {
            return Err(Error::InvalidParameter {
                name: "num_episodes",
                reason: "must be at least 1".into(),
            });
        }
        let (s, a, h) = (dims.states as f64, dims.actions as f64, dims.horizon as f64);
        let z = ln(16.0 * s * s * a * h * num_episodes as f64 / delta);
        Ok(Self {
            delta,
            num_episodes,
            z,
            bonus_scale: 1.0,
        })
    }

    pub fn with_bonus_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "bonus_scale",
                reason: format!("{scale} is outside (0, 1]"),
            });
        }
        self.bonus_scale = scale;
        Ok(self)
    }
}

/// `β = √(z / (n ∨ 1))`.
#[inline]
pub fn confidence_radius(n: u64, z: f64) -> f64 {
    sqrt(z / n.max(1) as f64)
}

/// `α_r = 1 + |S|H + 4H(1 + |S|H) / (τ − c⁰)`.
pub fn scaling_alpha_r(states: usize, horizon: usize, tau: f64, safe_cost: f64) -> Result<f64> {
    if !(safe_cost < tau) {
        return Err(Error::ThresholdNotAboveSafeCost { tau, safe_cost });
    }
    let sh = (states * horizon) as f64;
    let h = horizon as f64;
    Ok(1.0 + sh + 4.0 * h * (1.0 + sh) / (tau - safe_cost))
}

fn transition_coefficient(dims: Dims) -> f64 {
    1.0 + (dims.horizon * dims.states) as f64
}

/// Optimistic reward `r̂ + α_r β` and pessimistic cost `ĉ + (1 + H|S|) β`.
pub fn biased_tables_lp(
    model: &EmpiricalModel,
    cfg: &ConfidenceConfig,
    alpha_r: f64,
) -> (StepTable, StepTable) {
    let reward_bonus = cfg.bonus_scale * alpha_r;
    let cost_bonus = cfg.bonus_scale * transition_coefficient(model.dims);
    let mut reward = model.reward_hat();
    let mut cost = model.cost_hat();
    for ((r, c), beta) in reward
        .values
        .iter_mut()
        .zip(cost.values.iter_mut())
        .zip(model.radii(cfg.z))
    {
        *r += reward_bonus * beta;
        *c += cost_bonus * beta;
    }
    (reward, cost)
}

/// Optimistic reward `r̂ + (1 + H|S|) β` and optimistic cost
/// `ĉ − (1 + H|S|) β`.
pub fn biased_tables_pd(model: &EmpiricalModel, cfg: &ConfidenceConfig) -> (StepTable, StepTable) {
    let bonus = cfg.bonus_scale * transition_coefficient(model.dims);
    let mut reward = model.reward_hat();
    let mut cost = model.cost_hat();
    for ((r, c), beta) in reward
        .values
        .iter_mut()
        .zip(cost.values.iter_mut())
        .zip(model.radii(cfg.z))
    {
        *r += bonus * beta;
        *c -= bonus * beta;
    }
    (reward, cost)
}
