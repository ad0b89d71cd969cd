//! Zero-violation agent: optimistic reward, pessimistic cost, LP over the
//! pessimistically safe policy set.

use alloc::format;
use alloc::vec::Vec;

use crate::agent::{Branch, Diagnostics, EpisodicAgent};
use crate::estimation::{biased_tables_lp, scaling_alpha_r, ConfidenceConfig, EmpiricalModel, Trajectory};
use crate::eval::evaluate_policy;
use crate::lp::{build_occupancy_lp, occupancy_to_policy, solve_lp, LpStatus};
use crate::model::{Dims, Kernel, MarkovPolicy, StepTable};
use crate::{Error, Result};

/// Biased tables for the current counts.
#[derive(Debug, Clone)]
struct EpisodeTables {
    kernel: Kernel,
    reward: StepTable,
    cost: StepTable,
}

#[derive(Debug, Clone)]
pub struct OptPessLpAgent {
    empirical: EmpiricalModel,
    cfg: ConfidenceConfig,
    mu: Vec<f64>,
    tau: f64,
    safe_policy: MarkovPolicy,
    safe_cost_bound: f64,
    alpha_r: f64,
    tables: Option<EpisodeTables>,
    last_branch: Option<Branch>,
    last_lp_status: Option<LpStatus>,
}

impl OptPessLpAgent {
    /// `safe_cost_bound` is `c⁰`, or any upper bound on the safe policy's
    /// true cost that stays below `tau`.
    pub fn new(
        dims: Dims,
        mu: Vec<f64>,
        tau: f64,
        safe_policy: MarkovPolicy,
        safe_cost_bound: f64,
        cfg: ConfidenceConfig,
    ) -> Result<Self> {
        dims.ensure_eq(&safe_policy.dims, "safe policy")?;
        if mu.len() != dims.states {
            return Err(Error::DimensionMismatch {
                what: "initial distribution",
                expected: dims.states,
                found: mu.len(),
            });
        }
        if let Some((h, s)) = safe_policy.first_invalid_row() {
            return Err(Error::InvalidParameter {
                name: "safe_policy",
                reason: format!("row (h={}, s={s}) is not a distribution", h + 1),
            });
        }
        let alpha_r = scaling_alpha_r(dims.states, dims.horizon, tau, safe_cost_bound)?;
        Ok(Self {
            empirical: EmpiricalModel::new(dims),
            cfg,
            mu,
            tau,
            safe_policy,
            safe_cost_bound,
            alpha_r,
            tables: None,
            last_branch: None,
            last_lp_status: None,
        })
    }

    pub fn empirical(&self) -> &EmpiricalModel {
        &self.empirical
    }

    pub fn alpha_r(&self) -> f64 {
        self.alpha_r
    }

    pub fn safe_cost_bound(&self) -> f64 {
        self.safe_cost_bound
    }

    pub fn last_branch(&self) -> Option<Branch> {
        self.last_branch
    }

    /// Recomputes the biased tables once per episode; counts only change
    /// between episodes.
    fn refresh(&mut self) -> &EpisodeTables {
        if self.tables.is_none() {
            let (reward, cost) = biased_tables_lp(&self.empirical, &self.cfg, self.alpha_r);
            self.tables = Some(EpisodeTables {
                kernel: self.empirical.kernel_hat(),
                reward,
                cost,
            });
        }
        self.tables.as_ref().expect("just filled")
    }

    fn evaluate_current(&mut self, policy: &MarkovPolicy, reward: bool) -> Result<f64> {
        self.refresh();
        let t = self.tables.as_ref().expect("refreshed");
        let payoff = if reward { &t.reward } else { &t.cost };
        Ok(evaluate_policy(&t.kernel, payoff, policy, &self.mu)?.initial_value)
    }

    /// Pessimistic cost of the safe policy, `V_1^{π⁰}(μ; c̲, P̂)`.
    pub fn safe_policy_pessimistic_cost(&mut self) -> Result<f64> {
        let safe = self.safe_policy.clone();
        self.evaluate_current(&safe, false)
    }

    /// Singleton iff the safe policy's pessimistic cost is at least
    /// `(τ + c⁰)/2`.
    pub fn policy_set_branch(&mut self) -> Result<Branch> {
        let pessimistic = self.safe_policy_pessimistic_cost()?;
        Ok(branch_for(pessimistic, self.tau, self.safe_cost_bound))
    }

    /// Pessimistic cost `V_1^π(μ; c̲, P̂)` of any policy under the current
    /// tables.
    pub fn pessimistic_cost(&mut self, policy: &MarkovPolicy) -> Result<f64> {
        self.evaluate_current(policy, false)
    }

    /// Optimistic reward `V_1^π(μ; r̄, P̂)` under the current tables.
    pub fn optimistic_reward(&mut self, policy: &MarkovPolicy) -> Result<f64> {
        self.evaluate_current(policy, true)
    }
}

/// Branch rule of the pessimistically safe set; equality stays singleton.
pub(crate) fn branch_for(pessimistic_safe_cost: f64, tau: f64, safe_cost_bound: f64) -> Branch {
    if pessimistic_safe_cost >= (tau + safe_cost_bound) / 2.0 {
        Branch::Singleton
    } else {
        Branch::LpSet
    }
}

impl EpisodicAgent for OptPessLpAgent {
    fn select_policy(&mut self, _episode: usize) -> Result<MarkovPolicy> {
        let branch = self.policy_set_branch()?;
        self.last_branch = Some(branch);
        if branch == Branch::Singleton {
            self.last_lp_status = None;
            return Ok(self.safe_policy.clone());
        }
        self.refresh();
        let t = self.tables.as_ref().expect("refreshed");
        let lp = build_occupancy_lp(&t.kernel, &t.reward, &[(&t.cost, self.tau)], &self.mu)?;
        let outcome = solve_lp(&lp)?;
        self.last_lp_status = Some(outcome.status);
        match outcome.q {
            Some(q) if outcome.status == LpStatus::Optimal => {
                occupancy_to_policy(&q, &self.safe_policy)
            }
            _ => Err(Error::PessimisticLpInfeasible),
        }
    }

    fn observe_episode(&mut self, trajectory: &Trajectory) -> Result<()> {
        self.empirical.update_counts(trajectory)?;
        self.tables = None;
        Ok(())
    }

    fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            branch: self.last_branch,
            lp_status: self.last_lp_status,
            ..Diagnostics::default()
        }
    }
}
