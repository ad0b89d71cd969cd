//! Contrast agents: an optimistic LP without pessimism, and fixed policies.

use optpess_core::{
    build_occupancy_lp, confidence_radius, occupancy_to_policy, solve_lp,
    ConfidenceConfig, Diagnostics, Dims, EmpiricalModel, EpisodicAgent, LpStatus, MarkovPolicy,
    Result, StepTable, Trajectory,
};

/// LP over `P̂` maximising `r̂ + β` subject to `(ĉ − β) · q ≤ τ`.
///
/// Optimistic in both payoffs, so it happily plays policies whose true cost
/// exceeds the threshold while it learns.
#[derive(Debug, Clone)]
pub struct NaiveOptimisticAgent {
    empirical: EmpiricalModel,
    cfg: ConfidenceConfig,
    mu: Vec<f64>,
    tau: f64,
    last_lp_status: Option<LpStatus>,
}

impl NaiveOptimisticAgent {
    pub fn new(dims: Dims, mu: Vec<f64>, tau: f64, cfg: ConfidenceConfig) -> Self {
        Self {
            empirical: EmpiricalModel::new(dims),
            cfg,
            mu,
            tau,
            last_lp_status: None,
        }
    }

    pub fn empirical(&self) -> &EmpiricalModel {
        &self.empirical
    }

    fn tables(&self) -> (StepTable, StepTable) {
        let dims = self.empirical.dims();
        let mut reward = self.empirical.reward_hat();
        let mut cost = self.empirical.cost_hat();
        for h in 0..dims.horizon {
            for s in 0..dims.states {
                for a in 0..dims.actions {
                    let beta = confidence_radius(self.empirical.count(h, s, a), self.cfg.z);
                    reward.set(h, s, a, reward.get(h, s, a) + beta);
                    cost.set(h, s, a, cost.get(h, s, a) - beta);
                }
            }
        }
        (reward, cost)
    }
}

impl EpisodicAgent for NaiveOptimisticAgent {
    fn select_policy(&mut self, _episode: usize) -> Result<MarkovPolicy> {
        let dims = self.empirical.dims();
        let (reward, cost) = self.tables();
        let kernel = self.empirical.kernel_hat();
        let lp = build_occupancy_lp(&kernel, &reward, &[(&cost, self.tau)], &self.mu)?;
        let outcome = solve_lp(&lp)?;
        self.last_lp_status = Some(outcome.status);
        let uniform = MarkovPolicy::uniform(dims);
        match outcome.q {
            Some(q) if outcome.status == LpStatus::Optimal => occupancy_to_policy(&q, &uniform),
            _ => Ok(uniform),
        }
    }

    fn observe_episode(&mut self, trajectory: &Trajectory) -> Result<()> {
        self.empirical.update_counts(trajectory)
    }

    fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            lp_status: self.last_lp_status,
            ..Diagnostics::default()
        }
    }
}

/// Plays the same policy every episode and ignores feedback.
#[derive(Debug, Clone)]
pub struct FixedAgent {
    policy: MarkovPolicy,
}

impl FixedAgent {
    pub fn new(policy: MarkovPolicy) -> Self {
        Self { policy }
    }
}

impl EpisodicAgent for FixedAgent {
    fn select_policy(&mut self, _episode: usize) -> Result<MarkovPolicy> {
        Ok(self.policy.clone())
    }

    fn observe_episode(&mut self, _trajectory: &Trajectory) -> Result<()> {
        Ok(())
    }
}

