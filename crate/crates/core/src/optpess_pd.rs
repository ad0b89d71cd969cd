//! Bounded-violation agent: optimistic primal dynamic programming on a
//! Lagrangian payoff and a pessimistic projected dual update.

use alloc::format;
use alloc::vec::Vec;

use crate::agent::{Diagnostics, EpisodicAgent};
use crate::estimation::{biased_tables_pd, ConfidenceConfig, EmpiricalModel, Trajectory};
use crate::eval::{backward_induction, evaluate_policy, QTable};
use crate::math::{ln, sqrt};
use crate::model::{Dims, Kernel, MarkovPolicy, StepTable};
use crate::{Error, Result};

/// Upper end of the burn-in scan.
pub const BURN_IN_CAP: u64 = 1_000_000_000;

/// `δ' = δ / (16|S|²|A|H)`.
pub fn delta_prime(delta: f64, dims: Dims) -> f64 {
    let (s, a, h) = (dims.states as f64, dims.actions as f64, dims.horizon as f64);
    delta / (16.0 * s * s * a * h)
}

/// Pessimism margin
/// `ε_k = 5H²√(|S|³|A|) (ln(k/δ') + 1) / √(k ln(k/δ'))`.
pub fn epsilon_k(k: u64, horizon: usize, states: usize, actions: usize, delta_prime: f64) -> f64 {
    let (h, s, a) = (horizon as f64, states as f64, actions as f64);
    let k = k as f64;
    let log = ln(k / delta_prime);
    5.0 * h * h * sqrt(s * s * s * a) * (log + 1.0) / sqrt(k * log)
}

/// Dual scaling `η^k = (τ − c⁰) H √k`.
pub fn eta_k(k: u64, horizon: usize, tau: f64, safe_cost: f64) -> Result<f64> {
    if !(safe_cost < tau) {
        return Err(Error::ThresholdNotAboveSafeCost { tau, safe_cost });
    }
    Ok((tau - safe_cost) * horizon as f64 * sqrt(k as f64))
}

/// Smallest `k` with `ε_k ≤ (τ − c⁰)/2`, for run annotation.
///
/// `ε_k` is strictly decreasing in `k` whenever `δ' < 1`, so the first
/// crossing is located by doubling then bisection.
pub fn burn_in_episodes(
    dims: Dims,
    delta_prime: f64,
    tau: f64,
    safe_cost: f64,
) -> Result<u64> {
    if !(safe_cost < tau) {
        return Err(Error::ThresholdNotAboveSafeCost { tau, safe_cost });
    }
    if !(delta_prime > 0.0 && delta_prime < 1.0) {
        return Err(Error::InvalidParameter {
            name: "delta_prime",
            reason: format!("{delta_prime} is outside (0, 1)"),
        });
    }
    let target = (tau - safe_cost) / 2.0;
    let below = |k: u64| epsilon_k(k, dims.horizon, dims.states, dims.actions, delta_prime) <= target;
    if below(1) {
        return Ok(1);
    }
    let mut lo = 1u64;
    let mut hi = 2u64;
    while !below(hi) {
        if hi >= BURN_IN_CAP {
            return Err(Error::BurnInCapExceeded(BURN_IN_CAP));
        }
        lo = hi;
        hi = (hi * 2).min(BURN_IN_CAP);
    }
    // Invariant: !below(lo), below(hi).
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Greedy policy for the per-step payoff `r̃ − (λ/η)(c̃ − τ)` under
/// `kernel`.
pub fn lagrangian_policy(
    kernel: &Kernel,
    reward: &StepTable,
    cost: &StepTable,
    lambda: f64,
    eta: f64,
    tau: f64,
    mu: &[f64],
) -> Result<(MarkovPolicy, QTable)> {
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "eta",
            reason: format!("{eta} must be positive"),
        });
    }
    reward.dims.ensure_eq(&cost.dims, "cost payoff")?;
    let weight = lambda / eta;
    let combined = StepTable {
        dims: reward.dims,
        values: reward
            .values
            .iter()
            .zip(&cost.values)
            .map(|(r, c)| r - weight * (c - tau))
            .collect(),
    };
    let (policy, _, q) = backward_induction(kernel, &combined, mu)?;
    Ok((policy, q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    /// Clipped above at `H`.
    Reward,
    /// Clipped below at 0.
    Cost,
}

/// Initial-distribution value with the scalar truncation `min{H, V}` for
/// rewards or `max{0, V}` for costs.
pub fn truncated_values(
    policy: &MarkovPolicy,
    payoff: &StepTable,
    kernel: &Kernel,
    mu: &[f64],
    kind: ValueKind,
    horizon: usize,
) -> Result<f64> {
    let v = evaluate_policy(kernel, payoff, policy, mu)?.initial_value;
    Ok(truncate(v, kind, horizon))
}

#[inline]
fn truncate(v: f64, kind: ValueKind, horizon: usize) -> f64 {
    match kind {
        ValueKind::Reward => v.min(horizon as f64),
        ValueKind::Cost => v.max(0.0),
    }
}

/// `λ' = (λ + V̂_c + ε − τ)_+`.
#[inline]
pub fn dual_update(lambda: f64, v_hat_cost: f64, epsilon: f64, tau: f64) -> f64 {
    (lambda + v_hat_cost + epsilon - tau).max(0.0)
}

/// What one primal-dual step computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdDiagnostics {
    pub episode: u64,
    /// `λ^k`, the multiplier the policy was computed with.
    pub lambda: f64,
    pub epsilon: f64,
    pub eta: f64,
    /// Truncated optimistic cost `V̂_1^{π^k}(μ; c̃, P̂)`.
    pub v_hat_cost: f64,
    /// `λ^{k+1}`.
    pub lambda_next: f64,
}

#[derive(Debug, Clone)]
pub struct OptPessPdAgent {
    empirical: EmpiricalModel,
    cfg: ConfidenceConfig,
    mu: Vec<f64>,
    tau: f64,
    lambda: f64,
    safe_cost_bound: f64,
    delta_prime: f64,
    burn_in_annotation: Option<u64>,
    last: Option<PdDiagnostics>,
    last_q: Option<QTable>,
}

impl OptPessPdAgent {
    pub fn new(
        dims: Dims,
        mu: Vec<f64>,
        tau: f64,
        safe_cost_bound: f64,
        cfg: ConfidenceConfig,
    ) -> Result<Self> {
        if mu.len() != dims.states {
            return Err(Error::DimensionMismatch {
                what: "initial distribution",
                expected: dims.states,
                found: mu.len(),
            });
        }
        if !(safe_cost_bound < tau) {
            return Err(Error::ThresholdNotAboveSafeCost {
                tau,
                safe_cost: safe_cost_bound,
            });
        }
        let delta_prime = delta_prime(cfg.delta, dims);
        let burn_in_annotation = burn_in_episodes(dims, delta_prime, tau, safe_cost_bound).ok();
        Ok(Self {
            empirical: EmpiricalModel::new(dims),
            cfg,
            mu,
            tau,
            lambda: 0.0,
            safe_cost_bound,
            delta_prime,
            burn_in_annotation,
            last: None,
            last_q: None,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn delta_prime(&self) -> f64 {
        self.delta_prime
    }

    /// `C''`, or `None` when the scan cap was hit.
    pub fn burn_in_annotation(&self) -> Option<u64> {
        self.burn_in_annotation
    }

    pub fn empirical(&self) -> &EmpiricalModel {
        &self.empirical
    }

    pub fn last_step(&self) -> Option<PdDiagnostics> {
        self.last
    }

    pub fn last_q(&self) -> Option<&QTable> {
        self.last_q.as_ref()
    }

    /// Policy update with `λ^k`, then the dual update to `λ^{k+1}`.
    pub fn pd_step(&mut self, episode: u64) -> Result<MarkovPolicy> {
        let dims = self.empirical.dims();
        let episode = episode.max(1);
        let (reward, cost) = biased_tables_pd(&self.empirical, &self.cfg);
        let kernel = self.empirical.kernel_hat();
        let eta = eta_k(episode, dims.horizon, self.tau, self.safe_cost_bound)?;
        let epsilon = epsilon_k(episode, dims.horizon, dims.states, dims.actions, self.delta_prime);

        let lambda = self.lambda;
        let (policy, q) = lagrangian_policy(&kernel, &reward, &cost, lambda, eta, self.tau, &self.mu)?;
        let v_hat_cost =
            truncated_values(&policy, &cost, &kernel, &self.mu, ValueKind::Cost, dims.horizon)?;
        self.lambda = dual_update(lambda, v_hat_cost, epsilon, self.tau);
        self.last = Some(PdDiagnostics {
            episode,
            lambda,
            epsilon,
            eta,
            v_hat_cost,
            lambda_next: self.lambda,
        });
        self.last_q = Some(q);
        Ok(policy)
    }
}

impl EpisodicAgent for OptPessPdAgent {
    fn select_policy(&mut self, episode: usize) -> Result<MarkovPolicy> {
        self.pd_step(episode as u64)
    }

    fn observe_episode(&mut self, trajectory: &Trajectory) -> Result<()> {
        self.empirical.update_counts(trajectory)
    }

    fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            lambda: self.last.map(|d| d.lambda),
            epsilon: self.last.map(|d| d.epsilon),
            ..Diagnostics::default()
        }
    }
}
