//! Upper bound on the safe policy's cost from repeated executions, for runs
//! where `c⁰` is not handed to the agent.

use optpess_core::{evaluate_policy, MarkovPolicy, TabularCmdp};

use crate::noise::NoiseSpec;
use crate::simulator::{sample_seeded, Phase};
use crate::LabError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C0Estimate {
    /// `ĉ⁰(K'') + radius(K'')`.
    pub c0_prime: f64,
    /// `K''`, executions of the safe policy spent.
    pub episodes_used: u64,
    pub mean_cost: f64,
}

/// `sqrt(ln(2K/δ'') / (k H))`.
pub fn safe_cost_radius(k: u64, horizon: usize, num_episodes: usize, delta2: f64) -> f64 {
    ((2.0 * num_episodes as f64 / delta2).ln() / (k as f64 * horizon as f64)).sqrt()
}

/// Runs `pi0` until `τ − ĉ⁰(k) ≥ 3·radius(k)` or `k = K`.
///
/// The harness knows the true model, so a policy that is not strictly safe
/// is rejected up front.
pub fn estimate_c0_upper_bound(
    model: &TabularCmdp,
    pi0: &MarkovPolicy,
    num_episodes: usize,
    delta2: f64,
    noise: NoiseSpec,
    seed: u64,
) -> Result<C0Estimate, LabError> {
    if !(delta2 > 0.0 && delta2 < 1.0) {
        return Err(LabError::Config(format!("c0_mode.delta2 = {delta2} outside (0, 1)")));
    }
    if num_episodes == 0 {
        return Err(LabError::Config("episodes must be at least 1".into()));
    }
    let exact = evaluate_policy(&model.transitions, &model.cost, pi0, &model.initial_dist)?
        .initial_value;
    if !(exact < model.threshold) {
        return Err(LabError::NotStrictlySafe {
            cost: exact,
            tau: model.threshold,
        });
    }
    let horizon = model.dims.horizon;
    let mut total = 0.0;
    let mut k = 0u64;
    loop {
        k += 1;
        let t = sample_seeded(model, pi0, noise, seed, k as usize, Phase::SafeCostEstimation);
        total += t.total_cost();
        let mean = total / k as f64;
        let radius = safe_cost_radius(k, horizon, num_episodes, delta2);
        if model.threshold - mean >= 3.0 * radius || k as usize >= num_episodes {
            return Ok(C0Estimate {
                c0_prime: mean + radius,
                episodes_used: k,
                mean_cost: mean,
            });
        }
    }
}
