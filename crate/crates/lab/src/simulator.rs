//! Episodic sampler over the true model.
//!
//! Every episode draws from its own ChaCha streams keyed by (seed, episode,
//! purpose), so the sequence of policies an agent picks never shifts the
//! environment's randomness.

use optpess_core::{MarkovPolicy, Step, TabularCmdp, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::noise::NoiseSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
enum Substream {
    InitState = 0,
    Transition = 1,
    RewardNoise = 2,
    CostNoise = 3,
    Action = 4,
}

/// Separates the agent's own episodes from auxiliary rollouts such as the
/// safe-cost pre-estimation phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Main,
    SafeCostEstimation,
}

pub struct EpisodeStreams {
    init_state: ChaCha8Rng,
    transition: ChaCha8Rng,
    reward_noise: ChaCha8Rng,
    cost_noise: ChaCha8Rng,
    action: ChaCha8Rng,
}

impl EpisodeStreams {
    pub fn new(seed: u64, episode: u64, phase: Phase) -> Self {
        let phase_bits = match phase {
            Phase::Main => 0u64,
            Phase::SafeCostEstimation => 1u64 << 62,
        };
        let stream = |tag: Substream| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(phase_bits | (episode << 3) | tag as u64);
            rng
        };
        Self {
            init_state: stream(Substream::InitState),
            transition: stream(Substream::Transition),
            reward_noise: stream(Substream::RewardNoise),
            cost_noise: stream(Substream::CostNoise),
            action: stream(Substream::Action),
        }
    }
}

/// Inverse-CDF draw; a row whose mass falls short of `u` resolves to its
/// last positive entry.
pub(crate) fn sample_categorical<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

pub fn sample_episode(
    model: &TabularCmdp,
    policy: &MarkovPolicy,
    noise: NoiseSpec,
    episode: usize,
    streams: &mut EpisodeStreams,
) -> Trajectory {
    let horizon = model.dims.horizon;
    let mut steps = Vec::with_capacity(horizon);
    let mut state = sample_categorical(&mut streams.init_state, &model.initial_dist);
    for h in 0..horizon {
        let action = sample_categorical(&mut streams.action, policy.row(h, state));
        let next_state =
            sample_categorical(&mut streams.transition, model.transitions.row(h, state, action));
        steps.push(Step {
            state,
            action,
            reward: model.reward.get(h, state, action) + noise.sample(&mut streams.reward_noise),
            cost: model.cost.get(h, state, action) + noise.sample(&mut streams.cost_noise),
            next_state,
        });
        state = next_state;
    }
    Trajectory { episode, steps }
}

/// Convenience wrapper building the streams for `(seed, episode)`.
pub fn sample_seeded(
    model: &TabularCmdp,
    policy: &MarkovPolicy,
    noise: NoiseSpec,
    seed: u64,
    episode: usize,
    phase: Phase,
) -> Trajectory {
    let mut streams = EpisodeStreams::new(seed, episode as u64, phase);
    sample_episode(model, policy, noise, episode, &mut streams)
}
