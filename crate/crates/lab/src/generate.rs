//! Seeded environment generators.

use std::str::FromStr;

use optpess_core::{
    evaluate_policy, solve_cmdp_exact, solve_unconstrained, Dims, Kernel, MarkovPolicy, StepTable,
    TabularCmdp,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::envfile::{EnvironmentFile, SafeBaseline};
use crate::LabError;

pub const MAX_ATTEMPTS: usize = 100;

/// Dirichlet concentration for transition rows of `boundary_tight`.
const TIGHT_CONCENTRATION: f64 = 0.3;
/// Smallest per-step safe cost `c⁰/H` accepted by `boundary_tight`.
const TIGHT_MIN_SAFE_COST_PER_STEP: f64 = 0.05;
/// How far the reward-greedy cost must exceed `τ`.
const TIGHT_GREEDY_MARGIN: f64 = 0.05;
const CERTIFY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorSpec {
    /// Dirichlet rows, uniform payoffs, costs rescaled below a drawn `τ`.
    Random,
    /// Deterministic chain: action `a` moves `s` to `min(s + a, S − 1)`.
    Chain,
    /// Constraint active at the optimum, safe policy at cost `τ/2`.
    BoundaryTight,
}

impl GeneratorSpec {
    pub fn as_str(&self) -> &'static str {
        match self {
            GeneratorSpec::Random => "random",
            GeneratorSpec::Chain => "chain",
            GeneratorSpec::BoundaryTight => "boundary_tight",
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(GeneratorSpec::Random),
            "chain" => Ok(GeneratorSpec::Chain),
            "boundary_tight" | "boundary-tight" => Ok(GeneratorSpec::BoundaryTight),
            other => Err(format!(
                "unknown generator {other:?} (expected random, chain or boundary_tight)"
            )),
        }
    }
}

pub fn generate_environment(
    spec: GeneratorSpec,
    seed: u64,
    dims: Dims,
) -> Result<EnvironmentFile, LabError> {
    if dims.states == 0 || dims.actions == 0 || dims.horizon == 0 {
        return Err(LabError::Config("dimensions must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (model, safe) = match spec {
        GeneratorSpec::Random => random(&mut rng, dims)?,
        GeneratorSpec::Chain => chain(&mut rng, dims)?,
        GeneratorSpec::BoundaryTight => boundary_tight(&mut rng, dims)?,
    };
    Ok(EnvironmentFile::from_model(&model, Some(&safe)))
}

fn dirichlet_row<R: Rng>(rng: &mut R, len: usize, concentration: f64) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("positive concentration");
    loop {
        let mut row: Vec<f64> = (0..len).map(|_| gamma.sample(rng)).collect();
        let total: f64 = row.iter().sum();
        if total > 0.0 && total.is_finite() {
            row.iter_mut().for_each(|p| *p /= total);
            return row;
        }
    }
}

fn dirichlet_kernel<R: Rng>(rng: &mut R, dims: Dims, concentration: f64) -> Kernel {
    let mut kernel = Kernel::zeros(dims);
    for h in 0..dims.horizon {
        for s in 0..dims.states {
            for a in 0..dims.actions {
                let row = dirichlet_row(rng, dims.states, concentration);
                kernel.row_mut(h, s, a).copy_from_slice(&row);
            }
        }
    }
    kernel
}

/// Cheapest deterministic policy and its exact cost.
fn min_cost_policy(model: &TabularCmdp) -> Result<(MarkovPolicy, f64), LabError> {
    let (policy, _) =
        solve_unconstrained(&model.transitions, &model.cost.negated(), &model.initial_dist)?;
    let cost = exact_cost(model, &policy)?;
    Ok((policy, cost))
}

fn exact_cost(model: &TabularCmdp, policy: &MarkovPolicy) -> Result<f64, LabError> {
    Ok(evaluate_policy(&model.transitions, &model.cost, policy, &model.initial_dist)?.initial_value)
}

fn checked(model: TabularCmdp) -> Result<TabularCmdp, LabError> {
    let violations = model.validate();
    if violations.is_empty() {
        Ok(model)
    } else {
        Err(LabError::InvalidModel(violations))
    }
}

fn random<R: Rng>(rng: &mut R, dims: Dims) -> Result<(TabularCmdp, SafeBaseline), LabError> {
    let transitions = dirichlet_kernel(rng, dims, 1.0);
    let reward = StepTable::from_fn(dims, |_, _, _| rng.random::<f64>());
    let cost = StepTable::from_fn(dims, |_, _, _| rng.random::<f64>());
    let mut initial_dist = vec![0.0; dims.states];
    initial_dist[0] = 1.0;
    let threshold = dims.horizon as f64 * rng.random_range(0.25..0.75);
    let mut model = TabularCmdp {
        dims,
        transitions,
        reward,
        cost,
        threshold,
        initial_dist,
    };
    let (policy, c_min) = min_cost_policy(&model)?;
    if c_min > 0.5 * threshold {
        let scale = 0.5 * threshold / c_min;
        model.cost.values.iter_mut().for_each(|c| *c *= scale);
    }
    let model = checked(model)?;
    let cost_bound = exact_cost(&model, &policy)?;
    Ok((model, SafeBaseline { policy, cost_bound }))
}

fn chain<R: Rng>(rng: &mut R, dims: Dims) -> Result<(TabularCmdp, SafeBaseline), LabError> {
    let (n, m) = (dims.states, dims.actions);
    let mut transitions = Kernel::zeros(dims);
    for h in 0..dims.horizon {
        for s in 0..n {
            for a in 0..m {
                transitions.row_mut(h, s, a)[(s + a).min(n - 1)] = 1.0;
            }
        }
    }
    let span = |i: usize, len: usize| if len > 1 { i as f64 / (len - 1) as f64 } else { 0.0 };
    let reward = StepTable::from_fn(dims, |_, s, _| 0.9 * span(s, n) + 0.1 * rng.random::<f64>());
    let cost = StepTable::from_fn(dims, |_, _, a| 0.9 * span(a, m) + 0.1 * rng.random::<f64>());
    let mut initial_dist = vec![0.0; n];
    initial_dist[0] = 1.0;
    let mut model = TabularCmdp {
        dims,
        transitions,
        reward,
        cost,
        threshold: 0.0,
        initial_dist,
    };
    let (policy, c_min) = min_cost_policy(&model)?;
    let (greedy, _) = solve_unconstrained(&model.transitions, &model.reward, &model.initial_dist)?;
    let c_greedy = exact_cost(&model, &greedy)?;
    model.threshold = if c_greedy > c_min {
        0.5 * (c_min + c_greedy)
    } else {
        0.5 * (c_min + dims.horizon as f64)
    };
    let model = checked(model)?;
    Ok((model, SafeBaseline { policy, cost_bound: c_min }))
}

/// Costs grow convexly with reward: ordinary behaviour sits well below `τ`
/// while the reward-greedy policy exceeds it.
fn boundary_tight<R: Rng>(rng: &mut R, dims: Dims) -> Result<(TabularCmdp, SafeBaseline), LabError> {
    let h_f = dims.horizon as f64;
    let mut last_reason = String::new();
    for _ in 0..MAX_ATTEMPTS {
        let transitions = dirichlet_kernel(rng, dims, TIGHT_CONCENTRATION);
        let reward = StepTable::from_fn(dims, |_, _, _| rng.random::<f64>());
        let cost = StepTable::from_fn(dims, |h, s, a| {
            let r = reward.get(h, s, a);
            0.2 + 0.75 * r * r + 0.05 * rng.random::<f64>()
        });
        let mut initial_dist = vec![0.0; dims.states];
        initial_dist[0] = 1.0;
        let mut model = TabularCmdp {
            dims,
            transitions,
            reward,
            cost,
            threshold: 0.0,
            initial_dist,
        };
        let (policy, c_min) = min_cost_policy(&model)?;
        if c_min < TIGHT_MIN_SAFE_COST_PER_STEP * h_f || 2.0 * c_min > h_f {
            last_reason = format!("safe cost {c_min} out of range");
            continue;
        }
        model.threshold = 2.0 * c_min;
        let (greedy, _) =
            solve_unconstrained(&model.transitions, &model.reward, &model.initial_dist)?;
        let c_greedy = exact_cost(&model, &greedy)?;
        if c_greedy <= model.threshold + TIGHT_GREEDY_MARGIN {
            last_reason = format!("unconstrained optimum cost {c_greedy} not above tau");
            continue;
        }
        let model = checked(model)?;
        let exact = solve_cmdp_exact(&model)?;
        if (exact.cost - model.threshold).abs() > CERTIFY_TOL {
            last_reason = format!("optimal cost {} not at tau {}", exact.cost, model.threshold);
            continue;
        }
        return Ok((model, SafeBaseline { policy, cost_bound: c_min }));
    }
    Err(LabError::Generation {
        attempts: MAX_ATTEMPTS,
        reason: last_reason,
    })
}
