use alloc::vec;
use alloc::vec::Vec;

use crate::model::{Dims, Kernel, MarkovPolicy, StepTable};
use crate::{Error, Result};

/// `V_h(s)` for `h = 1..=H` (stored 0-based) plus the initial-distribution
/// scalar `V_1(μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunctions {
    pub dims: Dims,
    pub per_state: Vec<f64>,
    pub initial_value: f64,
}

impl ValueFunctions {
    #[inline]
    pub fn value(&self, h: usize, s: usize) -> f64 {
        self.per_state[h * self.dims.states + s]
    }
}

/// `Q_h(s,a)` table, flat in `(h, s, a)` order. `Q_{H+1} ≡ 0` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    pub dims: Dims,
    pub values: Vec<f64>,
}

impl QTable {
    #[inline]
    pub fn get(&self, h: usize, s: usize, a: usize) -> f64 {
        self.values[self.dims.idx(h, s, a)]
    }

    /// `max_a Q_h(s,a)`, or 0 past the horizon.
    pub fn max_value(&self, h: usize, s: usize) -> f64 {
        if h >= self.dims.horizon {
            return 0.0;
        }
        let start = self.dims.idx(h, s, 0);
        self.values[start..start + self.dims.actions]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Occupancy measure `q(s,a,h)`, flat in `(h, s, a)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyMeasure {
    pub dims: Dims,
    pub q: Vec<f64>,
}

impl OccupancyMeasure {
    #[inline]
    pub fn get(&self, h: usize, s: usize, a: usize) -> f64 {
        self.q[self.dims.idx(h, s, a)]
    }

    /// `Σ_{s,a} q(s,a,h)`.
    pub fn step_mass(&self, h: usize) -> f64 {
        let n = self.dims.states * self.dims.actions;
        self.q[h * n..(h + 1) * n].iter().sum()
    }

    /// `Σ_{h,s,a} q(s,a,h) g_h(s,a)`.
    pub fn dot(&self, payoff: &StepTable) -> f64 {
        self.q
            .iter()
            .zip(&payoff.values)
            .map(|(q, g)| q * g)
            .sum()
    }
}

fn check_inputs(kernel: &Kernel, payoff: Option<&StepTable>, mu: &[f64]) -> Result<Dims> {
    let dims = kernel.dims;
    if kernel.probs.len() != dims.kernel_len() {
        return Err(Error::DimensionMismatch {
            what: "transition table",
            expected: dims.kernel_len(),
            found: kernel.probs.len(),
        });
    }
    if let Some(g) = payoff {
        dims.ensure_eq(&g.dims, "payoff table")?;
        if g.values.len() != dims.step_len() {
            return Err(Error::DimensionMismatch {
                what: "payoff table",
                expected: dims.step_len(),
                found: g.values.len(),
            });
        }
    }
    if mu.len() != dims.states {
        return Err(Error::DimensionMismatch {
            what: "initial distribution",
            expected: dims.states,
            found: mu.len(),
        });
    }
    Ok(dims)
}

fn check_policy(dims: &Dims, policy: &MarkovPolicy) -> Result<()> {
    dims.ensure_eq(&policy.dims, "policy")?;
    if policy.probs.len() != dims.step_len() {
        return Err(Error::DimensionMismatch {
            what: "policy table",
            expected: dims.step_len(),
            found: policy.probs.len(),
        });
    }
    Ok(())
}

#[inline]
fn expected_next(kernel: &Kernel, h: usize, s: usize, a: usize, next_values: &[f64]) -> f64 {
    kernel
        .row(h, s, a)
        .iter()
        .zip(next_values)
        .map(|(p, v)| p * v)
        .sum()
}

/// Exact value of `policy` for per-step payoff `payoff` by backward
/// recursion with `V_{H+1} ≡ 0`. Sub-stochastic kernels and arbitrary real
/// payoffs are accepted.
pub fn evaluate_policy(
    kernel: &Kernel,
    payoff: &StepTable,
    policy: &MarkovPolicy,
    mu: &[f64],
) -> Result<ValueFunctions> {
    let dims = check_inputs(kernel, Some(payoff), mu)?;
    check_policy(&dims, policy)?;
    let (ns, na, nh) = (dims.states, dims.actions, dims.horizon);

    let mut per_state = vec![0.0; nh * ns];
    let terminal = vec![0.0; ns];
    for h in (0..nh).rev() {
        let (head, tail) = per_state.split_at_mut((h + 1) * ns);
        let next: &[f64] = if h + 1 == nh { &terminal } else { &tail[..ns] };
        let current = &mut head[h * ns..];
        for (s, v) in current.iter_mut().enumerate() {
            let mut total = 0.0;
            for a in 0..na {
                let p = policy.prob(h, s, a);
                if p == 0.0 {
                    continue;
                }
                total += p * (payoff.get(h, s, a) + expected_next(kernel, h, s, a, next));
            }
            *v = total;
        }
    }
    let initial_value = mu.iter().zip(&per_state[..ns]).map(|(m, v)| m * v).sum();
    Ok(ValueFunctions {
        dims,
        per_state,
        initial_value,
    })
}

/// Forward recursion `q(s,a,1) = μ(s)π_1(a|s)`,
/// `q(s',a',h+1) = π_{h+1}(a'|s') Σ_{s,a} q(s,a,h) P_h(s'|s,a)`.
pub fn policy_occupancy(
    kernel: &Kernel,
    policy: &MarkovPolicy,
    mu: &[f64],
) -> Result<OccupancyMeasure> {
    let dims = check_inputs(kernel, None, mu)?;
    check_policy(&dims, policy)?;
    let (ns, na, nh) = (dims.states, dims.actions, dims.horizon);

    let mut q = vec![0.0; dims.step_len()];
    let mut state_mass = mu.to_vec();
    for h in 0..nh {
        for s in 0..ns {
            for a in 0..na {
                q[dims.idx(h, s, a)] = state_mass[s] * policy.prob(h, s, a);
            }
        }
        if h + 1 < nh {
            state_mass.iter_mut().for_each(|m| *m = 0.0);
            for s in 0..ns {
                for a in 0..na {
                    let w = q[dims.idx(h, s, a)];
                    if w == 0.0 {
                        continue;
                    }
                    for (next, p) in kernel.row(h, s, a).iter().enumerate() {
                        state_mass[next] += w * p;
                    }
                }
            }
        }
    }
    Ok(OccupancyMeasure { dims, q })
}

/// Greedy backward induction on `payoff` with lowest-index tie-breaking.
/// Returns the deterministic policy, its values, and the Q table.
pub fn backward_induction(
    kernel: &Kernel,
    payoff: &StepTable,
    mu: &[f64],
) -> Result<(MarkovPolicy, ValueFunctions, QTable)> {
    let dims = check_inputs(kernel, Some(payoff), mu)?;
    let (ns, na, nh) = (dims.states, dims.actions, dims.horizon);

    let mut q = vec![0.0; dims.step_len()];
    let mut per_state = vec![0.0; nh * ns];
    let mut actions = vec![0usize; nh * ns];
    let terminal = vec![0.0; ns];
    for h in (0..nh).rev() {
        let (head, tail) = per_state.split_at_mut((h + 1) * ns);
        let next: &[f64] = if h + 1 == nh { &terminal } else { &tail[..ns] };
        for s in 0..ns {
            let mut best = 0;
            let mut best_value = f64::NEG_INFINITY;
            for a in 0..na {
                let value = payoff.get(h, s, a) + expected_next(kernel, h, s, a, next);
                q[dims.idx(h, s, a)] = value;
                if value > best_value {
                    best = a;
                    best_value = value;
                }
            }
            head[h * ns + s] = best_value;
            actions[h * ns + s] = best;
        }
    }
    let policy = MarkovPolicy::deterministic(dims, &actions)?;
    let initial_value = mu.iter().zip(&per_state[..ns]).map(|(m, v)| m * v).sum();
    Ok((
        policy,
        ValueFunctions {
            dims,
            per_state,
            initial_value,
        },
        QTable { dims, values: q },
    ))
}

/// Unconstrained optimal control of `payoff` under `kernel`.
pub fn solve_unconstrained(
    kernel: &Kernel,
    payoff: &StepTable,
    mu: &[f64],
) -> Result<(MarkovPolicy, ValueFunctions)> {
    let (policy, values, _) = backward_induction(kernel, payoff, mu)?;
    Ok((policy, values))
}
