#![allow(dead_code)]

use optpess_core::{
    evaluate_policy, solve_unconstrained, Dims, Kernel, MarkovPolicy, StepTable, TabularCmdp,
};

/// SplitMix64; enough randomness for instance generation in tests.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn simplex(&mut self, n: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..n).map(|_| -(1.0 - self.uniform()).ln()).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }
}

pub fn random_kernel(rng: &mut TestRng, dims: Dims) -> Kernel {
    let mut k = Kernel::zeros(dims);
    for h in 0..dims.horizon {
        for s in 0..dims.states {
            for a in 0..dims.actions {
                let row = rng.simplex(dims.states);
                k.row_mut(h, s, a).copy_from_slice(&row);
            }
        }
    }
    k
}

pub fn random_table(rng: &mut TestRng, dims: Dims) -> StepTable {
    StepTable::from_fn(dims, |_, _, _| rng.uniform())
}

pub fn random_policy(rng: &mut TestRng, dims: Dims) -> MarkovPolicy {
    let mut probs = Vec::with_capacity(dims.step_len());
    for _ in 0..dims.policy_rows() {
        probs.extend(rng.simplex(dims.actions));
    }
    MarkovPolicy::from_probs(dims, probs).unwrap()
}

/// Random CMDP with the threshold drawn between the cheapest policy's cost
/// and the reward-greedy policy's cost, so the constraint is usually active.
/// About one instance in ten gets a threshold below the cheapest cost.
pub fn random_cmdp(rng: &mut TestRng, dims: Dims) -> TabularCmdp {
    let transitions = random_kernel(rng, dims);
    let reward = random_table(rng, dims);
    let cost = random_table(rng, dims);
    let mu = rng.simplex(dims.states);
    let (_, cheapest) = solve_unconstrained(&transitions, &cost.negated(), &mu).unwrap();
    let c_min = -cheapest.initial_value;
    let (greedy, _) = solve_unconstrained(&transitions, &reward, &mu).unwrap();
    let c_greedy = evaluate_policy(&transitions, &cost, &greedy, &mu).unwrap().initial_value;
    let u = rng.uniform();
    let tau = if u < 0.1 {
        0.5 * c_min
    } else {
        c_min + (u - 0.1) / 0.9 * (c_greedy - c_min).max(0.0)
    };
    let tau = tau.clamp(1e-3, dims.horizon as f64);
    TabularCmdp::new(transitions, reward, cost, tau, mu).unwrap()
}

pub fn random_dims(rng: &mut TestRng, max_s: usize, max_a: usize, max_h: usize) -> Dims {
    Dims::new(
        1 + rng.below(max_s),
        1 + rng.below(max_a),
        1 + rng.below(max_h),
    )
}

/// Exhaustive trajectory enumeration: Σ over all (s_1, a_1, ..., s_H, a_H)
/// of path probability times cumulative payoff.
pub fn trajectory_sum(
    kernel: &Kernel,
    payoff: &StepTable,
    policy: &MarkovPolicy,
    mu: &[f64],
) -> f64 {
    fn walk(
        h: usize,
        s: usize,
        prob: f64,
        acc: f64,
        kernel: &Kernel,
        payoff: &StepTable,
        policy: &MarkovPolicy,
    ) -> f64 {
        let d = kernel.dims;
        let mut total = 0.0;
        for a in 0..d.actions {
            let pa = prob * policy.prob(h, s, a);
            if pa == 0.0 {
                continue;
            }
            let acc = acc + payoff.get(h, s, a);
            if h + 1 == d.horizon {
                total += pa * acc;
            } else {
                // Mass lost through a sub-stochastic row still earned `acc`.
                let row = kernel.row(h, s, a);
                let kept: f64 = row.iter().sum();
                total += pa * (1.0 - kept) * acc;
                for (next, &p) in row.iter().enumerate() {
                    if p > 0.0 {
                        total += walk(h + 1, next, pa * p, acc, kernel, payoff, policy);
                    }
                }
            }
        }
        total
    }
    mu.iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(s, &m)| walk(0, s, m, 0.0, kernel, payoff, policy))
        .sum()
}

pub fn trajectory_count(dims: Dims) -> u128 {
    ((dims.states * dims.actions) as u128).pow(dims.horizon as u32)
}

fn sample_index(rng: &mut TestRng, probs: &[f64]) -> usize {
    let u = rng.uniform();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Noise-free rollout of `policy` on `model`.
pub fn rollout(
    rng: &mut TestRng,
    model: &TabularCmdp,
    policy: &MarkovPolicy,
    episode: usize,
) -> optpess_core::Trajectory {
    let mut s = sample_index(rng, &model.initial_dist);
    let mut steps = Vec::with_capacity(model.dims.horizon);
    for h in 0..model.dims.horizon {
        let a = sample_index(rng, policy.row(h, s));
        let next = sample_index(rng, model.transitions.row(h, s, a));
        steps.push(optpess_core::Step {
            state: s,
            action: a,
            reward: model.reward.get(h, s, a),
            cost: model.cost.get(h, s, a),
            next_state: next,
        });
        s = next;
    }
    optpess_core::Trajectory { episode, steps }
}
