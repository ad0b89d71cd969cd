use alloc::vec;
use alloc::vec::Vec;

use crate::eval::evaluate_policy;
use crate::model::{Dims, MarkovPolicy, TabularCmdp};
use crate::{Error, Result};

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

fn policy_count(dims: Dims) -> Option<u128> {
    let exponent = u32::try_from(dims.policy_rows()).ok()?;
    (dims.actions as u128).checked_pow(exponent)
}

/// The `index`-th deterministic policy in odometer order: row `h*S + s`
/// is the least significant digit (base `|A|`) when `h*S + s = 0`.
pub fn deterministic_policy_from_index(dims: Dims, mut index: u128) -> Result<MarkovPolicy> {
    let base = dims.actions as u128;
    let mut actions = vec![0usize; dims.policy_rows()];
    for a in actions.iter_mut() {
        *a = (index % base) as usize;
        index /= base;
    }
    MarkovPolicy::deterministic(dims, &actions)
}

/// Iterator over every deterministic non-stationary Markov policy.
#[derive(Debug, Clone)]
pub struct DeterministicPolicies {
    dims: Dims,
    digits: Vec<usize>,
    remaining: u128,
}

impl Iterator for DeterministicPolicies {
    type Item = MarkovPolicy;

    fn next(&mut self) -> Option<MarkovPolicy> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let policy = MarkovPolicy::deterministic(self.dims, &self.digits)
            .expect("digits are in range by construction");
        for d in self.digits.iter_mut() {
            *d += 1;
            if *d < self.dims.actions {
                break;
            }
            *d = 0;
        }
        Some(policy)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, usize::try_from(self.remaining).ok())
    }
}

/// Enumerates all `|A|^(|S|H)` deterministic policies, refusing when that
/// count exceeds `cap`.
pub fn enumerate_deterministic_policies(dims: Dims, cap: u128) -> Result<DeterministicPolicies> {
    let count = policy_count(dims).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::EnumerationCap { count, cap });
    }
    Ok(DeterministicPolicies {
        dims,
        digits: vec![0; dims.policy_rows()],
        remaining: count,
    })
}

/// `weight · first + (1 − weight) · second`, mixed at the occupancy level.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyMixture {
    pub first: MarkovPolicy,
    pub second: MarkovPolicy,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceOptimum {
    pub value: f64,
    pub cost: f64,
    pub witness: PolicyMixture,
}

/// Exhaustive CMDP optimum: the best single feasible deterministic policy
/// or the best two-policy mixture whose mixed cost sits exactly on the
/// threshold. With one constraint the optimum is always one of these.
pub fn brute_force_cmdp_optimum(model: &TabularCmdp, cap: u128) -> Result<BruteForceOptimum> {
    let dims = model.dims;
    let mu = &model.initial_dist;
    let tau = model.threshold;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for policy in enumerate_deterministic_policies(dims, cap)? {
        let r = evaluate_policy(&model.transitions, &model.reward, &policy, mu)?.initial_value;
        let c = evaluate_policy(&model.transitions, &model.cost, &policy, mu)?.initial_value;
        points.push((r, c));
    }

    // (value, cost, first, second, weight)
    let mut best: Option<(f64, f64, usize, usize, f64)> = None;
    let mut consider = |cand: (f64, f64, usize, usize, f64)| {
        if best.is_none_or(|b| cand.0 > b.0) {
            best = Some(cand);
        }
    };
    for (i, &(r, c)) in points.iter().enumerate() {
        if c <= tau {
            consider((r, c, i, i, 1.0));
        }
    }
    for (i, &(r_lo, c_lo)) in points.iter().enumerate() {
        if c_lo > tau {
            continue;
        }
        for (j, &(r_hi, c_hi)) in points.iter().enumerate() {
            if c_hi <= tau {
                continue;
            }
            let weight = (c_hi - tau) / (c_hi - c_lo);
            let value = weight * r_lo + (1.0 - weight) * r_hi;
            consider((value, tau, i, j, weight));
        }
    }

    let (value, cost, i, j, weight) = best.ok_or(Error::Infeasible)?;
    Ok(BruteForceOptimum {
        value,
        cost,
        witness: PolicyMixture {
            first: deterministic_policy_from_index(dims, i as u128)?,
            second: deterministic_policy_from_index(dims, j as u128)?,
            weight,
        },
    })
}
