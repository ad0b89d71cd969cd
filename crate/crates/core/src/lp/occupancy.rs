use alloc::vec;
use alloc::vec::Vec;

use super::simplex::{self, Constraint, LinearProgram, LpStatus};
use crate::eval::{evaluate_policy, OccupancyMeasure};
use crate::model::{Dims, Kernel, MarkovPolicy, StepTable, TabularCmdp};
use crate::{Error, Result};

/// Denominator below which a state counts as unreached when extracting a
/// policy from an occupancy measure.
const REACH_TOL: f64 = 1e-12;

/// LP over `q(s,a,h) ≥ 0`, one variable per `(h, s, a)` cell in the same
/// flat order as [`StepTable`].
///
/// Equality rows: `Σ_a q(s,a,1) = μ(s)` for each `s`, then for each
/// `h < H` and `s'` the conservation row
/// `Σ_a q(s',a,h+1) − Σ_{s,a} q(s,a,h) P_h(s'|s,a) = 0`.
/// Inequality rows: one `Σ q·w ≤ b` per budget.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyLp {
    pub dims: Dims,
    pub program: LinearProgram,
}

impl OccupancyLp {
    pub fn num_vars(&self) -> usize {
        self.program.num_vars
    }

    pub fn flow_rows(&self) -> &[Constraint] {
        &self.program.equalities
    }

    pub fn budget_rows(&self) -> &[Constraint] {
        &self.program.upper_bounds
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub q: Option<OccupancyMeasure>,
    pub objective_value: f64,
}

pub fn build_occupancy_lp(
    kernel: &Kernel,
    objective: &StepTable,
    budgets: &[(&StepTable, f64)],
    mu: &[f64],
) -> Result<OccupancyLp> {
    let dims = kernel.dims;
    dims.ensure_eq(&objective.dims, "objective payoff")?;
    for (w, _) in budgets {
        dims.ensure_eq(&w.dims, "budget payoff")?;
    }
    if mu.len() != dims.states {
        return Err(Error::DimensionMismatch {
            what: "initial distribution",
            expected: dims.states,
            found: mu.len(),
        });
    }
    if kernel.probs.len() != dims.kernel_len() {
        return Err(Error::DimensionMismatch {
            what: "transition table",
            expected: dims.kernel_len(),
            found: kernel.probs.len(),
        });
    }

    let n = dims.step_len();
    let mut equalities = Vec::with_capacity(dims.policy_rows());
    for s in 0..dims.states {
        let mut coeffs = vec![0.0; n];
        for a in 0..dims.actions {
            coeffs[dims.idx(0, s, a)] = 1.0;
        }
        equalities.push(Constraint { coeffs, rhs: mu[s] });
    }
    for h in 0..dims.horizon.saturating_sub(1) {
        for next in 0..dims.states {
            let mut coeffs = vec![0.0; n];
            for a in 0..dims.actions {
                coeffs[dims.idx(h + 1, next, a)] = 1.0;
            }
            for s in 0..dims.states {
                for a in 0..dims.actions {
                    coeffs[dims.idx(h, s, a)] -= kernel.get(h, s, a, next);
                }
            }
            equalities.push(Constraint { coeffs, rhs: 0.0 });
        }
    }
    let upper_bounds = budgets
        .iter()
        .map(|(w, b)| Constraint {
            coeffs: w.values.clone(),
            rhs: *b,
        })
        .collect();

    Ok(OccupancyLp {
        dims,
        program: LinearProgram {
            num_vars: n,
            objective: objective.values.clone(),
            equalities,
            upper_bounds,
        },
    })
}

pub fn solve_lp(lp: &OccupancyLp) -> Result<LpOutcome> {
    let solution = simplex::maximize(&lp.program)?;
    let q = (solution.status == LpStatus::Optimal).then(|| OccupancyMeasure {
        dims: lp.dims,
        q: solution.x,
    });
    Ok(LpOutcome {
        status: solution.status,
        q,
        objective_value: solution.objective_value,
    })
}

/// `π_h(a|s) ∝ q(s,a,h)` where state `s` carries mass at step `h`, and the
/// `fallback` row elsewhere.
pub fn occupancy_to_policy(q: &OccupancyMeasure, fallback: &MarkovPolicy) -> Result<MarkovPolicy> {
    let dims = q.dims;
    dims.ensure_eq(&fallback.dims, "fallback policy")?;
    let mut policy = fallback.clone();
    for h in 0..dims.horizon {
        for s in 0..dims.states {
            let start = dims.idx(h, s, 0);
            let row = &q.q[start..start + dims.actions];
            let mass: f64 = row.iter().map(|v| v.max(0.0)).sum();
            if mass > REACH_TOL {
                for (p, v) in policy.row_mut(h, s).iter_mut().zip(row) {
                    *p = v.max(0.0) / mass;
                }
            }
        }
    }
    Ok(policy)
}

/// Optimal constrained policy of the true model with its exact values.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub policy: MarkovPolicy,
    pub value: f64,
    pub cost: f64,
    pub lp_objective: f64,
}

/// Solves `max V(μ; r, P)` s.t. `V(μ; c, P) ≤ τ` on the true model. Reported
/// values are re-evaluated on the extracted policy.
pub fn solve_cmdp_exact(model: &TabularCmdp) -> Result<ExactSolution> {
    let lp = build_occupancy_lp(
        &model.transitions,
        &model.reward,
        &[(&model.cost, model.threshold)],
        &model.initial_dist,
    )?;
    let outcome = solve_lp(&lp)?;
    let q = match outcome.status {
        LpStatus::Optimal => outcome.q.expect("optimal outcome carries q"),
        LpStatus::Infeasible => return Err(Error::Infeasible),
        LpStatus::Unbounded => {
            return Err(Error::NumericalBreakdown(
                "bounded occupancy LP reported unbounded".into(),
            ))
        }
    };
    let policy = occupancy_to_policy(&q, &MarkovPolicy::uniform(model.dims))?;
    let mu = &model.initial_dist;
    let value = evaluate_policy(&model.transitions, &model.reward, &policy, mu)?.initial_value;
    let cost = evaluate_policy(&model.transitions, &model.cost, &policy, mu)?.initial_value;
    Ok(ExactSolution {
        policy,
        value,
        cost,
        lp_objective: outcome.objective_value,
    })
}
