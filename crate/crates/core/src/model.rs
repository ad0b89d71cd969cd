use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-12;

/// Sizes of a finite-horizon tabular problem. Steps are 0-based internally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub states: usize,
    pub actions: usize,
    pub horizon: usize,
}

impl Dims {
    pub const fn new(states: usize, actions: usize, horizon: usize) -> Self {
        Self {
            states,
            actions,
            horizon,
        }
    }

    /// Number of `(h, s, a)` cells.
    #[inline]
    pub const fn step_len(&self) -> usize {
        self.horizon * self.states * self.actions
    }

    /// Number of `(h, s, a, s')` cells.
    #[inline]
    pub const fn kernel_len(&self) -> usize {
        self.step_len() * self.states
    }

    /// Number of `(h, s)` cells.
    #[inline]
    pub const fn policy_rows(&self) -> usize {
        self.horizon * self.states
    }

    #[inline]
    pub const fn idx(&self, h: usize, s: usize, a: usize) -> usize {
        (h * self.states + s) * self.actions + a
    }

    #[inline]
    pub const fn kernel_idx(&self, h: usize, s: usize, a: usize, next: usize) -> usize {
        self.idx(h, s, a) * self.states + next
    }

    pub(crate) fn ensure_eq(&self, other: &Dims, what: &'static str) -> Result<()> {
        if self.states != other.states {
            return Err(Error::DimensionMismatch {
                what,
                expected: self.states,
                found: other.states,
            });
        }
        if self.actions != other.actions {
            return Err(Error::DimensionMismatch {
                what,
                expected: self.actions,
                found: other.actions,
            });
        }
        if self.horizon != other.horizon {
            return Err(Error::DimensionMismatch {
                what,
                expected: self.horizon,
                found: other.horizon,
            });
        }
        Ok(())
    }
}

/// Transition table `P_h(s'|s,a)`, flat in `(h, s, a, s')` order.
///
/// Rows may be sub-stochastic: an empirical kernel has all-zero rows for
/// pairs that were never visited, and the missing mass simply ends the
/// value contribution of the episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    pub dims: Dims,
    pub probs: Vec<f64>,
}

impl Kernel {
    pub fn zeros(dims: Dims) -> Self {
        Self {
            dims,
            probs: vec![0.0; dims.kernel_len()],
        }
    }

    pub fn from_vec(dims: Dims, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != dims.kernel_len() {
            return Err(Error::DimensionMismatch {
                what: "transition table",
                expected: dims.kernel_len(),
                found: probs.len(),
            });
        }
        Ok(Self { dims, probs })
    }

    #[inline]
    pub fn row(&self, h: usize, s: usize, a: usize) -> &[f64] {
        let start = self.dims.kernel_idx(h, s, a, 0);
        &self.probs[start..start + self.dims.states]
    }

    #[inline]
    pub fn row_mut(&mut self, h: usize, s: usize, a: usize) -> &mut [f64] {
        let start = self.dims.kernel_idx(h, s, a, 0);
        let n = self.dims.states;
        &mut self.probs[start..start + n]
    }

    #[inline]
    pub fn get(&self, h: usize, s: usize, a: usize, next: usize) -> f64 {
        self.probs[self.dims.kernel_idx(h, s, a, next)]
    }
}

/// A per-step payoff `g_h(s,a)`, flat in `(h, s, a)` order. Entries are
/// arbitrary reals so biased estimates can be stored here too.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTable {
    pub dims: Dims,
    pub values: Vec<f64>,
}

impl StepTable {
    pub fn zeros(dims: Dims) -> Self {
        Self::constant(dims, 0.0)
    }

    pub fn constant(dims: Dims, value: f64) -> Self {
        Self {
            dims,
            values: vec![value; dims.step_len()],
        }
    }

    pub fn from_vec(dims: Dims, values: Vec<f64>) -> Result<Self> {
        if values.len() != dims.step_len() {
            return Err(Error::DimensionMismatch {
                what: "payoff table",
                expected: dims.step_len(),
                found: values.len(),
            });
        }
        Ok(Self { dims, values })
    }

    /// Builds a table by evaluating `f(h, s, a)` on every cell.
    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(dims.step_len());
        for h in 0..dims.horizon {
            for s in 0..dims.states {
                for a in 0..dims.actions {
                    values.push(f(h, s, a));
                }
            }
        }
        Self { dims, values }
    }

    #[inline]
    pub fn get(&self, h: usize, s: usize, a: usize) -> f64 {
        self.values[self.dims.idx(h, s, a)]
    }

    #[inline]
    pub fn set(&mut self, h: usize, s: usize, a: usize, value: f64) {
        let i = self.dims.idx(h, s, a);
        self.values[i] = value;
    }

    pub fn negated(&self) -> Self {
        Self {
            dims: self.dims,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

/// Randomized non-stationary Markov policy `π_h(a|s)`, flat in `(h, s, a)`
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovPolicy {
    pub dims: Dims,
    pub probs: Vec<f64>,
}

impl MarkovPolicy {
    pub fn uniform(dims: Dims) -> Self {
        Self {
            dims,
            probs: vec![1.0 / dims.actions as f64; dims.step_len()],
        }
    }

    /// `actions[h * states + s]` is the action taken in state `s` at step `h`.
    pub fn deterministic(dims: Dims, actions: &[usize]) -> Result<Self> {
        if actions.len() != dims.policy_rows() {
            return Err(Error::DimensionMismatch {
                what: "deterministic action table",
                expected: dims.policy_rows(),
                found: actions.len(),
            });
        }
        let mut probs = vec![0.0; dims.step_len()];
        for (row, &a) in actions.iter().enumerate() {
            if a >= dims.actions {
                return Err(Error::DimensionMismatch {
                    what: "action index",
                    expected: dims.actions,
                    found: a,
                });
            }
            probs[row * dims.actions + a] = 1.0;
        }
        Ok(Self { dims, probs })
    }

    /// Wraps a probability table, rejecting rows that are not distributions.
    pub fn from_probs(dims: Dims, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != dims.step_len() {
            return Err(Error::DimensionMismatch {
                what: "policy table",
                expected: dims.step_len(),
                found: probs.len(),
            });
        }
        let policy = Self { dims, probs };
        if let Some((h, s)) = policy.first_invalid_row() {
            return Err(Error::InvalidParameter {
                name: "policy",
                reason: alloc::format!("row (h={}, s={}) is not a distribution", h + 1, s),
            });
        }
        Ok(policy)
    }

    #[inline]
    pub fn row(&self, h: usize, s: usize) -> &[f64] {
        let start = self.dims.idx(h, s, 0);
        &self.probs[start..start + self.dims.actions]
    }

    #[inline]
    pub fn row_mut(&mut self, h: usize, s: usize) -> &mut [f64] {
        let start = self.dims.idx(h, s, 0);
        let n = self.dims.actions;
        &mut self.probs[start..start + n]
    }

    #[inline]
    pub fn prob(&self, h: usize, s: usize, a: usize) -> f64 {
        self.probs[self.dims.idx(h, s, a)]
    }

    /// The chosen action of each row if every row is a point mass.
    pub fn as_deterministic(&self) -> Option<Vec<usize>> {
        (0..self.dims.policy_rows())
            .map(|row| {
                let r = &self.probs[row * self.dims.actions..(row + 1) * self.dims.actions];
                let a = r.iter().position(|&p| p == 1.0)?;
                r.iter()
                    .enumerate()
                    .all(|(b, &p)| b == a || p == 0.0)
                    .then_some(a)
            })
            .collect()
    }

    pub(crate) fn first_invalid_row(&self) -> Option<(usize, usize)> {
        for h in 0..self.dims.horizon {
            for s in 0..self.dims.states {
                let row = self.row(h, s);
                let sum: f64 = row.iter().sum();
                if row.iter().any(|p| !(*p >= 0.0)) || (sum - 1.0).abs() > NORMALIZATION_TOL {
                    return Some((h, s));
                }
            }
        }
        None
    }
}

/// Ground-truth finite-horizon CMDP `(S, A, H, P, r, c, τ, μ)`.
///
/// Fields are public so malformed instances can be built and diagnosed with
/// [`TabularCmdp::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct TabularCmdp {
    pub dims: Dims,
    pub transitions: Kernel,
    pub reward: StepTable,
    pub cost: StepTable,
    pub threshold: f64,
    pub initial_dist: Vec<f64>,
}

/// One broken invariant of a [`TabularCmdp`]. Steps are reported 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelViolation {
    EmptyDimension(&'static str),
    Length {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    TransitionRowSum {
        step: usize,
        state: usize,
        action: usize,
        sum: f64,
    },
    NegativeTransition {
        step: usize,
        state: usize,
        action: usize,
        next: usize,
        value: f64,
    },
    InitialDistSum(f64),
    NegativeInitial { state: usize, value: f64 },
    RewardOutOfRange {
        step: usize,
        state: usize,
        action: usize,
        value: f64,
    },
    CostOutOfRange {
        step: usize,
        state: usize,
        action: usize,
        value: f64,
    },
    ThresholdOutOfRange { threshold: f64, horizon: usize },
}

impl fmt::Display for ModelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyDimension(name) => write!(f, "{name} must be positive"),
            Self::Length {
                field,
                expected,
                found,
            } => write!(f, "{field} has {found} entries, expected {expected}"),
            Self::TransitionRowSum {
                step,
                state,
                action,
                sum,
            } => write!(
                f,
                "transition row (h={step},s={state},a={action}) sums to {sum}"
            ),
            Self::NegativeTransition {
                step,
                state,
                action,
                next,
                value,
            } => write!(
                f,
                "transition (h={step},s={state},a={action},s'={next}) is negative: {value}"
            ),
            Self::InitialDistSum(sum) => write!(f, "initial distribution sums to {sum}"),
            Self::NegativeInitial { state, value } => {
                write!(f, "initial distribution entry s={state} is negative: {value}")
            }
            Self::RewardOutOfRange {
                step,
                state,
                action,
                value,
            } => write!(
                f,
                "reward (h={step},s={state},a={action}) = {value} outside [0,1]"
            ),
            Self::CostOutOfRange {
                step,
                state,
                action,
                value,
            } => write!(
                f,
                "cost (h={step},s={state},a={action}) = {value} outside [0,1]"
            ),
            Self::ThresholdOutOfRange { threshold, horizon } => write!(
                f,
                "threshold out of (0,H]: tau={threshold}, H={horizon}"
            ),
        }
    }
}

impl TabularCmdp {
    /// Assembles a model and rejects it unless every invariant holds.
    pub fn new(
        transitions: Kernel,
        reward: StepTable,
        cost: StepTable,
        threshold: f64,
        initial_dist: Vec<f64>,
    ) -> core::result::Result<Self, Vec<ModelViolation>> {
        let model = Self {
            dims: transitions.dims,
            transitions,
            reward,
            cost,
            threshold,
            initial_dist,
        };
        let violations = model.validate();
        if violations.is_empty() {
            Ok(model)
        } else {
            Err(violations)
        }
    }

    /// Lists every invariant breach. An empty list means the model is valid.
    pub fn validate(&self) -> Vec<ModelViolation> {
        let mut out = Vec::new();
        let d = self.dims;
        for (name, n) in [
            ("num_states", d.states),
            ("num_actions", d.actions),
            ("horizon", d.horizon),
        ] {
            if n == 0 {
                out.push(ModelViolation::EmptyDimension(name));
            }
        }
        let mut lengths_ok = out.is_empty();
        for (field, expected, found) in [
            ("transitions", d.kernel_len(), self.transitions.probs.len()),
            ("reward", d.step_len(), self.reward.values.len()),
            ("cost", d.step_len(), self.cost.values.len()),
            ("initial_dist", d.states, self.initial_dist.len()),
        ] {
            if expected != found {
                out.push(ModelViolation::Length {
                    field,
                    expected,
                    found,
                });
                lengths_ok = false;
            }
        }
        if self.transitions.dims != d || self.reward.dims != d || self.cost.dims != d {
            lengths_ok = false;
            out.push(ModelViolation::Length {
                field: "table dimensions",
                expected: d.step_len(),
                found: 0,
            });
        }

        if lengths_ok {
            for h in 0..d.horizon {
                for s in 0..d.states {
                    for a in 0..d.actions {
                        let row = self.transitions.row(h, s, a);
                        for (next, &p) in row.iter().enumerate() {
                            if !(p >= 0.0) {
                                out.push(ModelViolation::NegativeTransition {
                                    step: h + 1,
                                    state: s,
                                    action: a,
                                    next,
                                    value: p,
                                });
                            }
                        }
                        let sum: f64 = row.iter().sum();
                        if !((sum - 1.0).abs() <= NORMALIZATION_TOL) {
                            out.push(ModelViolation::TransitionRowSum {
                                step: h + 1,
                                state: s,
                                action: a,
                                sum,
                            });
                        }
                        let r = self.reward.get(h, s, a);
                        if !(0.0..=1.0).contains(&r) {
                            out.push(ModelViolation::RewardOutOfRange {
                                step: h + 1,
                                state: s,
                                action: a,
                                value: r,
                            });
                        }
                        let c = self.cost.get(h, s, a);
                        if !(0.0..=1.0).contains(&c) {
                            out.push(ModelViolation::CostOutOfRange {
                                step: h + 1,
                                state: s,
                                action: a,
                                value: c,
                            });
                        }
                    }
                }
            }
            for (state, &value) in self.initial_dist.iter().enumerate() {
                if !(value >= 0.0) {
                    out.push(ModelViolation::NegativeInitial { state, value });
                }
            }
            let sum: f64 = self.initial_dist.iter().sum();
            if !((sum - 1.0).abs() <= NORMALIZATION_TOL) {
                out.push(ModelViolation::InitialDistSum(sum));
            }
        }

        if !(self.threshold > 0.0 && self.threshold <= d.horizon as f64) {
            out.push(ModelViolation::ThresholdOutOfRange {
                threshold: self.threshold,
                horizon: d.horizon,
            });
        }
        out
    }
}
