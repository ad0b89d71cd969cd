//! Tabular constrained Markov decision processes and safe exploration.
//!
//! This crate is the allocation-only algorithmic core: model types, exact
//! policy evaluation and occupancy measures, a dense simplex solver for
//! occupancy-measure linear programs, empirical model estimation with
//! confidence bonuses, and the two safe-exploration agents:
//!
//! - [`OptPessLpAgent`]: plays a known strictly safe policy until the
//!   pessimistic cost estimate certifies a safe policy set, then solves an
//!   optimistic LP inside that set. Zero constraint violation on the good
//!   event.
//! - [`OptPessPdAgent`]: optimistic primal dynamic programming with a
//!   pessimistically inflated projected dual update. Bounded constraint
//!   violation without knowledge of a safe policy.
//!
//! Simulation, experiment orchestration and file formats live in the
//! `optpess-lab` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod agent;
mod enumerate;
mod error;
mod estimation;
mod eval;
pub mod lp;
mod math;
mod model;
mod optpess_lp;
mod optpess_pd;

pub use agent::{Branch, Diagnostics, EpisodicAgent};
pub use enumerate::{
    brute_force_cmdp_optimum, deterministic_policy_from_index, enumerate_deterministic_policies,
    BruteForceOptimum, DeterministicPolicies, PolicyMixture, DEFAULT_ENUMERATION_CAP,
};
pub use error::Error;
pub use estimation::{
    biased_tables_lp, biased_tables_pd, confidence_radius, scaling_alpha_r, ConfidenceConfig,
    EmpiricalModel, Step, Trajectory,
};
pub use eval::{
    backward_induction, evaluate_policy, policy_occupancy, solve_unconstrained, OccupancyMeasure,
    QTable, ValueFunctions,
};
pub use lp::{
    build_occupancy_lp, occupancy_to_policy, solve_cmdp_exact, solve_lp, ExactSolution, LpOutcome,
    LpStatus, OccupancyLp,
};
pub use model::{Dims, Kernel, MarkovPolicy, ModelViolation, StepTable, TabularCmdp};
pub use optpess_lp::OptPessLpAgent;
pub use optpess_pd::{
    burn_in_episodes, delta_prime, dual_update, epsilon_k, eta_k, lagrangian_policy,
    truncated_values, OptPessPdAgent, PdDiagnostics, ValueKind, BURN_IN_CAP,
};

/// Tolerance for exact backward/forward recursions.
pub const EXACT_TOL: f64 = 1e-12;

/// Tolerance used to decide whether a true cost value exceeds the threshold.
pub const VIOLATION_TOL: f64 = 1e-10;

pub type Result<T, E = Error> = core::result::Result<T, E>;
