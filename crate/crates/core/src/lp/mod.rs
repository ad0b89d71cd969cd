//! Occupancy-measure linear programs and the simplex solver behind them.

mod occupancy;
pub mod simplex;

pub use occupancy::{
    build_occupancy_lp, occupancy_to_policy, solve_cmdp_exact, solve_lp, ExactSolution, LpOutcome,
    OccupancyLp,
};
pub use simplex::{Constraint, LinearProgram, LpSolution, LpStatus};
