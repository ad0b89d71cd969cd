use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("deterministic policy count {count} exceeds enumeration cap {cap}")]
    EnumerationCap { count: u128, cap: u128 },

    #[error("no policy satisfies the cost threshold")]
    Infeasible,

    #[error("threshold {tau} must exceed the safe cost bound {safe_cost}")]
    ThresholdNotAboveSafeCost { tau: f64, safe_cost: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("malformed trajectory: {0}")]
    MalformedTrajectory(String),

    #[error("simplex numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("pessimistic policy LP is infeasible although the safe-policy test admitted it")]
    PessimisticLpInfeasible,

    #[error("burn-in scan exceeded cap of {0} episodes")]
    BurnInCapExceeded(u64),
}
