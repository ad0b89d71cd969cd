//! Dense revised simplex with Bland's anti-cycling rule.
//!
//! Problems are converted to standard form `A x = b, x ≥ 0, b ≥ 0` by adding
//! one slack per inequality row and one artificial per row. Phase one
//! minimizes the artificial sum; phase two maximizes the objective with
//! artificials barred from re-entering. The basis inverse is kept explicitly
//! and rebuilt by Gauss-Jordan elimination every [`REFACTOR_PERIOD`] pivots.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Smallest admissible ratio-test pivot.
const PIVOT_TOL: f64 = 1e-9;
/// A refactorization pivot below this is a numerical breakdown.
const BREAKDOWN_TOL: f64 = 1e-11;
/// Phase-one optimum above this means the constraints are infeasible.
const INFEASIBILITY_TOL: f64 = 1e-9;
const OPTIMALITY_TOL_ABS: f64 = 1e-9;
const OPTIMALITY_TOL_REL: f64 = 1e-10;
const FEASIBILITY_TOL_ABS: f64 = 1e-8;
const FEASIBILITY_TOL_REL: f64 = 1e-10;
const REFACTOR_PERIOD: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

/// `maximize objective·x` subject to `equalities`, `upper_bounds` (`row·x ≤
/// rhs`) and `x ≥ 0`. Rows are dense over `num_vars`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub equalities: Vec<Constraint>,
    pub upper_bounds: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Optimal => "optimal",
            Self::Infeasible => "infeasible",
            Self::Unbounded => "unbounded",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; meaningful only when `status` is optimal.
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub pivots: usize,
}

impl LinearProgram {
    fn check(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                what: "objective",
                expected: self.num_vars,
                found: self.objective.len(),
            });
        }
        for row in self.equalities.iter().chain(&self.upper_bounds) {
            if row.coeffs.len() != self.num_vars {
                return Err(Error::DimensionMismatch {
                    what: "constraint row",
                    expected: self.num_vars,
                    found: row.coeffs.len(),
                });
            }
        }
        Ok(())
    }

    /// Largest absolute violation of any constraint (negative entries of
    /// `x` included).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let dot = |row: &Constraint| -> f64 { row.coeffs.iter().zip(x).map(|(a, v)| a * v).sum() };
        let eq = self
            .equalities
            .iter()
            .map(|r| (dot(r) - r.rhs).abs())
            .fold(0.0, f64::max);
        let le = self
            .upper_bounds
            .iter()
            .map(|r| (dot(r) - r.rhs).max(0.0))
            .fold(0.0, f64::max);
        let neg = x.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
        eq.max(le).max(neg)
    }

    /// Absolute feasibility tolerance, relaxed for badly scaled rows.
    pub fn feasibility_tol(&self) -> f64 {
        let scale = self
            .equalities
            .iter()
            .chain(&self.upper_bounds)
            .flat_map(|r| r.coeffs.iter().chain(core::iter::once(&r.rhs)))
            .fold(0.0f64, |m, v| m.max(v.abs()));
        FEASIBILITY_TOL_ABS.max(FEASIBILITY_TOL_REL * scale)
    }
}

struct Revised {
    m: usize,
    n_orig: usize,
    first_artificial: usize,
    /// Column-major `m × n_total`.
    cols: Vec<f64>,
    b: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Row-major `m × m`.
    binv: Vec<f64>,
    xb: Vec<f64>,
    since_refactor: usize,
    pivots: usize,
    max_pivots: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Revised {
    fn new(lp: &LinearProgram) -> Self {
        let m = lp.equalities.len() + lp.upper_bounds.len();
        let n_orig = lp.num_vars;
        let n_slack = lp.upper_bounds.len();
        let first_artificial = n_orig + n_slack;
        let n_total = first_artificial + m;
        let mut cols = vec![0.0; m * n_total];
        let mut b = vec![0.0; m];

        let rows = lp
            .equalities
            .iter()
            .map(|r| (r, None))
            .chain(lp.upper_bounds.iter().enumerate().map(|(k, r)| (r, Some(k))));
        for (i, (row, slack)) in rows.enumerate() {
            let sign = if row.rhs < 0.0 { -1.0 } else { 1.0 };
            for (j, &a) in row.coeffs.iter().enumerate() {
                cols[j * m + i] = sign * a;
            }
            if let Some(k) = slack {
                cols[(n_orig + k) * m + i] = sign;
            }
            cols[(first_artificial + i) * m + i] = 1.0;
            b[i] = sign * row.rhs;
        }

        let mut is_basic = vec![false; n_total];
        let basis: Vec<usize> = (first_artificial..n_total).collect();
        for &j in &basis {
            is_basic[j] = true;
        }
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            binv[i * m + i] = 1.0;
        }
        Self {
            m,
            n_orig,
            first_artificial,
            cols,
            xb: b.clone(),
            b,
            basis,
            is_basic,
            binv,
            since_refactor: 0,
            pivots: 0,
            max_pivots: 20_000 + 50 * n_total,
        }
    }

    fn n_total(&self) -> usize {
        self.first_artificial + self.m
    }

    #[inline]
    fn col(&self, j: usize) -> &[f64] {
        &self.cols[j * self.m..(j + 1) * self.m]
    }

    fn binv_times(&self, v: &[f64]) -> Vec<f64> {
        let m = self.m;
        (0..m)
            .map(|i| {
                self.binv[i * m..(i + 1) * m]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        // Augmented [B | I], eliminated in place.
        let mut a = vec![0.0; m * 2 * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for i in 0..m {
                a[i * 2 * m + k] = self.cols[j * m + i];
            }
        }
        for i in 0..m {
            a[i * 2 * m + m + i] = 1.0;
        }
        for k in 0..m {
            let (p, best) = (k..m)
                .map(|i| (i, a[i * 2 * m + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best < BREAKDOWN_TOL {
                return Err(Error::NumericalBreakdown(format!(
                    "basis matrix singular at column {k} (pivot {best:e})"
                )));
            }
            if p != k {
                for c in 0..2 * m {
                    a.swap(p * 2 * m + c, k * 2 * m + c);
                }
            }
            let pivot = a[k * 2 * m + k];
            for c in 0..2 * m {
                a[k * 2 * m + c] /= pivot;
            }
            for i in 0..m {
                if i == k {
                    continue;
                }
                let f = a[i * 2 * m + k];
                if f == 0.0 {
                    continue;
                }
                for c in 0..2 * m {
                    a[i * 2 * m + c] -= f * a[k * 2 * m + c];
                }
            }
        }
        for i in 0..m {
            self.binv[i * m..(i + 1) * m].copy_from_slice(&a[i * 2 * m + m..(i + 1) * 2 * m]);
        }
        self.xb = self.binv_times(&self.b);
        self.since_refactor = 0;
        Ok(())
    }

    fn pivot(&mut self, r: usize, enter: usize, u: &[f64]) -> Result<()> {
        let m = self.m;
        let ur = u[r];
        let t = self.xb[r] / ur;
        for i in 0..m {
            if i != r {
                self.xb[i] -= t * u[i];
            }
        }
        self.xb[r] = t;
        for c in 0..m {
            self.binv[r * m + c] /= ur;
        }
        for i in 0..m {
            if i == r || u[i] == 0.0 {
                continue;
            }
            let f = u[i];
            for c in 0..m {
                self.binv[i * m + c] -= f * self.binv[r * m + c];
            }
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[enter] = true;
        self.basis[r] = enter;
        self.pivots += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_PERIOD {
            self.refactor()?;
        }
        if self.pivots > self.max_pivots {
            return Err(Error::NumericalBreakdown(format!(
                "pivot limit {} exceeded",
                self.max_pivots
            )));
        }
        Ok(())
    }

    /// Maximizes `cost·x` over the current feasible basis, letting only
    /// columns below `enter_limit` enter.
    fn run(&mut self, cost: &[f64], enter_limit: usize, tol: f64) -> Result<PhaseEnd> {
        let m = self.m;
        loop {
            let mut y = vec![0.0; m];
            for (i, &j) in self.basis.iter().enumerate() {
                let cb = cost[j];
                if cb == 0.0 {
                    continue;
                }
                for k in 0..m {
                    y[k] += cb * self.binv[i * m + k];
                }
            }
            // Bland: lowest-index improving column.
            let enter = (0..enter_limit).find(|&j| {
                !self.is_basic[j]
                    && cost[j] - self.col(j).iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() > tol
            });
            let Some(enter) = enter else {
                return Ok(PhaseEnd::Optimal);
            };
            let u = self.binv_times(self.col(enter));

            let mut t_min = f64::INFINITY;
            for i in 0..m {
                if u[i] > PIVOT_TOL {
                    t_min = t_min.min(self.xb[i].max(0.0) / u[i]);
                }
            }
            if !t_min.is_finite() {
                return Ok(PhaseEnd::Unbounded);
            }
            let slack = 1e-12 * (1.0 + t_min);
            let leave = (0..m)
                .filter(|&i| u[i] > PIVOT_TOL && self.xb[i].max(0.0) / u[i] <= t_min + slack)
                .min_by_key(|&i| self.basis[i])
                .expect("at least one row attains the minimum ratio");
            self.pivot(leave, enter, &u)?;
        }
    }

    /// Pivots zero-level artificials out of the basis where a structural
    /// column can replace them. Rows where none can are redundant.
    fn drive_out_artificials(&mut self) -> Result<()> {
        let m = self.m;
        for r in 0..m {
            if self.basis[r] < self.first_artificial {
                continue;
            }
            let row: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
            let candidate = (0..self.first_artificial).find(|&j| {
                !self.is_basic[j]
                    && self.col(j).iter().zip(&row).map(|(a, b)| a * b).sum::<f64>().abs() > PIVOT_TOL
            });
            if let Some(j) = candidate {
                let u = self.binv_times(self.col(j));
                self.pivot(r, j, &u)?;
            }
        }
        Ok(())
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n_orig];
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.n_orig {
                x[j] = self.xb[i].max(0.0);
            }
        }
        x
    }
}

/// Solves `lp` to optimality, or reports infeasibility or unboundedness.
pub fn maximize(lp: &LinearProgram) -> Result<LpSolution> {
    lp.check()?;
    let mut s = Revised::new(lp);
    let n_total = s.n_total();

    let mut phase_one = vec![0.0; n_total];
    phase_one[s.first_artificial..].iter_mut().for_each(|c| *c = -1.0);
    s.run(&phase_one, n_total, OPTIMALITY_TOL_ABS)?;
    let infeasibility: f64 = s
        .basis
        .iter()
        .zip(&s.xb)
        .filter(|(j, _)| **j >= s.first_artificial)
        .map(|(_, v)| v.max(0.0))
        .sum();
    if infeasibility > INFEASIBILITY_TOL {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            x: Vec::new(),
            objective_value: f64::NAN,
            pivots: s.pivots,
        });
    }
    s.drive_out_artificials()?;

    let mut cost = vec![0.0; n_total];
    cost[..s.n_orig].copy_from_slice(&lp.objective);
    let scale = lp.objective.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = OPTIMALITY_TOL_ABS.max(OPTIMALITY_TOL_REL * scale);
    if let PhaseEnd::Unbounded = s.run(&cost, s.first_artificial, tol)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective_value: f64::INFINITY,
            pivots: s.pivots,
        });
    }

    let feas_tol = lp.feasibility_tol();
    let mut x = s.primal();
    if lp.max_violation(&x) > feas_tol {
        s.refactor()?;
        x = s.primal();
        let violation = lp.max_violation(&x);
        if violation > feas_tol {
            return Err(Error::NumericalBreakdown(format!(
                "optimal basis violates constraints by {violation:e}"
            )));
        }
    }
    let objective_value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective_value,
        pivots: s.pivots,
    })
}
