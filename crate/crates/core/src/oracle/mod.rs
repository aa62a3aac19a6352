//! Exhaustive exact solvers for desk-scale instances.
//!
//! These exist to certify the heuristic: a brute-force bounded subset sum
//! for array A, and optimal plans for the classical and divisible models.
//! Inputs beyond [`OracleLimits`] are refused instead of run unbounded.

mod search;

use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::dp::PendingPool;
use crate::model::{Cost, CuttingPlan, Instance, Params};

/// Upper bound on Π(v_i + 1) for [`subset_sum_oracle`].
pub const SUBSET_ENUMERATION_LIMIT: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_total_units: u32,
    pub max_stock_length: u64,
    pub time_budget: Duration,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_total_units: 8,
            max_stock_length: 64,
            time_budget: Duration::from_secs(10),
        }
    }
}

/// What was too big.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SizeReport {
    Units { units: u64, limit: u32 },
    StockLength { length: u64, limit: u64 },
    Enumeration { combinations: u128, limit: u128 },
    TimeBudget { budget: Duration, states: usize },
}

impl fmt::Display for SizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeReport::Units { units, limit } => {
                write!(f, "{units} demand units exceed the limit of {limit}")
            }
            SizeReport::StockLength { length, limit } => {
                write!(f, "stock length {length} exceeds the limit of {limit}")
            }
            SizeReport::Enumeration {
                combinations,
                limit,
            } => {
                write!(f, "{combinations} combinations exceed the limit of {limit}")
            }
            SizeReport::TimeBudget { budget, states } => write!(
                f,
                "search exceeded the {:.1}s budget after {states} states",
                budget.as_secs_f64()
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("limit exceeded: {0}")]
    LimitExceeded(SizeReport),
}

/// Largest sum `≤ cap` reachable with at most `available` pieces per kind,
/// by enumerating every multiplicity vector.
pub fn subset_sum_oracle(pool: &PendingPool, cap: u64) -> Result<u64, OracleError> {
    let kinds = pool.kinds();
    let combinations = kinds
        .iter()
        .try_fold(1u128, |acc, k| acc.checked_mul(u128::from(k.available) + 1))
        .unwrap_or(u128::MAX);
    if combinations > SUBSET_ENUMERATION_LIMIT {
        return Err(OracleError::LimitExceeded(SizeReport::Enumeration {
            combinations,
            limit: SUBSET_ENUMERATION_LIMIT,
        }));
    }

    let cap = u128::from(cap);
    let mut counts = vec![0u32; kinds.len()];
    let mut best = 0u128;
    loop {
        let sum: u128 = counts
            .iter()
            .zip(kinds)
            .map(|(&x, k)| u128::from(x) * u128::from(k.length))
            .sum();
        if sum <= cap && sum > best {
            best = sum;
        }
        // odometer step
        let mut i = 0;
        loop {
            if i == counts.len() {
                return Ok(best as u64);
            }
            if counts[i] < kinds[i].available {
                counts[i] += 1;
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}

/// An optimal plan together with its objective value.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub plan: CuttingPlan,
    pub cost: Cost,
}

/// Minimum counted trim Σ t_j·u_j without divisions; ties go to fewer stocks.
/// The returned plan carries `params` (with β from `params`) and its cost is
/// the counted trim itself.
pub fn exact_solve_classical(
    instance: &Instance,
    beta: u64,
    limits: &OracleLimits,
) -> Result<OracleSolution, OracleError> {
    let params = Params::new(beta, 1, Cost::from_integer(1), Cost::from_integer(0))
        .expect("valid classical params");
    search::solve(instance, &params, false, limits)
}

/// Minimum γ·Σ t_j·u_j + δ·welds over every feasible plan with divisions.
pub fn exact_solve_divisible(
    instance: &Instance,
    params: &Params,
    limits: &OracleLimits,
) -> Result<OracleSolution, OracleError> {
    search::solve(instance, params, true, limits)
}
