//! Subset-sum dynamic programming heuristic.
//!
//! Each iteration fills one stock: array A gives every reachable fill level
//! of the pending pieces, array B the division that would complete the stock
//! from a given level, and the cheaper of the two patterns is committed.
//! A division turns one pending unit into a residual lot that is packed like
//! any other piece in a later stock.

mod arrays;
mod pool;

use std::collections::HashMap;

use thiserror::Error;

pub use arrays::{
    build_array_a, build_array_b, select_pattern, ArrayA, ArrayB, DivisionCandidate, DpCell,
    DpError, Selection,
};
pub use pool::{KindSource, PendingPool, PoolKind};

use crate::model::{
    plan_cost, CuttingPlan, Division, Instance, ItemId, Params, PlacedResidual, StockPattern,
};

/// Largest DP row the heuristic will allocate.
pub const MAX_DP_CAPACITY: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeuristicError {
    #[error(transparent)]
    Dp(#[from] DpError),
    #[error("stock length {0} exceeds the DP limit of {MAX_DP_CAPACITY}")]
    CapacityTooLarge(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DivisionMode {
    #[default]
    Enabled,
    /// Array B is never built; the classical pure-pattern heuristic.
    Disabled,
}

/// Runs the stock-by-stock loop with and without divisions and keeps the
/// cheaper plan (fewer welds on a tie).
///
/// A division is only taken when it is cheaper for the stock at hand, but its
/// residual can end up in a stock that would have been just as wasteful, so
/// the division run alone may cost more than the classical one.
pub fn solve_heuristic(
    instance: &Instance,
    params: &Params,
) -> Result<CuttingPlan, HeuristicError> {
    let divided = solve_heuristic_with(instance, params, DivisionMode::Enabled)?;
    if divided.weld_count() == 0 {
        return Ok(divided);
    }
    let classical = solve_heuristic_with(instance, params, DivisionMode::Disabled)?;
    if plan_cost(&classical) <= plan_cost(&divided) {
        Ok(classical)
    } else {
        Ok(divided)
    }
}

pub fn solve_heuristic_with(
    instance: &Instance,
    params: &Params,
    mode: DivisionMode,
) -> Result<CuttingPlan, HeuristicError> {
    let c = instance.stock_length;
    if c > MAX_DP_CAPACITY {
        return Err(HeuristicError::CapacityTooLarge(c));
    }
    let mut pool = PendingPool::for_instance(instance);
    let mut next_unit: HashMap<ItemId, u32> = instance.items.iter().map(|it| (it.id, 1)).collect();
    let mut patterns = Vec::new();

    while !pool.is_empty() {
        let capacity = pool.total_length().min(u128::from(c)) as usize;
        let a = if capacity as u64 == c {
            arrays::build_array_a_until_full(&pool, capacity)
        } else {
            build_array_a(&pool, capacity)
        };
        let selection = if a.cell(c as usize).is_reachable() {
            Selection {
                fill: c as usize,
                division: None,
                trim: 0,
                cost: 0.into(),
            }
        } else {
            let b = match mode {
                DivisionMode::Enabled => build_array_b(&a, &pool, c, params),
                DivisionMode::Disabled => ArrayB::empty(capacity),
            };
            select_pattern(&a, &b, c, params)?
        };

        let mut used = a.reconstruct(selection.fill)?;
        used.sort_unstable();
        let mut whole_items = Vec::new();
        let mut placed_residuals = Vec::new();
        for &(kind, count) in &used {
            let k = pool.kinds()[kind];
            match k.source {
                KindSource::Whole => {
                    whole_items.push((k.item_id, count));
                    *next_unit.get_mut(&k.item_id).expect("known item") += count;
                }
                KindSource::Residual { unit_index } => placed_residuals.push(PlacedResidual {
                    item_id: k.item_id,
                    unit_index,
                    length: k.length,
                }),
            }
        }
        let mut divisions = Vec::new();
        let mut new_lot = None;
        if let Some(cand) = selection.division {
            let slot = next_unit.get_mut(&cand.item_id).expect("known item");
            divisions.push(Division {
                item_id: cand.item_id,
                unit_index: *slot,
                piece_here: cand.piece_here,
                residual: cand.residual,
            });
            new_lot = Some(PoolKind::residual(cand.item_id, *slot, cand.residual));
            *slot += 1;
            used.push((cand.kind, 1));
        }

        // Merge takes per kind, then remove from the back so indices stay valid.
        let mut takes: Vec<(usize, u32)> = Vec::new();
        used.sort_unstable();
        for (kind, count) in used {
            match takes.last_mut() {
                Some((k, n)) if *k == kind => *n += count,
                _ => takes.push((kind, count)),
            }
        }
        for &(kind, count) in takes.iter().rev() {
            pool.take(kind, count);
        }
        if let Some(lot) = new_lot {
            pool.push_residual(lot);
        }

        placed_residuals.sort_unstable();
        let pattern = StockPattern::fill(
            patterns.len() + 1,
            whole_items,
            divisions,
            placed_residuals,
            instance,
            params,
        )
        .expect("selected pattern fits the stock");
        debug_assert_eq!(pattern.trim, selection.trim);
        patterns.push(pattern);
    }

    Ok(CuttingPlan {
        instance: instance.clone(),
        params: params.clone(),
        patterns,
    })
}
