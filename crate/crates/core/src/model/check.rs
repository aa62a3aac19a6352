use std::collections::HashMap;
use std::fmt;

use super::{CuttingPlan, ItemId};

/// One broken constraint of the divisible-item model.
///
/// `constraint` is the model row number:
/// 3 length conservation (and residual placed outside its dividing stock),
/// 4 demand satisfaction, 5 residual usage, 6 one division per stock,
/// 7 residual ≥ θ, 8 piece ≥ θ and piece + residual = item length,
/// 9 leftover classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub constraint: u8,
    pub stock: Option<usize>,
    pub detail: String,
}

impl Violation {
    fn at(constraint: u8, stock: usize, detail: String) -> Self {
        Self {
            constraint,
            stock: Some(stock),
            detail,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stock {
            Some(j) => write!(
                f,
                "constraint ({}) stock {}: {}",
                self.constraint, j, self.detail
            ),
            None => write!(f, "constraint ({}): {}", self.constraint, self.detail),
        }
    }
}

/// Evaluates every model constraint on the plan and lists all violations.
pub fn check_plan_feasibility(plan: &CuttingPlan) -> Result<(), Vec<Violation>> {
    let inst = &plan.instance;
    let params = &plan.params;
    let c = u128::from(inst.stock_length);
    let mut out = Vec::new();

    let mut whole: HashMap<ItemId, u64> = HashMap::new();
    // (item, unit) -> stocks where it is divided
    let mut divided: HashMap<(ItemId, u32), Vec<(usize, u64)>> = HashMap::new();
    // (item, unit) -> stocks and lengths of placed residuals
    let mut placed: HashMap<(ItemId, u32), Vec<(usize, u64)>> = HashMap::new();

    for (pos, p) in plan.patterns.iter().enumerate() {
        let j = pos + 1;
        if p.stock_index != j {
            out.push(Violation::at(
                3,
                j,
                format!("stock index {} out of sequence", p.stock_index),
            ));
        }

        let mut load = 0u128;
        for &(id, count) in &p.whole_items {
            match inst.item(id) {
                Some(item) => {
                    load += u128::from(item.length) * u128::from(count);
                    *whole.entry(id).or_default() += u64::from(count);
                }
                None => out.push(Violation::at(4, j, format!("unknown item {id}"))),
            }
        }
        for d in &p.divisions {
            load += u128::from(d.piece_here);
            divided
                .entry((d.item_id, d.unit_index))
                .or_default()
                .push((j, d.residual));
            let Some(item) = inst.item(d.item_id) else {
                out.push(Violation::at(
                    4,
                    j,
                    format!("division of unknown item {}", d.item_id),
                ));
                continue;
            };
            if d.residual < params.theta {
                out.push(Violation::at(
                    7,
                    j,
                    format!(
                        "residual {} of item {} unit {} below theta {}",
                        d.residual, d.item_id, d.unit_index, params.theta
                    ),
                ));
            }
            if d.piece_here < params.theta {
                out.push(Violation::at(
                    8,
                    j,
                    format!(
                        "piece {} of item {} unit {} below theta {}",
                        d.piece_here, d.item_id, d.unit_index, params.theta
                    ),
                ));
            }
            if u128::from(d.piece_here) + u128::from(d.residual) != u128::from(item.length) {
                out.push(Violation::at(
                    8,
                    j,
                    format!(
                        "piece {} + residual {} != item length {}",
                        d.piece_here, d.residual, item.length
                    ),
                ));
            }
        }
        for r in &p.placed_residuals {
            load += u128::from(r.length);
            placed
                .entry((r.item_id, r.unit_index))
                .or_default()
                .push((j, r.length));
        }

        if load + u128::from(p.trim) != c {
            out.push(Violation::at(
                3,
                j,
                format!(
                    "cut length {} + trim {} != stock length {}",
                    load, p.trim, inst.stock_length
                ),
            ));
        }
        if p.divisions.len() > 1 {
            out.push(Violation::at(
                6,
                j,
                format!("{} divisions in one stock", p.divisions.len()),
            ));
        }
        if p.leftover_usable != params.is_usable(p.trim) {
            out.push(Violation::at(
                9,
                j,
                format!(
                    "leftover {} marked usable={} with beta {}",
                    p.trim, p.leftover_usable as u8, params.beta
                ),
            ));
        }
    }

    for item in &inst.items {
        let units: Vec<u32> = divided
            .keys()
            .filter(|(id, _)| *id == item.id)
            .map(|&(_, k)| k)
            .collect();
        let divided_units: u64 = divided
            .iter()
            .filter(|((id, _), _)| *id == item.id)
            .map(|(_, at)| at.len() as u64)
            .sum();
        let total = whole.get(&item.id).copied().unwrap_or(0) + divided_units;
        if total != u64::from(item.demand) {
            out.push(Violation {
                constraint: 4,
                stock: None,
                detail: format!(
                    "item {} placed {} times, demand {}",
                    item.id, total, item.demand
                ),
            });
        }
        for k in units {
            if k == 0 || k > item.demand {
                out.push(Violation {
                    constraint: 4,
                    stock: None,
                    detail: format!("item {} unit {} outside 1..={}", item.id, k, item.demand),
                });
            }
        }
    }

    let mut keys: Vec<_> = divided.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let at = &divided[&key];
        let (id, k) = key;
        if at.len() > 1 {
            out.push(Violation::at(
                4,
                at[1].0,
                format!("item {id} unit {k} divided {} times", at.len()),
            ));
        }
        let (j, residual) = at[0];
        let uses = placed.get(&key).map_or(&[][..], Vec::as_slice);
        if uses.len() != 1 {
            out.push(Violation::at(
                5,
                j,
                format!("residual of item {id} unit {k} placed {} times", uses.len()),
            ));
        }
        for &(l, len) in uses {
            if l == j {
                out.push(Violation::at(
                    3,
                    l,
                    format!("residual of item {id} unit {k} placed in its own dividing stock"),
                ));
            }
            if len != residual {
                out.push(Violation::at(
                    5,
                    l,
                    format!(
                        "residual of item {id} unit {k} has length {len}, division left {residual}"
                    ),
                ));
            }
        }
    }
    let mut orphans: Vec<_> = placed
        .iter()
        .filter(|(key, _)| !divided.contains_key(key))
        .flat_map(|(&(id, k), at)| at.iter().map(move |&(l, _)| (l, id, k)))
        .collect();
    orphans.sort_unstable();
    for (l, id, k) in orphans {
        out.push(Violation::at(
            5,
            l,
            format!("residual of item {id} unit {k} has no division"),
        ));
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
