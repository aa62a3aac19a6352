//! Domain model: instances, tuning parameters and cutting plans.

mod check;
mod stats;

use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;
use thiserror::Error;

pub use check::{check_plan_feasibility, Violation};
pub use stats::{compute_stats, PlanStats};

/// Exact rational cost. Lengths stay integral; only γ and δ may be fractional.
pub type Cost = Ratio<i128>;

pub type ItemId = u32;

/// A demanded item type: `demand` copies of a piece `length` millimetres long.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Item {
    pub id: ItemId,
    pub length: u64,
    pub demand: u32,
}

/// Stock length plus the demanded items.
///
/// Instances built through [`validate_instance`] have unique item lengths and
/// ids `1..=n` in order. The exact oracle also accepts hand-built instances
/// with repeated lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub stock_length: u64,
    pub items: Vec<Item>,
}

impl Instance {
    /// Validates `(length, demand)` pairs against `stock_length`.
    pub fn new(stock_length: u64, items: &[(u64, u32)]) -> Result<Self, ValidationReport> {
        let raw = RawInstance {
            stock_length: i128::from(stock_length),
            items: items
                .iter()
                .map(|&(w, v)| (i128::from(w), i128::from(v)))
                .collect(),
        };
        validate_instance(&raw)
    }

    pub fn item(&self, id: ItemId) -> Option<&Item> {
        self.items.iter().find(|it| it.id == id)
    }

    pub fn item_by_length(&self, length: u64) -> Option<&Item> {
        self.items.iter().find(|it| it.length == length)
    }

    pub fn total_units(&self) -> u64 {
        self.items.iter().map(|it| u64::from(it.demand)).sum()
    }

    pub fn total_length(&self) -> u128 {
        self.items
            .iter()
            .map(|it| u128::from(it.length) * u128::from(it.demand))
            .sum()
    }
}

/// Unvalidated instance data, as read from a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawInstance {
    pub stock_length: i128,
    pub items: Vec<(i128, i128)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("stock length must be positive, got {0}")]
    NonPositiveStock(i128),
    #[error("instance has no items")]
    EmptyInstance,
    #[error("item {index}: length must be positive, got {length}")]
    NonPositiveLength { index: usize, length: i128 },
    #[error("item {index}: demand must be positive, got {demand}")]
    NonPositiveDemand { index: usize, demand: i128 },
    #[error("item {index}: length {length} exceeds stock length {stock_length}")]
    ItemExceedsStock {
        index: usize,
        length: i128,
        stock_length: i128,
    },
    #[error("item {index}: value out of range")]
    ValueOutOfRange { index: usize },
}

/// Every violation found while validating an instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationReport(pub Vec<ValidationError>);

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Checks every item and merges duplicate lengths (demands summed, first
/// occurrence keeps its position). Item ids are reassigned `1..=n`.
///
/// Item indices in error messages are 1-based positions in the input.
pub fn validate_instance(raw: &RawInstance) -> Result<Instance, ValidationReport> {
    let mut errors = Vec::new();
    let stock_ok = raw.stock_length >= 1 && raw.stock_length <= i128::from(u64::MAX);
    if raw.stock_length < 1 {
        errors.push(ValidationError::NonPositiveStock(raw.stock_length));
    } else if !stock_ok {
        errors.push(ValidationError::ValueOutOfRange { index: 0 });
    }
    if raw.items.is_empty() {
        errors.push(ValidationError::EmptyInstance);
    }

    let mut merged: Vec<(u64, u32)> = Vec::new();
    let mut position: HashMap<u64, usize> = HashMap::new();
    for (i, &(length, demand)) in raw.items.iter().enumerate() {
        let index = i + 1;
        let mut ok = true;
        if length < 1 {
            errors.push(ValidationError::NonPositiveLength { index, length });
            ok = false;
        } else if stock_ok && length > raw.stock_length {
            errors.push(ValidationError::ItemExceedsStock {
                index,
                length,
                stock_length: raw.stock_length,
            });
            ok = false;
        }
        if demand < 1 {
            errors.push(ValidationError::NonPositiveDemand { index, demand });
            ok = false;
        } else if demand > i128::from(u32::MAX) {
            errors.push(ValidationError::ValueOutOfRange { index });
            ok = false;
        }
        if !ok || !stock_ok {
            continue;
        }
        let (w, v) = (length as u64, demand as u32);
        match position.get(&w) {
            Some(&at) => match merged[at].1.checked_add(v) {
                Some(sum) => merged[at].1 = sum,
                None => errors.push(ValidationError::ValueOutOfRange { index }),
            },
            None => {
                position.insert(w, merged.len());
                merged.push((w, v));
            }
        }
    }

    if !errors.is_empty() {
        return Err(ValidationReport(errors));
    }
    Ok(Instance {
        stock_length: raw.stock_length as u64,
        items: merged
            .into_iter()
            .enumerate()
            .map(|(i, (length, demand))| Item {
                id: i as ItemId + 1,
                length,
                demand,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsError {
    #[error("theta must be at least 1")]
    ZeroTheta,
    #[error("gamma must be nonnegative")]
    NegativeGamma,
    #[error("delta must be nonnegative")]
    NegativeDelta,
}

/// Tuning knobs.
///
/// * `beta`: leftovers of at least this length are banked as usable and do
///   not count as trim loss. `u64::MAX` disables banking.
/// * `theta`: minimum length of either piece of a divided item.
/// * `gamma`: cost of one millimetre of counted trim.
/// * `delta`: cost of one weld.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Params {
    pub beta: u64,
    pub theta: u64,
    pub gamma: Cost,
    pub delta: Cost,
}

impl Default for Params {
    /// The steel-shop operating point: β = θ = 1000 mm, γ = 1, δ = 500.
    fn default() -> Self {
        Self {
            beta: 1000,
            theta: 1000,
            gamma: Cost::from_integer(1),
            delta: Cost::from_integer(500),
        }
    }
}

impl Params {
    pub const NO_BANKING: u64 = u64::MAX;

    pub fn new(beta: u64, theta: u64, gamma: Cost, delta: Cost) -> Result<Self, ParamsError> {
        if theta == 0 {
            return Err(ParamsError::ZeroTheta);
        }
        if gamma < Cost::zero() {
            return Err(ParamsError::NegativeGamma);
        }
        if delta < Cost::zero() {
            return Err(ParamsError::NegativeDelta);
        }
        Ok(Self {
            beta,
            theta,
            gamma,
            delta,
        })
    }

    /// Convenience for integer costs.
    pub fn integral(beta: u64, theta: u64, gamma: i128, delta: i128) -> Result<Self, ParamsError> {
        Self::new(
            beta,
            theta,
            Cost::from_integer(gamma),
            Cost::from_integer(delta),
        )
    }

    pub fn is_usable(&self, trim: u64) -> bool {
        trim >= self.beta
    }

    /// Trim that counts as loss: zero when the leftover is banked.
    pub fn counted_trim(&self, trim: u64) -> u64 {
        if self.is_usable(trim) {
            0
        } else {
            trim
        }
    }

    /// Both pieces must be at least θ long.
    pub fn is_divisible(&self, length: u64) -> bool {
        length >= self.theta.saturating_mul(2)
    }

    pub fn cost_of(&self, counted_trim: u64, welds: u64) -> Cost {
        self.gamma * Cost::from_integer(i128::from(counted_trim))
            + self.delta * Cost::from_integer(i128::from(welds))
    }
}

/// A demand unit cut in two: `piece_here` is cut in the stock holding this
/// record, `residual` is cut in some other stock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Division {
    pub item_id: ItemId,
    pub unit_index: u32,
    pub piece_here: u64,
    pub residual: u64,
}

/// The residual half of a division, placed in a stock other than the one
/// holding the division.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlacedResidual {
    pub item_id: ItemId,
    pub unit_index: u32,
    pub length: u64,
}

/// One stock's cut assignment.
///
/// `divisions` is a list so that malformed plans can be represented and
/// rejected; a feasible pattern holds at most one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StockPattern {
    pub stock_index: usize,
    pub whole_items: Vec<(ItemId, u32)>,
    pub divisions: Vec<Division>,
    pub placed_residuals: Vec<PlacedResidual>,
    pub trim: u64,
    pub leftover_usable: bool,
}

impl StockPattern {
    /// Builds a pattern and derives trim and leftover class from its contents.
    /// Returns `None` if the contents overflow the stock or reference unknown items.
    pub fn fill(
        stock_index: usize,
        whole_items: Vec<(ItemId, u32)>,
        divisions: Vec<Division>,
        placed_residuals: Vec<PlacedResidual>,
        instance: &Instance,
        params: &Params,
    ) -> Option<Self> {
        let mut pattern = Self {
            stock_index,
            whole_items,
            divisions,
            placed_residuals,
            trim: 0,
            leftover_usable: false,
        };
        let load = pattern.load(instance)?;
        let trim = u128::from(instance.stock_length).checked_sub(load)?;
        pattern.trim = trim as u64;
        pattern.leftover_usable = params.is_usable(pattern.trim);
        Some(pattern)
    }

    /// Total length cut from the stock, excluding trim.
    pub fn load(&self, instance: &Instance) -> Option<u128> {
        let mut load = 0u128;
        for &(id, count) in &self.whole_items {
            load += u128::from(instance.item(id)?.length) * u128::from(count);
        }
        load += self
            .divisions
            .iter()
            .map(|d| u128::from(d.piece_here))
            .sum::<u128>();
        load += self
            .placed_residuals
            .iter()
            .map(|r| u128::from(r.length))
            .sum::<u128>();
        Some(load)
    }

    pub fn whole_count(&self, id: ItemId) -> u64 {
        self.whole_items
            .iter()
            .filter(|(i, _)| *i == id)
            .map(|(_, c)| u64::from(*c))
            .sum()
    }
}

/// A full cutting plan over an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuttingPlan {
    pub instance: Instance,
    pub params: Params,
    pub patterns: Vec<StockPattern>,
}

impl CuttingPlan {
    pub fn stocks_used(&self) -> usize {
        self.patterns.len()
    }

    pub fn weld_count(&self) -> u64 {
        self.patterns.iter().map(|p| p.divisions.len() as u64).sum()
    }

    /// Σ t_j over stocks whose leftover is not usable.
    pub fn total_trim_loss(&self) -> u64 {
        self.patterns
            .iter()
            .filter(|p| !p.leftover_usable)
            .map(|p| p.trim)
            .sum()
    }

    /// Renumbers demand units so that, per item, units are taken in stock
    /// order with whole pieces before the divided one. Residual references
    /// follow their divisions. Whole items are listed longest first.
    pub fn canonicalize_units(&mut self) {
        let mut next: HashMap<ItemId, u32> = HashMap::new();
        let mut renumber: HashMap<(ItemId, u32), u32> = HashMap::new();
        for pattern in &mut self.patterns {
            pattern.whole_items.retain(|&(_, c)| c > 0);
            let instance = &self.instance;
            pattern.whole_items.sort_by_key(|&(id, _)| {
                let len = instance.item(id).map_or(0, |it| it.length);
                (std::cmp::Reverse(len), id)
            });
            for &(id, count) in &pattern.whole_items {
                *next.entry(id).or_insert(1) += count;
            }
            for d in &mut pattern.divisions {
                let slot = next.entry(d.item_id).or_insert(1);
                renumber.insert((d.item_id, d.unit_index), *slot);
                d.unit_index = *slot;
                *slot += 1;
            }
        }
        for pattern in &mut self.patterns {
            for r in &mut pattern.placed_residuals {
                if let Some(&k) = renumber.get(&(r.item_id, r.unit_index)) {
                    r.unit_index = k;
                }
            }
            pattern.placed_residuals.sort();
        }
    }
}

/// γ · Σ(t_j·u_j) + δ · welds.
pub fn plan_cost(plan: &CuttingPlan) -> Cost {
    plan.params
        .cost_of(plan.total_trim_loss(), plan.weld_count())
}
