//! Memoised exhaustive search over stock contents.
//!
//! Stocks are filled one at a time. A state is the multiset of untouched
//! units plus the open halves of units already split in an earlier stock.
//! When a unit is split, whichever half is cut first may be either the
//! division piece or the residual, so cyclic arrangements (stock 1 holds the
//! residual of a unit divided in stock 2 and vice versa) are reachable.
//!
//! Split lengths are not enumerated one millimetre at a time. Fix the
//! contents of every stock and which stocks bank their leftover; what is left
//! is a linear program over the split lengths whose constraint matrix is a
//! directed-graph incidence matrix, so an integral optimal vertex exists. At
//! a vertex every split either sits at a θ bound, or belongs to a forest in
//! which all stocks but at most one per tree have leftover exactly 0 or
//! exactly β. Cutting each tree leaves first, every stock opens at most one
//! such free split, and its length is fixed by that stock's own leftover.
//! The search therefore tries bound lengths plus one leftover-sized split per
//! stock, over every stock order; memoisation on the remaining multiset
//! absorbs the order symmetry.

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use num_integer::Integer;

use super::{OracleError, OracleLimits, OracleSolution, SizeReport};
use crate::model::{
    Cost, CuttingPlan, Division, Instance, ItemId, Params, PlacedResidual, StockPattern,
};

const MAX_MEMO_STATES: usize = 3_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
enum Side {
    Division,
    Residual,
}

/// The half of a split unit that still has to be cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Open {
    side: Side,
    ty: u8,
    len: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct State {
    pending: Vec<u8>,
    open: Vec<Open>,
}

impl State {
    fn is_done(&self) -> bool {
        self.open.is_empty() && self.pending.iter().all(|&n| n == 0)
    }
}

#[derive(Debug, Clone, Default)]
struct Choice {
    whole: Vec<(u8, u8)>,
    /// Open halves cut in this stock.
    closed: Vec<Open>,
    /// Units split here: (type, side of the piece cut here, its length).
    split: Vec<(u8, Side, u64)>,
    load: u64,
}

#[derive(Debug, Clone, Copy)]
struct Best {
    cost: i128,
    stocks: u32,
    welds: u32,
    /// Index of the chosen stock in the cost-ordered enumeration.
    choice: u32,
}

impl Best {
    fn key(&self) -> (i128, u32, u32) {
        (self.cost, self.stocks, self.welds)
    }
}

struct Search<'a> {
    c: u64,
    theta: u64,
    beta: u64,
    trim_weight: i128,
    weld_weight: i128,
    divisible: bool,
    lengths: Vec<u64>,
    memo: HashMap<State, Best>,
    started: Instant,
    limits: &'a OracleLimits,
    visits: u64,
}

pub(super) fn solve(
    instance: &Instance,
    params: &Params,
    divisible: bool,
    limits: &OracleLimits,
) -> Result<OracleSolution, OracleError> {
    let units = instance.total_units();
    if units > u64::from(limits.max_total_units.min(u32::from(u8::MAX))) {
        return Err(OracleError::LimitExceeded(SizeReport::Units {
            units,
            limit: limits.max_total_units,
        }));
    }
    if instance.stock_length > limits.max_stock_length {
        return Err(OracleError::LimitExceeded(SizeReport::StockLength {
            length: instance.stock_length,
            limit: limits.max_stock_length,
        }));
    }

    // Integer objective: scale γ and δ by the lcm of their denominators.
    let scale = params.gamma.denom().lcm(params.delta.denom());
    let trim_weight = (params.gamma * Cost::from_integer(scale)).to_integer();
    let weld_weight = (params.delta * Cost::from_integer(scale)).to_integer();

    let mut search = Search {
        c: instance.stock_length,
        theta: params.theta,
        beta: params.beta,
        trim_weight,
        weld_weight,
        divisible,
        lengths: instance.items.iter().map(|it| it.length).collect(),
        memo: HashMap::new(),
        started: Instant::now(),
        limits,
        visits: 0,
    };
    let root = State {
        pending: instance.items.iter().map(|it| it.demand as u8).collect(),
        open: Vec::new(),
    };
    let best = search.best(&root)?;
    let plan = search.replay(root, instance, params);
    Ok(OracleSolution {
        plan,
        cost: Cost::new(best.cost, scale),
    })
}

impl Search<'_> {
    fn stock_cost(&self, load: u64) -> i128 {
        let trim = self.c - load;
        if trim >= self.beta {
            0
        } else {
            self.trim_weight * i128::from(trim)
        }
    }

    fn best(&mut self, state: &State) -> Result<Best, OracleError> {
        if state.is_done() {
            return Ok(Best {
                cost: 0,
                stocks: 0,
                welds: 0,
                choice: 0,
            });
        }
        if let Some(&b) = self.memo.get(state) {
            return Ok(b);
        }
        self.visits += 1;
        if self.visits.is_multiple_of(256) && self.started.elapsed() > self.limits.time_budget
            || self.memo.len() > MAX_MEMO_STATES
        {
            return Err(OracleError::LimitExceeded(SizeReport::TimeBudget {
                budget: self.limits.time_budget,
                states: self.memo.len(),
            }));
        }

        let choices = self.ordered_choices(state);
        let mut best: Option<Best> = None;
        for (index, (immediate, choice)) in choices.iter().enumerate() {
            let welds = choice.split.len() as u32;
            let next = self.apply(state, choice);
            if let Some(b) = &best {
                // the rest costs nothing and needs at least the stocks its material fills
                let bound = (*immediate, 1 + self.min_stocks(&next), welds);
                if bound >= b.key() {
                    continue;
                }
            }
            let rest = self.best(&next)?;
            let cand = Best {
                cost: immediate + rest.cost,
                stocks: rest.stocks + 1,
                welds: rest.welds + welds,
                choice: index as u32,
            };
            if best.is_none_or(|b| cand.key() < b.key()) {
                best = Some(cand);
            }
        }
        let best = best.expect("the forced element always fits an empty stock");
        self.memo.insert(state.clone(), best);
        Ok(best)
    }

    /// All stocks that can be cut next, cheapest first.
    fn ordered_choices(&self, state: &State) -> Vec<(i128, Choice)> {
        let mut choices = Vec::new();
        self.enumerate(state, &mut choices);
        let mut keyed: Vec<(i128, Choice)> = choices
            .into_iter()
            .map(|ch| {
                let cost = self.stock_cost(ch.load) + self.weld_weight * ch.split.len() as i128;
                (cost, ch)
            })
            .collect();
        keyed.sort_by_key(|(cost, ch)| (*cost, ch.split.len(), std::cmp::Reverse(ch.load)));
        keyed
    }

    fn min_stocks(&self, state: &State) -> u32 {
        let material: u64 = state
            .pending
            .iter()
            .zip(&self.lengths)
            .map(|(&n, &w)| u64::from(n) * w)
            .sum::<u64>()
            + state.open.iter().map(|o| o.len).sum::<u64>();
        material.div_ceil(self.c) as u32
    }

    fn apply(&self, state: &State, choice: &Choice) -> State {
        let mut next = state.clone();
        for &(ty, n) in &choice.whole {
            next.pending[ty as usize] -= n;
        }
        for o in &choice.closed {
            let at = next
                .open
                .iter()
                .position(|x| x == o)
                .expect("open half exists");
            next.open.remove(at);
        }
        for &(ty, side, len) in &choice.split {
            next.pending[ty as usize] -= 1;
            let other = match side {
                Side::Division => Side::Residual,
                Side::Residual => Side::Division,
            };
            next.open.push(Open {
                side: other,
                ty,
                len: self.lengths[ty as usize] - len,
            });
        }
        next.open.sort_unstable();
        next
    }

    fn enumerate(&self, state: &State, out: &mut Vec<Choice>) {
        let mut groups: Vec<(Open, u8)> = Vec::new();
        for &o in &state.open {
            match groups.last_mut() {
                Some((g, n)) if *g == o => *n += 1,
                _ => groups.push((o, 1)),
            }
        }
        let types: Vec<u8> = (0..state.pending.len() as u8)
            .filter(|&t| state.pending[t as usize] > 0)
            .collect();
        let mut cur = Choice::default();
        self.open_groups(&groups, 0, &types, state, false, &mut cur, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn open_groups(
        &self,
        groups: &[(Open, u8)],
        g: usize,
        types: &[u8],
        state: &State,
        division_used: bool,
        cur: &mut Choice,
        out: &mut Vec<Choice>,
    ) {
        if g == groups.len() {
            self.unit_types(types, 0, state, division_used, cur, out);
            return;
        }
        let (open, mult) = groups[g];
        let max = match open.side {
            Side::Division if division_used => 0,
            Side::Division => 1,
            Side::Residual => mult,
        };
        for take in 0..=max {
            let extra = u64::from(take) * open.len;
            if cur.load + extra > self.c {
                break;
            }
            cur.load += extra;
            cur.closed.extend(std::iter::repeat_n(open, take as usize));
            let used = division_used || (open.side == Side::Division && take > 0);
            self.open_groups(groups, g + 1, types, state, used, cur, out);
            cur.closed.truncate(cur.closed.len() - take as usize);
            cur.load -= extra;
        }
    }

    fn unit_types(
        &self,
        types: &[u8],
        t: usize,
        state: &State,
        division_used: bool,
        cur: &mut Choice,
        out: &mut Vec<Choice>,
    ) {
        if t == types.len() {
            self.finish(state, division_used, cur, out);
            return;
        }
        let ty = types[t];
        let w = self.lengths[ty as usize];
        let pending = state.pending[ty as usize];
        for whole in 0..=pending {
            let extra = u64::from(whole) * w;
            if cur.load + extra > self.c {
                break;
            }
            cur.load += extra;
            if whole > 0 {
                cur.whole.push((ty, whole));
            }
            let lens = self.bound_lengths(w);
            self.bound_splits(
                types,
                t,
                state,
                division_used,
                pending - whole,
                &lens,
                0,
                cur,
                out,
            );
            if whole > 0 {
                cur.whole.pop();
            }
            cur.load -= extra;
        }
    }

    /// Split lengths at the θ bounds for an item of length `w`.
    fn bound_lengths(&self, w: u64) -> Vec<u64> {
        if !self.divisible || w < self.theta.saturating_mul(2) {
            return Vec::new();
        }
        let (lo, hi) = (self.theta, w - self.theta);
        if lo == hi {
            vec![lo]
        } else {
            vec![lo, hi]
        }
    }

    /// Opens units of `types[t]` with a piece at a θ bound cut here: any
    /// number on the residual side per bound length, then at most one on
    /// the division side.
    #[allow(clippy::too_many_arguments)]
    fn bound_splits(
        &self,
        types: &[u8],
        t: usize,
        state: &State,
        division_used: bool,
        left: u8,
        lens: &[u64],
        i: usize,
        cur: &mut Choice,
        out: &mut Vec<Choice>,
    ) {
        let ty = types[t];
        if i == lens.len() {
            self.unit_types(types, t + 1, state, division_used, cur, out);
            if division_used || left == 0 {
                return;
            }
            for &len in lens {
                if cur.load + len > self.c {
                    continue;
                }
                cur.load += len;
                cur.split.push((ty, Side::Division, len));
                self.unit_types(types, t + 1, state, true, cur, out);
                cur.split.pop();
                cur.load -= len;
            }
            return;
        }
        let len = lens[i];
        for n in 0..=left {
            let extra = u64::from(n) * len;
            if cur.load + extra > self.c {
                break;
            }
            cur.load += extra;
            cur.split
                .extend(std::iter::repeat_n((ty, Side::Residual, len), n as usize));
            self.bound_splits(
                types,
                t,
                state,
                division_used,
                left - n,
                lens,
                i + 1,
                cur,
                out,
            );
            cur.split.truncate(cur.split.len() - n as usize);
            cur.load -= extra;
        }
    }

    /// Emits the stock as built, plus variants that open one more unit with a
    /// piece sized so the stock's leftover is exactly 0 or exactly β.
    fn finish(&self, state: &State, division_used: bool, cur: &mut Choice, out: &mut Vec<Choice>) {
        let empty = cur.whole.is_empty() && cur.closed.is_empty() && cur.split.is_empty();
        if !empty {
            out.push(cur.clone());
        }
        if !self.divisible {
            return;
        }
        let room = self.c - cur.load;
        let mut targets = vec![0];
        if self.beta > 0 && self.beta < room {
            targets.push(self.beta);
        }
        for ty in 0..state.pending.len() as u8 {
            let w = self.lengths[ty as usize];
            let used = cur
                .whole
                .iter()
                .filter(|(t, _)| *t == ty)
                .map(|&(_, n)| n)
                .sum::<u8>()
                + cur.split.iter().filter(|(t, _, _)| *t == ty).count() as u8;
            if state.pending[ty as usize] <= used || w < self.theta.saturating_mul(2) {
                continue;
            }
            for side in [Side::Residual, Side::Division] {
                if side == Side::Division && division_used {
                    continue;
                }
                for &target in &targets {
                    let len = room - target;
                    // bound lengths are enumerated already
                    if len <= self.theta || len >= w - self.theta {
                        continue;
                    }
                    cur.load += len;
                    cur.split.push((ty, side, len));
                    out.push(cur.clone());
                    cur.split.pop();
                    cur.load -= len;
                }
            }
        }
    }

    /// Rebuilds the optimal plan by following memoised choices from the root.
    fn replay(&self, root: State, instance: &Instance, params: &Params) -> CuttingPlan {
        let ids: Vec<ItemId> = instance.items.iter().map(|it| it.id).collect();
        let mut next_unit = vec![1u32; ids.len()];
        let mut waiting: HashMap<Open, VecDeque<u32>> = HashMap::new();
        let mut patterns = Vec::new();
        let mut state = root;

        while !state.is_done() {
            let best = self.memo.get(&state).expect("memoised state");
            let choices = self.ordered_choices(&state);
            let choice = &choices[best.choice as usize].1;
            let mut whole_items = Vec::new();
            let mut divisions = Vec::new();
            let mut residuals = Vec::new();
            for &(ty, n) in &choice.whole {
                whole_items.push((ids[ty as usize], u32::from(n)));
                next_unit[ty as usize] += u32::from(n);
            }
            for &(ty, side, len) in &choice.split {
                let w = self.lengths[ty as usize];
                let unit = next_unit[ty as usize];
                next_unit[ty as usize] += 1;
                let item_id = ids[ty as usize];
                let other = match side {
                    Side::Division => {
                        divisions.push(Division {
                            item_id,
                            unit_index: unit,
                            piece_here: len,
                            residual: w - len,
                        });
                        Side::Residual
                    }
                    Side::Residual => {
                        residuals.push(PlacedResidual {
                            item_id,
                            unit_index: unit,
                            length: len,
                        });
                        Side::Division
                    }
                };
                waiting
                    .entry(Open {
                        side: other,
                        ty,
                        len: w - len,
                    })
                    .or_default()
                    .push_back(unit);
            }
            for open in &choice.closed {
                let unit = waiting
                    .get_mut(open)
                    .and_then(VecDeque::pop_front)
                    .expect("open half was created earlier");
                let item_id = ids[open.ty as usize];
                match open.side {
                    Side::Division => divisions.push(Division {
                        item_id,
                        unit_index: unit,
                        piece_here: open.len,
                        residual: self.lengths[open.ty as usize] - open.len,
                    }),
                    Side::Residual => residuals.push(PlacedResidual {
                        item_id,
                        unit_index: unit,
                        length: open.len,
                    }),
                }
            }
            let pattern = StockPattern::fill(
                patterns.len() + 1,
                whole_items,
                divisions,
                residuals,
                instance,
                params,
            )
            .expect("search respects stock length");
            patterns.push(pattern);
            state = self.apply(&state, choice);
        }

        let mut plan = CuttingPlan {
            instance: instance.clone(),
            params: params.clone(),
            patterns,
        };
        plan.canonicalize_units();
        plan
    }
}
