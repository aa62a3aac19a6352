//! The single-row subset-sum table (array A), its division companion
//! (array B) and per-stock pattern selection.

use num_traits::Zero;
use thiserror::Error;

use super::pool::PendingPool;
use crate::model::{Cost, ItemId, Params};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpError {
    #[error("array A is empty at capacity {0} before reaching 0")]
    CorruptArray(usize),
    #[error("no capacity of array A is reachable")]
    NoCandidate,
}

/// A cell of array A.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpCell {
    Empty,
    /// Capacity 0: reachable with nothing cut.
    Origin,
    /// Reachable; the reconstruction ends with `count` pieces of pool kind
    /// `kind` (0-based position in the pool).
    Filled {
        kind: usize,
        count: u32,
    },
}

impl DpCell {
    pub fn is_reachable(self) -> bool {
        !matches!(self, DpCell::Empty)
    }
}

/// Array A for one stock, indexed by capacity `0..=capacity`.
#[derive(Debug, Clone)]
pub struct ArrayA {
    cells: Vec<DpCell>,
    lengths: Vec<u64>,
}

impl ArrayA {
    pub fn capacity(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn cell(&self, s: usize) -> DpCell {
        self.cells.get(s).copied().unwrap_or(DpCell::Empty)
    }

    pub fn cells(&self) -> &[DpCell] {
        &self.cells
    }

    /// Largest nonzero reachable capacity.
    pub fn max_filled(&self) -> Option<usize> {
        (1..self.cells.len())
            .rev()
            .find(|&s| self.cells[s].is_reachable())
    }

    /// Pool kinds (with multiplicities) summing exactly to `s`, last kind first.
    pub fn reconstruct(&self, s: usize) -> Result<Vec<(usize, u32)>, DpError> {
        let mut out = Vec::new();
        let mut at = s;
        loop {
            match self.cell(at) {
                DpCell::Origin => return Ok(out),
                DpCell::Empty => return Err(DpError::CorruptArray(at)),
                DpCell::Filled { kind, count } => {
                    let span = self.lengths[kind] as usize * count as usize;
                    out.push((kind, count));
                    at = at.checked_sub(span).ok_or(DpError::CorruptArray(at))?;
                }
            }
        }
    }

    /// Pieces of `kind` used by the reconstruction of `s`. Kinds along a
    /// reconstruction strictly decrease, so the walk stops early.
    fn consumed(&self, s: usize, kind: usize) -> u32 {
        let mut at = s;
        while let DpCell::Filled { kind: k, count } = self.cell(at) {
            if k == kind {
                return count;
            }
            if k < kind {
                return 0;
            }
            at -= self.lengths[k] as usize * count as usize;
        }
        0
    }
}

/// Builds array A over `0..=capacity`.
///
/// Kind 0 is seeded with its multiples up to its availability. Each later
/// kind `k` visits capacities in increasing order and keeps the first rule
/// that applies:
///
/// 1. the cell is already reachable, `s < w_k`, or `s` exceeds the total
///    length of kinds `0..=k`: unchanged;
/// 2. the cell at `s − w_k` ends with `p < v_k` pieces of kind `k`: `(k, p+1)`;
/// 3. the cell at `s − w_k` is the origin or ends with an earlier kind: `(k, 1)`.
///
/// Rule 3 excludes cells that already hold `v_k` pieces of kind `k`, which
/// would otherwise let a reconstruction overuse the kind.
pub fn build_array_a(pool: &PendingPool, capacity: usize) -> ArrayA {
    build(pool, capacity, false)
}

/// As [`build_array_a`], but stops after the first kind that fills the top
/// cell. Later kinds never alter an already reachable cell, so the top cell
/// and its reconstruction are final at that point.
pub(crate) fn build_array_a_until_full(pool: &PendingPool, capacity: usize) -> ArrayA {
    build(pool, capacity, true)
}

fn build(pool: &PendingPool, capacity: usize, stop_when_full: bool) -> ArrayA {
    let kinds = pool.kinds();
    let mut cells = vec![DpCell::Empty; capacity + 1];
    cells[0] = DpCell::Origin;
    let lengths: Vec<u64> = kinds.iter().map(|k| k.length).collect();

    let mut prefix: u128 = 0;
    for (k, kind) in kinds.iter().enumerate() {
        prefix += u128::from(kind.length) * u128::from(kind.available);
        if kind.length as u128 > capacity as u128 || kind.available == 0 {
            continue;
        }
        let w = kind.length as usize;
        let top = prefix.min(capacity as u128) as usize;
        if k == 0 {
            let mut s = w;
            let mut p = 1;
            while s <= top && p <= kind.available {
                cells[s] = DpCell::Filled { kind: 0, count: p };
                s += w;
                p += 1;
            }
        } else {
            for s in w..=top {
                if cells[s].is_reachable() {
                    continue;
                }
                cells[s] = match cells[s - w] {
                    DpCell::Filled { kind: prev, count } if prev == k => {
                        if count < kind.available {
                            DpCell::Filled {
                                kind: k,
                                count: count + 1,
                            }
                        } else {
                            DpCell::Empty
                        }
                    }
                    DpCell::Filled { .. } | DpCell::Origin => DpCell::Filled { kind: k, count: 1 },
                    DpCell::Empty => DpCell::Empty,
                };
            }
        }
        if stop_when_full && cells[capacity].is_reachable() {
            break;
        }
    }
    ArrayA { cells, lengths }
}

/// Cutting `piece_here` from an undivided unit of pool kind `kind` fills the
/// stock exactly; `residual` is left for a later stock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisionCandidate {
    pub kind: usize,
    pub item_id: ItemId,
    pub piece_here: u64,
    pub residual: u64,
}

/// Array B: per reachable fill level, the division that completes the stock.
#[derive(Debug, Clone)]
pub struct ArrayB {
    cells: Vec<Option<DivisionCandidate>>,
}

impl ArrayB {
    pub fn empty(capacity: usize) -> Self {
        Self {
            cells: vec![None; capacity + 1],
        }
    }

    pub fn get(&self, s: usize) -> Option<DivisionCandidate> {
        self.cells.get(s).copied().flatten()
    }

    pub fn cells(&self) -> &[Option<DivisionCandidate>] {
        &self.cells
    }
}

/// For every reachable `s` whose gap `c − s` is at least θ, marks the whole
/// kind with the shortest residual `w − (c − s) ≥ θ` that still has a unit
/// not used by the reconstruction of `s`. Ties go to the smaller item id.
pub fn build_array_b(a: &ArrayA, pool: &PendingPool, stock_length: u64, params: &Params) -> ArrayB {
    let capacity = a.capacity();
    let mut b = ArrayB::empty(capacity);

    // whole kinds ordered by (length, item id)
    let mut whole: Vec<(u64, ItemId, usize)> = pool
        .kinds()
        .iter()
        .enumerate()
        .filter(|(_, k)| k.is_whole() && params.is_divisible(k.length))
        .map(|(i, k)| (k.length, k.item_id, i))
        .collect();
    if whole.is_empty() {
        return b;
    }
    whole.sort_unstable();

    for s in 0..=capacity {
        if !a.cells[s].is_reachable() {
            continue;
        }
        let gap = stock_length - s as u64;
        if gap < params.theta {
            continue;
        }
        let need = gap.saturating_add(params.theta);
        let start = whole.partition_point(|&(len, _, _)| len < need);
        for &(len, item_id, kind) in &whole[start..] {
            if a.consumed(s, kind) < pool.kinds()[kind].available {
                b.cells[s] = Some(DivisionCandidate {
                    kind,
                    item_id,
                    piece_here: gap,
                    residual: len - gap,
                });
                break;
            }
        }
    }
    b
}

/// The pattern chosen for the next stock.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    /// Length covered by array A's reconstruction.
    pub fill: usize,
    pub division: Option<DivisionCandidate>,
    pub trim: u64,
    pub cost: Cost,
}

/// Picks the cheapest pattern from arrays A and B.
///
/// A pure pattern at fill `s` costs γ·(c − s) unless the leftover is banked;
/// a division pattern costs δ and leaves no trim. Ties prefer fewer welds,
/// then the larger fill. Candidates with equal cost, welds and fill cannot
/// occur since each array holds one pattern per fill level.
pub fn select_pattern(
    a: &ArrayA,
    b: &ArrayB,
    stock_length: u64,
    params: &Params,
) -> Result<Selection, DpError> {
    // γ ≥ 0, so the cheapest pure pattern minimises counted trim.
    let mut pure: Option<(u64, usize)> = None;
    for s in (1..=a.capacity()).rev() {
        if !a.cells[s].is_reachable() {
            continue;
        }
        let counted = params.counted_trim(stock_length - s as u64);
        if pure.is_none_or(|(best, _)| counted < best) {
            pure = Some((counted, s));
            if counted == 0 {
                break;
            }
        }
    }
    let split = (0..=a.capacity())
        .rev()
        .find_map(|s| b.get(s).map(|cand| (s, cand)));

    let pure = pure.map(|(counted, s)| Selection {
        fill: s,
        division: None,
        trim: stock_length - s as u64,
        cost: params.gamma * Cost::from_integer(i128::from(counted)),
    });
    let split = split.map(|(s, cand)| Selection {
        fill: s,
        division: Some(cand),
        trim: 0,
        cost: params.delta,
    });

    match (pure, split) {
        (Some(p), Some(d)) => Ok(if d.cost < p.cost { d } else { p }),
        (Some(p), None) => Ok(p),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(DpError::NoCandidate),
    }
}

impl Selection {
    pub fn welds(&self) -> u64 {
        u64::from(self.division.is_some())
    }

    pub fn is_free(&self) -> bool {
        self.cost.is_zero()
    }
}
