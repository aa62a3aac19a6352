use crate::model::{Instance, ItemId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindSource {
    /// Undivided units of an item.
    Whole,
    /// The residual half of a divided unit; never divided again.
    Residual { unit_index: u32 },
}

/// One entry of the DP item list: `available` pieces of `length` each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoolKind {
    pub item_id: ItemId,
    pub length: u64,
    pub available: u32,
    pub source: KindSource,
}

impl PoolKind {
    pub fn whole(item_id: ItemId, length: u64, available: u32) -> Self {
        Self {
            item_id,
            length,
            available,
            source: KindSource::Whole,
        }
    }

    pub fn residual(item_id: ItemId, unit_index: u32, length: u64) -> Self {
        Self {
            item_id,
            length,
            available: 1,
            source: KindSource::Residual { unit_index },
        }
    }

    pub fn is_whole(&self) -> bool {
        self.source == KindSource::Whole
    }
}

/// Everything still waiting to be cut, in DP order.
///
/// Kind order is significant: the DP processes kinds front to back. The
/// heuristic keeps whole items longest first and appends residual lots in
/// creation order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PendingPool {
    kinds: Vec<PoolKind>,
}

impl PendingPool {
    /// Kinds are kept in the given order; exhausted kinds are dropped.
    pub fn from_kinds(kinds: impl IntoIterator<Item = PoolKind>) -> Self {
        Self {
            kinds: kinds.into_iter().filter(|k| k.available > 0).collect(),
        }
    }

    /// Whole items only, `(length, demand)` in the given order, ids `1..`.
    pub fn from_pairs(pairs: &[(u64, u32)]) -> Self {
        Self::from_kinds(
            pairs
                .iter()
                .enumerate()
                .map(|(i, &(w, v))| PoolKind::whole(i as ItemId + 1, w, v)),
        )
    }

    /// All demanded units of an instance, longest item first.
    pub fn for_instance(instance: &Instance) -> Self {
        let mut items = instance.items.clone();
        items.sort_by_key(|it| (std::cmp::Reverse(it.length), it.id));
        Self::from_kinds(
            items
                .iter()
                .map(|it| PoolKind::whole(it.id, it.length, it.demand)),
        )
    }

    pub fn kinds(&self) -> &[PoolKind] {
        &self.kinds
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn total_length(&self) -> u128 {
        self.kinds
            .iter()
            .map(|k| u128::from(k.length) * u128::from(k.available))
            .sum()
    }

    /// Removes `count` pieces of kind `index`, dropping the kind when empty.
    /// Indices of later kinds shift; callers consume in descending index order.
    pub(crate) fn take(&mut self, index: usize, count: u32) {
        let kind = &mut self.kinds[index];
        debug_assert!(kind.available >= count);
        kind.available -= count;
        if kind.available == 0 {
            self.kinds.remove(index);
        }
    }

    pub(crate) fn push_residual(&mut self, kind: PoolKind) {
        self.kinds.push(kind);
    }
}
