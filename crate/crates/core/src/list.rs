//! List state and elementary cost operations.
//!
//! Positions are 1-based throughout: the front item is at position 1. Every
//! swap of neighbouring items costs 1; there are no free exchanges. Access
//! cost is charged either as `position` (full model) or `position - 1`
//! (partial model). The partial model is the default analysis currency.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An item identity. Labels live in the sequence universe; algorithms only
/// ever see these indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Item(pub u32);

impl Item {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i{}", self.0)
    }
}

/// How accesses are charged.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub enum CostModel {
    /// Accessing position `l` costs `l`.
    Full,
    /// Accessing position `l` costs `l - 1`. Default: analysis and arbitrary
    /// additive offsets both live here.
    #[default]
    Partial,
}

impl CostModel {
    /// Access cost of 1-based `position` under this model.
    pub fn access(self, position: usize) -> u64 {
        match self {
            CostModel::Full => position as u64,
            CostModel::Partial => position as u64 - 1,
        }
    }
}

/// An ordered list of distinct items.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ListState {
    order: Vec<Item>,
}

impl ListState {
    /// Builds a list, rejecting duplicates.
    pub fn new(order: Vec<Item>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for it in &order {
            if !seen.insert(*it) {
                return Err(Error::DuplicateItem(format!("{it:?}")));
            }
        }
        Ok(ListState { order })
    }

    pub fn empty() -> Self {
        ListState { order: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn items(&self) -> &[Item] {
        &self.order
    }

    pub fn front(&self) -> Option<Item> {
        self.order.first().copied()
    }

    /// 1-based position of `item`, if present.
    pub fn position(&self, item: Item) -> Option<usize> {
        self.order.iter().position(|&x| x == item).map(|i| i + 1)
    }

    pub fn contains(&self, item: Item) -> bool {
        self.position(item).is_some()
    }

    /// Item at 1-based `position`.
    pub fn at(&self, position: usize) -> Result<Item> {
        if position == 0 || position > self.len() {
            return Err(Error::PositionOutOfRange { position, len: self.len() });
        }
        Ok(self.order[position - 1])
    }

    /// Moves `item` to 1-based `target` position, shifting the skipped block
    /// by one. Returns the number of unit swaps performed.
    pub fn move_to(&mut self, item: Item, target: usize) -> Result<u64> {
        let from = self.position(item).ok_or_else(|| Error::UnknownItem(format!("{item:?}")))?;
        if target == 0 || target > self.len() {
            return Err(Error::PositionOutOfRange { position: target, len: self.len() });
        }
        let (f, t) = (from - 1, target - 1);
        if f < t {
            self.order[f..=t].rotate_left(1);
        } else {
            self.order[t..=f].rotate_right(1);
        }
        Ok(from.abs_diff(target) as u64)
    }

    /// Appends a new item at the back.
    pub fn push_back(&mut self, item: Item) -> Result<()> {
        if self.contains(item) {
            return Err(Error::DuplicateItem(format!("{item:?}")));
        }
        self.order.push(item);
        Ok(())
    }

    /// Removes `item` wherever it is; remaining items keep their order.
    pub fn remove(&mut self, item: Item) -> Result<usize> {
        let pos = self.position(item).ok_or_else(|| Error::UnknownItem(format!("{item:?}")))?;
        self.order.remove(pos - 1);
        Ok(pos)
    }
}

impl fmt::Debug for ListState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, it) in self.order.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", it.0)?;
        }
        write!(f, "]")
    }
}

/// Access cost of `item` in `list` under `model`.
pub fn access_cost(list: &ListState, item: Item, model: CostModel) -> Result<u64> {
    let pos = list.position(item).ok_or_else(|| Error::UnknownItem(format!("{item:?}")))?;
    Ok(model.access(pos))
}

/// Non-mutating variant of [`ListState::move_to`]: returns the successor list
/// and the number of swaps paid.
pub fn move_item(list: &ListState, item: Item, target: usize) -> Result<(ListState, u64)> {
    let mut next = list.clone();
    let swaps = next.move_to(item, target)?;
    Ok((next, swaps))
}

/// Minimum number of unit swaps transforming `a` into `b`: the number of
/// item pairs ordered differently in the two lists (Kendall tau distance).
pub fn swap_distance(a: &ListState, b: &ListState) -> Result<u64> {
    if a.len() != b.len() {
        return Err(Error::UniverseMismatch);
    }
    // Positions of a's items in b; any item of a missing from b is a
    // universe mismatch.
    let mut mapped = Vec::with_capacity(a.len());
    for &it in a.items() {
        mapped.push(b.position(it).ok_or(Error::UniverseMismatch)?);
    }
    let mut discordant = 0u64;
    for i in 0..mapped.len() {
        for j in i + 1..mapped.len() {
            if mapped[i] > mapped[j] {
                discordant += 1;
            }
        }
    }
    Ok(discordant)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(ids: &[u32]) -> ListState {
        ListState::new(ids.iter().map(|&i| Item(i)).collect()).unwrap()
    }

    #[test]
    fn access_cost_models() {
        let l = list(&[0, 1, 2]);
        // Third item: full 3, partial 2.
        assert_eq!(access_cost(&l, Item(2), CostModel::Full).unwrap(), 3);
        assert_eq!(access_cost(&l, Item(2), CostModel::Partial).unwrap(), 2);
        // Front item: full 1, partial 0.
        assert_eq!(access_cost(&l, Item(0), CostModel::Full).unwrap(), 1);
        assert_eq!(access_cost(&l, Item(0), CostModel::Partial).unwrap(), 0);
    }

    #[test]
    fn access_unknown_item() {
        let l = list(&[0, 1]);
        assert!(matches!(access_cost(&l, Item(9), CostModel::Full), Err(Error::UnknownItem(_))));
    }

    #[test]
    fn move_forward_counts_swaps() {
        let l = list(&[0, 1, 2, 3]);
        let (next, swaps) = move_item(&l, Item(3), 1).unwrap();
        assert_eq!(swaps, 3);
        assert_eq!(next, list(&[3, 0, 1, 2]));
    }

    #[test]
    fn move_backward_counts_swaps() {
        let l = list(&[0, 1, 2, 3]);
        let (next, swaps) = move_item(&l, Item(0), 3).unwrap();
        assert_eq!(swaps, 2);
        assert_eq!(next, list(&[1, 2, 0, 3]));
    }

    #[test]
    fn move_to_same_position_is_free() {
        let l = list(&[0, 1, 2]);
        let (next, swaps) = move_item(&l, Item(1), 2).unwrap();
        assert_eq!(swaps, 0);
        assert_eq!(next, l);
    }

    #[test]
    fn swap_distance_examples() {
        // Reversal of 3 items needs every pair swapped.
        assert_eq!(swap_distance(&list(&[0, 1, 2]), &list(&[2, 1, 0])).unwrap(), 3);
        assert_eq!(swap_distance(&list(&[0, 1, 2]), &list(&[0, 1, 2])).unwrap(), 0);
        assert_eq!(swap_distance(&list(&[0, 1, 2]), &list(&[1, 0, 2])).unwrap(), 1);
    }

    #[test]
    fn swap_distance_rejects_mismatched_sets() {
        assert!(swap_distance(&list(&[0, 1]), &list(&[0, 2])).is_err());
        assert!(swap_distance(&list(&[0, 1]), &list(&[0])).is_err());
    }

    #[test]
    fn move_matches_swap_distance() {
        // A single block move realizes exactly the pair inversions it causes.
        let l = list(&[0, 1, 2, 3, 4]);
        for target in 1..=5 {
            let (next, swaps) = move_item(&l, Item(3), target).unwrap();
            assert_eq!(swaps, swap_distance(&l, &next).unwrap());
        }
    }
}
