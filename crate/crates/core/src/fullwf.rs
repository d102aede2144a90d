//! Full work functions over all list orders and the exact optimum.
//!
//! The work function after a request prefix maps each permutation to the
//! cheapest way of serving the prefix and ending with the list in that
//! order. Values are kept as a normalized offset vector (minimum 0) plus the
//! accumulated minimum, so the state stays small and comparable. One update
//! is an access pass followed by shortest-path relaxation over single
//! adjacent transpositions, which realizes the move term of
//! `W'(p) = min over q of W(q) + access(q, r) + d(q, p)`.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::limits;
use crate::list::{CostModel, Item, ListState};
use crate::perm::{factorial, kendall, PermTable};
use crate::sequence::RequestSequence;

/// Default cap on list length for exact optimum computations.
pub const OPT_EXACT_DEFAULT_MAX_ITEMS: usize = 7;

/// Work function over every ordering of a fixed item set.
#[derive(Clone)]
pub struct FullWorkFunction {
    /// Item with internal index `k` (indices follow the initial order).
    items: Vec<Item>,
    table: Arc<PermTable>,
    /// `offsets[rank] = W(perm) - min W`; at least one entry is 0.
    offsets: Vec<u32>,
    /// Accumulated minimum: `min over perms of W` so far.
    base: u64,
}

impl FullWorkFunction {
    /// Point mass at `initial`: `W(p) = d(initial, p)`.
    pub fn new(initial: &ListState) -> Result<Self> {
        let n = initial.len();
        if n == 0 {
            return Err(Error::Unsupported("work function over an empty list".into()));
        }
        limits::check_states(factorial(n))?;
        let items = initial.items().to_vec();
        let table = Arc::new(PermTable::new(n));
        // With indices assigned by initial position, the initial list is the
        // identity and the starting offsets are plain inversion counts.
        let offsets = table.perms.iter().map(|p| crate::perm::inversions(p) as u32).collect();
        Ok(FullWorkFunction { items, table, offsets, base: 0 })
    }

    pub fn len_items(&self) -> usize {
        self.items.len()
    }

    pub fn table(&self) -> &PermTable {
        &self.table
    }

    /// Minimum value over all orders; equals the optimum cost of the
    /// request prefix served so far.
    pub fn min_value(&self) -> u64 {
        self.base
    }

    pub fn offsets(&self) -> &[u32] {
        &self.offsets
    }

    fn item_index(&self, item: Item) -> Result<u8> {
        self.items
            .iter()
            .position(|&x| x == item)
            .map(|i| i as u8)
            .ok_or_else(|| Error::UnknownItem(format!("{item:?}")))
    }

    /// Rank of a concrete list order within the table.
    pub fn rank_of_list(&self, list: &ListState) -> Result<usize> {
        if list.len() != self.items.len() {
            return Err(Error::UniverseMismatch);
        }
        let mut perm = Vec::with_capacity(list.len());
        for &it in list.items() {
            perm.push(self.item_index(it)?);
        }
        Ok(self.table.rank_of(&perm))
    }

    /// Concrete list order for a rank.
    pub fn list_of_rank(&self, rank: usize) -> ListState {
        let order = self.table.perms[rank].iter().map(|&k| self.items[k as usize]).collect();
        ListState::new(order).expect("permutation of distinct items")
    }

    /// `W(list)`.
    pub fn value(&self, list: &ListState) -> Result<u64> {
        Ok(self.base + self.offsets[self.rank_of_list(list)?] as u64)
    }

    /// Serves one request; returns the growth of the minimum (the optimum's
    /// cost share of this request).
    pub fn update(&mut self, requested: Item, model: CostModel) -> Result<u64> {
        let idx = self.item_index(requested)?;
        let mut tmp: Vec<u32> = (0..self.table.len())
            .map(|r| self.offsets[r] + model.access(self.table.position(r, idx) + 1) as u32)
            .collect();
        relax_over_transpositions(&self.table, &mut tmp);
        let inc = *tmp.iter().min().expect("nonempty") as u64;
        for v in &mut tmp {
            *v -= inc as u32;
        }
        self.offsets = tmp;
        self.base += inc;
        Ok(inc)
    }
}

/// One round of unit-cost shortest paths: `v[r] = min(v[r], v[nb] + 1)` to a
/// fixed point, breadth-first from every improvable vertex.
pub(crate) fn relax_over_transpositions(table: &PermTable, values: &mut [u32]) {
    let mut queue: VecDeque<u32> = (0..values.len() as u32).collect();
    let mut queued = vec![true; values.len()];
    while let Some(r) = queue.pop_front() {
        queued[r as usize] = false;
        let reach = values[r as usize] + 1;
        for &nb in &table.neighbors[r as usize] {
            if values[nb as usize] > reach {
                values[nb as usize] = reach;
                if !queued[nb as usize] {
                    queued[nb as usize] = true;
                    queue.push_back(nb);
                }
            }
        }
    }
}

/// Exact optimum cost of an access-only sequence via the full work function.
///
/// Bounded by `max_items` (default [`OPT_EXACT_DEFAULT_MAX_ITEMS`]) on top
/// of the global state cap; list lengths beyond that are refused rather than
/// attempted.
pub fn opt_exact_bounded(
    seq: &RequestSequence,
    model: CostModel,
    max_items: usize,
) -> Result<u64> {
    if !seq.access_only() {
        return Err(Error::Unsupported("exact optimum handles access-only sequences".into()));
    }
    let n = seq.initial().len();
    if n > max_items {
        return Err(Error::StateSpaceExceeded { states: factorial(n), cap: factorial(max_items) });
    }
    let mut wf = FullWorkFunction::new(seq.initial())?;
    for ev in seq.events() {
        wf.update(ev.item(), model)?;
    }
    Ok(wf.min_value())
}

/// [`opt_exact_bounded`] at the default size bound.
pub fn opt_exact(seq: &RequestSequence, model: CostModel) -> Result<u64> {
    opt_exact_bounded(seq, model, OPT_EXACT_DEFAULT_MAX_ITEMS)
}

/// Independent optimum oracle: exhaustive dynamic program over schedules.
///
/// State `t, p`: the list order held after serving `t` requests. Every
/// transition (serve request in `q`, then rearrange `q -> p`) is priced
/// directly with a pairwise Kendall distance; no normalization, no
/// Lipschitz relaxation shortcut. Quadratic in `n!` per step, meant for
/// cross-checking [`opt_exact`] on small instances.
pub fn opt_dense_oracle(seq: &RequestSequence, model: CostModel) -> Result<u64> {
    if !seq.access_only() {
        return Err(Error::Unsupported("exact optimum handles access-only sequences".into()));
    }
    let n = seq.initial().len();
    if n > 5 {
        return Err(Error::StateSpaceExceeded { states: factorial(n), cap: factorial(5) });
    }
    let table = PermTable::new(n);
    let items: Vec<Item> = seq.initial().items().to_vec();
    let index = |it: Item| items.iter().position(|&x| x == it).unwrap() as u8;
    let count = table.len();
    // Identity = the initial order; starting anywhere else costs the move.
    let id: Vec<u8> = (0..n as u8).collect();
    let mut cost: Vec<u64> = (0..count).map(|r| kendall(&id, &table.perms[r])).collect();
    for ev in seq.events() {
        let idx = index(ev.item());
        let mut next = vec![u64::MAX; count];
        for q in 0..count {
            let serve = cost[q] + model.access(table.position(q, idx) + 1);
            for (p, slot) in next.iter_mut().enumerate() {
                let full = serve + kendall(&table.perms[q], &table.perms[p]);
                if full < *slot {
                    *slot = full;
                }
            }
        }
        cost = next;
    }
    Ok(cost.into_iter().min().expect("nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairwf::pair_based_opt;
    use crate::sequence::{parse_sequence, random_access_sequence};

    #[test]
    fn initial_values_are_distances() {
        let seq = parse_sequence("items: a b c\n").unwrap();
        let wf = FullWorkFunction::new(seq.initial()).unwrap();
        assert_eq!(wf.min_value(), 0);
        // Fully reversed order is 3 swaps away.
        let rev: Vec<Item> = seq.initial().items().iter().rev().copied().collect();
        let rev = ListState::new(rev).unwrap();
        assert_eq!(wf.value(&rev).unwrap(), 3);
    }

    #[test]
    fn update_example_three_items() {
        // From a point mass at [a, b, c], requesting c: keeping [a, b, c]
        // costs the access 2; ending at [c, a, b] costs serving c up front
        // after two swaps, also 2.
        let seq = parse_sequence("items: a b c\nc\n").unwrap();
        let mut wf = FullWorkFunction::new(seq.initial()).unwrap();
        let inc = wf.update(seq.events()[0].item(), CostModel::Partial).unwrap();
        assert_eq!(inc, 2);
        assert_eq!(wf.value(seq.initial()).unwrap(), 2);
        let rot = ListState::new(vec![Item(2), Item(0), Item(1)]).unwrap();
        assert_eq!(wf.value(&rot).unwrap(), 2);
    }

    #[test]
    fn offsets_stay_lipschitz_with_zero_min() {
        let seq = random_access_sequence(4, 40, 3, None);
        let mut wf = FullWorkFunction::new(seq.initial()).unwrap();
        for ev in seq.events() {
            wf.update(ev.item(), CostModel::Partial).unwrap();
            assert_eq!(*wf.offsets().iter().min().unwrap(), 0);
            for r in 0..wf.table().len() {
                for &nb in &wf.table().neighbors[r] {
                    let a = wf.offsets()[r] as i64;
                    let b = wf.offsets()[nb as usize] as i64;
                    assert!((a - b).abs() <= 1, "offsets must be 1-Lipschitz");
                }
            }
        }
    }

    /// Pure exponential enumeration of every schedule tree: at each request,
    /// branch over all possible rearrangements taken before serving it.
    fn opt_tree_enumeration(seq: &RequestSequence, model: CostModel) -> u64 {
        let n = seq.initial().len();
        let table = PermTable::new(n);
        let items: Vec<Item> = seq.initial().items().to_vec();
        let index = |it: Item| items.iter().position(|&x| x == it).unwrap() as u8;
        fn go(
            table: &PermTable,
            at: usize,
            reqs: &[u8],
            model: CostModel,
        ) -> u64 {
            match reqs.split_first() {
                None => 0,
                Some((&r, rest)) => {
                    let mut best = u64::MAX;
                    for next in 0..table.len() {
                        let mv = kendall(&table.perms[at], &table.perms[next]);
                        let acc = model.access(table.position(next, r) + 1);
                        let tail = go(table, next, rest, model);
                        best = best.min(mv + acc + tail);
                    }
                    best
                }
            }
        }
        let reqs: Vec<u8> = seq.events().iter().map(|e| index(e.item())).collect();
        go(&table, 0, &reqs, model)
    }

    #[test]
    fn opt_exact_matches_tree_enumeration() {
        for seed in 0..12 {
            let seq = random_access_sequence(3, 8, seed, None);
            let exact = opt_exact(&seq, CostModel::Partial).unwrap();
            let tree = opt_tree_enumeration(&seq, CostModel::Partial);
            assert_eq!(exact, tree, "seed {seed}");
            let exact_full = opt_exact(&seq, CostModel::Full).unwrap();
            let tree_full = opt_tree_enumeration(&seq, CostModel::Full);
            assert_eq!(exact_full, tree_full, "seed {seed} full");
        }
    }

    #[test]
    fn opt_exact_matches_dense_oracle() {
        for seed in 0..20 {
            let seq = random_access_sequence(4, 12, seed, None);
            assert_eq!(
                opt_exact(&seq, CostModel::Partial).unwrap(),
                opt_dense_oracle(&seq, CostModel::Partial).unwrap(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn pair_optimum_never_exceeds_exact() {
        for seed in 0..20 {
            let seq = random_access_sequence(4, 15, seed, Some(0.8));
            let exact = opt_exact(&seq, CostModel::Partial).unwrap();
            let pair = pair_based_opt(&seq, CostModel::Partial).unwrap();
            assert!(
                pair <= crate::numeric::rat(exact as i64, 1),
                "seed {seed}: {pair} > {exact}"
            );
        }
    }

    #[test]
    fn pair_wf_is_bounded_by_projected_full_wf() {
        // For every pair and both relative orders, the pair work function is
        // at most the cheapest full value among orders with that relation.
        let seq = random_access_sequence(4, 10, 9, None);
        let mut full = FullWorkFunction::new(seq.initial()).unwrap();
        let mut pairs = crate::pairwf::PairTracker::new(seq.initial());
        for ev in seq.events() {
            full.update(ev.item(), CostModel::Partial).unwrap();
            pairs.step(ev, CostModel::Partial).unwrap();
            let items = seq.initial().items();
            for i in 0..items.len() {
                for j in i + 1..items.len() {
                    let (a, b) = (items[i], items[j]);
                    let wf = pairs.wf(a, b).unwrap();
                    let (w_lo, w_hi) = wf.values();
                    let (lo, hi) = if a.0 < b.0 { (a, b) } else { (b, a) };
                    let mut best_lo_first = u64::MAX;
                    let mut best_hi_first = u64::MAX;
                    for r in 0..full.table().len() {
                        let order = full.list_of_rank(r);
                        let v = full.value(&order).unwrap();
                        if order.position(lo).unwrap() < order.position(hi).unwrap() {
                            best_lo_first = best_lo_first.min(v);
                        } else {
                            best_hi_first = best_hi_first.min(v);
                        }
                    }
                    assert!(w_lo <= best_lo_first && w_hi <= best_hi_first);
                }
            }
        }
    }

    #[test]
    fn opt_exact_rejects_oversized_lists() {
        let seq = random_access_sequence(8, 3, 0, None);
        assert!(matches!(
            opt_exact(&seq, CostModel::Partial),
            Err(Error::StateSpaceExceeded { .. })
        ));
        // But the explicit bound can admit it.
        assert!(opt_exact_bounded(&seq, CostModel::Partial, 8).is_ok());
    }

    #[test]
    fn opt_exact_rejects_dynamic_sequences() {
        let seq = parse_sequence("items: a b\n+c\n").unwrap();
        assert!(opt_exact(&seq, CostModel::Partial).is_err());
    }
}
