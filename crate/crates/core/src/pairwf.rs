//! Pair work functions and the projected optimum lower bound.
//!
//! For any two items x, y the requests touching the pair induce a two-item
//! instance whose optimum is tracked exactly by a work function with two
//! values, one per relative order. Summing the growth of the average of the
//! two values over all pairs lower-bounds the optimum of the whole sequence,
//! which is the denominator every amortized argument in this crate charges
//! against.
//!
//! Reachable pair work functions always have `|W(xy) - W(yx)| <= 1`; the
//! sign of the gap relative to the online list order is the pair's *mode*:
//!
//! * `Alpha`: the current order is the cheaper configuration,
//! * `Beta`: both configurations are equally cheap,
//! * `Gamma`: the swapped order is cheaper.
//!
//! The average grows by exactly 1/2 on a request if and only if the request
//! changes the pair's mode (in the partial model; the full model adds a
//! uniform 1 per request on top).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::list::{CostModel, Item, ListState};
use crate::numeric::{rat, Rat};
use crate::sequence::{Event, RequestSequence};

/// Relation of a pair work function to the online order of the pair.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Mode {
    Alpha,
    Beta,
    Gamma,
}

impl Mode {
    /// Classifies from the value at the online order and at the swapped
    /// order. Errors if the gap left the reachable band.
    pub fn classify(w_online: u64, w_swapped: u64) -> Result<Mode> {
        match w_swapped as i64 - w_online as i64 {
            1 => Ok(Mode::Alpha),
            0 => Ok(Mode::Beta),
            -1 => Ok(Mode::Gamma),
            _ => Err(Error::CorruptWorkFunction { w_xy: w_online, w_yx: w_swapped }),
        }
    }

    /// Mode after the online pair order is swapped (values unchanged).
    pub fn flip(self) -> Mode {
        match self {
            Mode::Alpha => Mode::Gamma,
            Mode::Beta => Mode::Beta,
            Mode::Gamma => Mode::Alpha,
        }
    }
}

/// Work function of one item pair. Values are keyed by the id order of the
/// pair (`lo` = smaller item id), not by the online order.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PairWorkFunction {
    /// `w[0]`: cost floor for ending with `lo` in front; `w[1]`: with `hi`.
    w: [u64; 2],
}

impl PairWorkFunction {
    /// Fresh pair: the actual current order costs 0, the swapped order 1.
    pub fn init(lo_first: bool) -> Self {
        if lo_first {
            PairWorkFunction { w: [0, 1] }
        } else {
            PairWorkFunction { w: [1, 0] }
        }
    }

    pub fn values(&self) -> (u64, u64) {
        (self.w[0], self.w[1])
    }

    /// Difference `W(lo first) - W(hi first)`, always in `-1..=1`.
    pub fn gap(&self) -> i64 {
        self.w[0] as i64 - self.w[1] as i64
    }

    /// Serves one request to a pair member. Returns the growth of
    /// `W(xy) + W(yx)`, i.e. twice the average growth ("halves").
    pub fn update(&mut self, requested_lo: bool, model: CostModel) -> u64 {
        let before = self.w[0] + self.w[1];
        let (rf, other) = if requested_lo { (0, 1) } else { (1, 0) };
        // Access costs in the two configurations; moving between them adds 1.
        let (acc_rf, acc_other) = match model {
            CostModel::Partial => (0, 1),
            CostModel::Full => (1, 2),
        };
        let new_rf = (self.w[rf] + acc_rf).min(self.w[other] + acc_other + 1);
        let new_other = (self.w[other] + acc_other).min(self.w[rf] + acc_rf + 1);
        self.w[rf] = new_rf;
        self.w[other] = new_other;
        debug_assert!(self.gap().abs() <= 1);
        self.w[0] + self.w[1] - before
    }

    /// Mode relative to an online order given as "is `lo` in front".
    pub fn mode_when(&self, lo_first_online: bool) -> Result<Mode> {
        if lo_first_online {
            Mode::classify(self.w[0], self.w[1])
        } else {
            Mode::classify(self.w[1], self.w[0])
        }
    }
}

/// Spec-shaped wrapper around [`PairWorkFunction::mode_when`].
pub fn classify_mode(wf: &PairWorkFunction, lo_first_online: bool) -> Result<Mode> {
    wf.mode_when(lo_first_online)
}

/// Pair bookkeeping over a dynamic item population.
///
/// Pairs activate when both members are present (initially, or at the
/// insertion of the later member, which always enters at the back of every
/// list) and freeze at the deletion of either member. Work function values
/// depend only on the requests served while active, never on any list.
#[derive(Clone, Debug, Default)]
pub struct PairTracker {
    pairs: HashMap<(u32, u32), PairWorkFunction>,
    present: Vec<Item>,
    halves: u64,
}

impl PairTracker {
    pub fn new(initial: &ListState) -> Self {
        let mut t = PairTracker::default();
        for (i, &a) in initial.items().iter().enumerate() {
            for &b in &initial.items()[i + 1..] {
                // a precedes b in the initial order.
                t.pairs.insert(key(a, b), PairWorkFunction::init(a.0 < b.0));
            }
        }
        t.present = initial.items().to_vec();
        t
    }

    /// Cumulative projected optimum in halves (divide by 2 for the value).
    pub fn total_halves(&self) -> u64 {
        self.halves
    }

    pub fn wf(&self, a: Item, b: Item) -> Option<&PairWorkFunction> {
        self.pairs.get(&key(a, b))
    }

    /// Advances by one event; returns the halves added by this step.
    pub fn step(&mut self, ev: &Event, model: CostModel) -> Result<u64> {
        let added = match *ev {
            Event::Access(r) => self.touch(r, model)?,
            Event::Insert(r) => {
                if self.present.contains(&r) {
                    return Err(Error::DuplicateItem(format!("{r:?}")));
                }
                for &y in &self.present {
                    // y is already somewhere in the list, r enters behind it.
                    self.pairs.insert(key(y, r), PairWorkFunction::init(y.0 < r.0));
                }
                self.present.push(r);
                0
            }
            Event::Delete(r) => {
                // The deletion pays an access; the pair instances see that
                // request and then freeze.
                let added = self.touch(r, model)?;
                self.pairs.retain(|&(a, b), _| a != r.0 && b != r.0);
                self.present.retain(|&y| y != r);
                added
            }
        };
        self.halves += added;
        Ok(added)
    }

    fn touch(&mut self, r: Item, model: CostModel) -> Result<u64> {
        if !self.present.contains(&r) {
            return Err(Error::UnknownItem(format!("{r:?}")));
        }
        let mut added = 0;
        for &y in &self.present {
            if y == r {
                continue;
            }
            let wf = self.pairs.get_mut(&key(y, r)).expect("active pair exists");
            added += wf.update(r.0 < y.0, model);
        }
        Ok(added)
    }
}

fn key(a: Item, b: Item) -> (u32, u32) {
    (a.0.min(b.0), a.0.max(b.0))
}

/// Sum over pairs of the growth of the average pair work function: a lower
/// bound on the optimum cost of `seq` (deletions count their access, the
/// insertion placements themselves are free here).
pub fn pair_based_opt(seq: &RequestSequence, model: CostModel) -> Result<Rat> {
    let mut tracker = PairTracker::new(seq.initial());
    for ev in seq.events() {
        tracker.step(ev, model)?;
    }
    Ok(rat(tracker.total_halves() as i64, 2))
}

/// Pair modes of a canonical list, indexed by position pairs.
///
/// This is the state the verifier and the cycle search run on: position `i`
/// holds canonical item `i`, and for every `i < j` the matrix stores the
/// mode of that pair relative to the current order. Together with the list
/// itself this determines every pair work function up to an additive offset,
/// which is all that mode transitions and cost accounting need.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModeMatrix {
    n: usize,
    modes: Vec<Mode>,
}

impl ModeMatrix {
    /// All pairs in `Alpha`: the state of a fresh list.
    pub fn fresh(n: usize) -> Self {
        assert!(n <= 9, "packed encoding holds up to 36 pairs");
        ModeMatrix { n, modes: vec![Mode::Alpha; n * (n - 1) / 2] }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        // Row-major triangle: pairs (0,1), (0,2), ..., (0,n-1), (1,2), ...
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> Mode {
        self.modes[self.idx(i, j)]
    }

    /// Serves a request to the item at 0-based position `r`; returns the
    /// projected-optimum growth in halves under `model`.
    pub fn request(&mut self, r: usize, model: CostModel) -> u64 {
        let mut changes = 0;
        for i in 0..r {
            // Pair (i, r): the requested item is the later one.
            let m = self.idx(i, r);
            let (next, changed) = match self.modes[m] {
                Mode::Alpha => (Mode::Beta, true),
                Mode::Beta => (Mode::Gamma, true),
                Mode::Gamma => (Mode::Gamma, false),
            };
            self.modes[m] = next;
            changes += changed as u64;
        }
        for j in r + 1..self.n {
            // Pair (r, j): the requested item is the earlier one.
            let m = self.idx(r, j);
            let (next, changed) = match self.modes[m] {
                Mode::Alpha => (Mode::Alpha, false),
                Mode::Beta => (Mode::Alpha, true),
                Mode::Gamma => (Mode::Beta, true),
            };
            self.modes[m] = next;
            changes += changed as u64;
        }
        match model {
            CostModel::Partial => changes,
            // Every pair containing the requested item also gains a full
            // unit of average regardless of mode movement.
            CostModel::Full => changes + 2 * (self.n as u64 - 1),
        }
    }

    /// Applies a rearrangement: `perm[new_pos] = old_pos`. Swapped pairs
    /// flip between `Alpha` and `Gamma`; positions are relabeled.
    pub fn apply_move(&mut self, perm: &[u8]) {
        debug_assert_eq!(perm.len(), self.n);
        let mut next = vec![Mode::Alpha; self.modes.len()];
        for a in 0..self.n {
            for b in a + 1..self.n {
                let (i, j) = (perm[a] as usize, perm[b] as usize);
                next[self.idx(a, b)] = if i < j {
                    self.get(i, j)
                } else {
                    self.get(j, i).flip()
                };
            }
        }
        self.modes = next;
    }

    /// Base-3 packing; canonical key for state interning.
    pub fn pack(&self) -> u64 {
        let mut v = 0u64;
        for &m in &self.modes {
            v = v * 3
                + match m {
                    Mode::Alpha => 0,
                    Mode::Beta => 1,
                    Mode::Gamma => 2,
                };
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::parse_sequence;

    /// Exhaustive two-item optimum by trying every configuration schedule.
    fn two_item_opt(initial_first: u8, requests: &[u8], model: CostModel) -> u64 {
        // State: which item is in front (0 or 1). Cost of serving r from
        // config c: access + optional pre-move.
        fn access(c: u8, r: u8, model: CostModel) -> u64 {
            let pos = if c == r { 1 } else { 2 };
            model.access(pos)
        }
        fn go(c: u8, reqs: &[u8], model: CostModel) -> u64 {
            match reqs.split_first() {
                None => 0,
                Some((&r, rest)) => {
                    let stay = access(c, r, model) + go(c, rest, model);
                    let flip = 1 + access(1 - c, r, model) + go(1 - c, rest, model);
                    stay.min(flip)
                }
            }
        }
        go(initial_first, requests, model)
    }

    /// Reference: the pair work function value must equal the exhaustive
    /// optimum cost of ending in the matching configuration.
    #[test]
    fn pair_wf_matches_exhaustive_schedules() {
        for model in [CostModel::Partial, CostModel::Full] {
            for pattern in 0u32..(1 << 10) {
                let requests: Vec<u8> = (0..10).map(|i| ((pattern >> i) & 1) as u8).collect();
                let mut wf = PairWorkFunction::init(true);
                for (t, &r) in requests.iter().enumerate() {
                    wf.update(r == 0, model);
                    // After each prefix, W(c) = min over schedules ending at c
                    // of cost + final-move distance. Equivalent closed check:
                    // min(W) equals opt of the prefix.
                    let opt = two_item_opt(0, &requests[..=t], model);
                    let (w0, w1) = wf.values();
                    assert_eq!(w0.min(w1), opt, "pattern {pattern:#b} t {t} {model:?}");
                }
            }
        }
    }

    #[test]
    fn fresh_pair_values() {
        assert_eq!(PairWorkFunction::init(true).values(), (0, 1));
        assert_eq!(PairWorkFunction::init(false).values(), (1, 0));
    }

    #[test]
    fn update_examples() {
        // Requests to the front item leave a fresh pair unchanged.
        let mut wf = PairWorkFunction::init(true);
        assert_eq!(wf.update(true, CostModel::Partial), 0);
        assert_eq!(wf.values(), (0, 1));
        // A request to the back item lifts the cheap configuration.
        assert_eq!(wf.update(false, CostModel::Partial), 1);
        assert_eq!(wf.values(), (1, 1));
        // And again: the swapped order becomes strictly cheaper.
        assert_eq!(wf.update(false, CostModel::Partial), 1);
        assert_eq!(wf.values(), (2, 1));
    }

    #[test]
    fn mode_trace_under_requests_and_swap() {
        // Items: 0 in front of 1. Two requests to the back item walk the
        // mode from Alpha through Beta to Gamma; moving the back item in
        // front then flips Gamma back to Alpha.
        let mut wf = PairWorkFunction::init(true);
        assert_eq!(wf.mode_when(true).unwrap(), Mode::Alpha);
        wf.update(false, CostModel::Partial);
        assert_eq!(wf.mode_when(true).unwrap(), Mode::Beta);
        wf.update(false, CostModel::Partial);
        assert_eq!(wf.mode_when(true).unwrap(), Mode::Gamma);
        assert_eq!(wf.mode_when(false).unwrap(), Mode::Alpha);
    }

    #[test]
    fn classify_rejects_wide_gaps() {
        assert!(Mode::classify(0, 2).is_err());
        assert!(Mode::classify(5, 3).is_err());
        assert_eq!(Mode::classify(3, 3).unwrap(), Mode::Beta);
    }

    #[test]
    fn pair_based_opt_empty_and_single() {
        let seq = parse_sequence("items: a b c\n").unwrap();
        assert_eq!(pair_based_opt(&seq, CostModel::Partial).unwrap(), rat(0, 1));
        // Repeated front accesses are free in the partial model.
        let seq = parse_sequence("items: a b c\na\na\n").unwrap();
        assert_eq!(pair_based_opt(&seq, CostModel::Partial).unwrap(), rat(0, 1));
    }

    #[test]
    fn pair_based_opt_counts_mode_changes() {
        // items a b; requests b b: Alpha -> Beta -> Gamma = two halves.
        let seq = parse_sequence("items: a b\nb\nb\n").unwrap();
        assert_eq!(pair_based_opt(&seq, CostModel::Partial).unwrap(), rat(1, 1));
        // Third b: Gamma stays, nothing added.
        let seq = parse_sequence("items: a b\nb\nb\nb\n").unwrap();
        assert_eq!(pair_based_opt(&seq, CostModel::Partial).unwrap(), rat(1, 1));
    }

    #[test]
    fn tracker_handles_insert_delete() {
        let seq = parse_sequence("items: a b\n+c\nc\nc\n-b\nc\n").unwrap();
        let mut tr = PairTracker::new(seq.initial());
        let mut halves = 0;
        for ev in seq.events() {
            halves += tr.step(ev, CostModel::Partial).unwrap();
        }
        // c enters behind a and b. First c request: both pairs Alpha->Beta
        // (2 halves); second: Beta->Gamma (2 halves). Deleting b costs its
        // access: pair (a,b) stays Alpha (b behind a? no: a first, request b:
        // Alpha->Beta = 1 half) and pair (b,c) sees a request to its front
        // item b... b is before c, so Beta->Alpha? No: pair (b,c) mode after
        // two c-requests is Gamma; request to b (earlier item): Gamma->Beta,
        // 1 half. Then final c against remaining pair (a,c): Gamma stays.
        assert_eq!(halves, 2 + 2 + 2 + 0);
        assert_eq!(pair_based_opt(&seq, CostModel::Partial).unwrap(), rat(3, 1));
    }

    #[test]
    fn mode_matrix_mirrors_pair_tracker() {
        // Run both representations over a random-ish static request pattern
        // on 4 items with the algorithm never moving; modes must agree.
        let n = 4;
        let (universe, initial) = crate::sequence::standard_universe(n);
        let _ = universe;
        let mut mm = ModeMatrix::fresh(n);
        let mut tracker = PairTracker::new(&initial);
        let reqs = [3usize, 1, 3, 2, 0, 3, 2, 2, 1, 0, 3];
        let mut mm_halves = 0;
        let mut tr_halves = 0;
        for &r in &reqs {
            mm_halves += mm.request(r, CostModel::Partial);
            tr_halves += tracker
                .step(&Event::Access(Item(r as u32)), CostModel::Partial)
                .unwrap();
            for i in 0..n {
                for j in i + 1..n {
                    let wf = tracker.wf(Item(i as u32), Item(j as u32)).unwrap();
                    // The list never changes, so item i stays in front of j.
                    assert_eq!(mm.get(i, j), wf.mode_when(true).unwrap());
                }
            }
        }
        assert_eq!(mm_halves, tr_halves);
    }

    #[test]
    fn mode_matrix_move_flips_swapped_pairs() {
        let mut mm = ModeMatrix::fresh(3);
        mm.request(2, CostModel::Partial); // pairs (0,2), (1,2) -> Beta
        mm.request(2, CostModel::Partial); // -> Gamma
        // Move back item to front: perm[0] = 2, perm[1] = 0, perm[2] = 1.
        mm.apply_move(&[2, 0, 1]);
        // The moved pairs flip Gamma -> Alpha; pair (0,1) keeps Alpha.
        assert_eq!(mm.get(0, 1), Mode::Alpha);
        assert_eq!(mm.get(0, 2), Mode::Alpha);
        assert_eq!(mm.get(1, 2), Mode::Alpha);
        assert_eq!(mm.pack(), ModeMatrix::fresh(3).pack());
    }
}
