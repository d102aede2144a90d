//! The online-algorithm interface and the shared run loop.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::list::{CostModel, Item, ListState};
use crate::sequence::{Event, RequestSequence};

/// Outcome of serving one event.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepReport {
    pub event: Event,
    /// Access component (for insertions: the landing position's cost).
    pub access_cost: u64,
    /// Paid unit swaps.
    pub swap_count: u64,
    /// `access_cost + swap_count`.
    pub total_cost: u64,
    pub list_after: ListState,
}

impl StepReport {
    pub fn new(event: Event, access_cost: u64, swap_count: u64, list_after: ListState) -> Self {
        StepReport { event, access_cost, swap_count, total_cost: access_cost + swap_count, list_after }
    }
}

/// A deterministic online list-update algorithm.
///
/// Implementations own their list; `serve` must keep it consistent with the
/// reports it returns. Insertions place the new item at the back of the list
/// before any reorganization; deletions access the item first and remove it
/// afterwards at no extra cost.
pub trait OnlineAlgorithm {
    fn name(&self) -> &'static str;

    /// Current list order.
    fn list(&self) -> &ListState;

    /// Serves one event under the given cost model.
    fn serve(&mut self, event: &Event, model: CostModel) -> Result<StepReport>;
}

/// An algorithm whose behaviour depends on its item identities only through
/// their current list positions. Such algorithms have a finite state space
/// once the memory is read relative to the list, which is what the product
/// graph construction enumerates.
pub trait CanonicalOnline: OnlineAlgorithm {
    /// Internal memory serialized under the relabeling that maps the item at
    /// position `p` (1-based) to canonical index `p - 1`. The list order
    /// itself must not be part of the encoding.
    fn memory_encoding(&self) -> Vec<u8>;
}

/// Totals of a full run.
#[derive(Clone, Debug, Serialize)]
pub struct RunOutcome {
    /// Headline cost; equals `raw_cost` unless adjusted accounting was on.
    pub total_cost: u64,
    /// Plain sum of all step costs.
    pub raw_cost: u64,
    pub steps: Vec<StepReport>,
}

/// Runs `alg` over `seq`. With `adjusted` set, the access component of every
/// insertion is dropped from `total_cost` (insertions are unavoidable and
/// cost the same for every algorithm; competitive claims for dynamic
/// sequences are stated net of them). `raw_cost` always keeps everything.
pub fn run_algorithm(
    alg: &mut dyn OnlineAlgorithm,
    seq: &RequestSequence,
    model: CostModel,
    adjusted: bool,
) -> Result<RunOutcome> {
    if alg.list() != seq.initial() {
        return Err(Error::Unsupported(format!(
            "algorithm `{}` is not initialized on the sequence's initial list",
            alg.name()
        )));
    }
    let mut raw = 0u64;
    let mut total = 0u64;
    let mut steps = Vec::with_capacity(seq.len());
    for ev in seq.events() {
        let report = alg.serve(ev, model)?;
        raw += report.total_cost;
        total += if adjusted && matches!(ev, Event::Insert(_)) {
            report.swap_count
        } else {
            report.total_cost
        };
        steps.push(report);
    }
    Ok(RunOutcome { total_cost: total, raw_cost: raw, steps })
}

/// Shared insertion behaviour: append at the back, pay the landing position.
pub(crate) fn append_report(list: &mut ListState, item: Item, model: CostModel) -> Result<StepReport> {
    list.push_back(item)?;
    let access = model.access(list.len());
    Ok(StepReport::new(Event::Insert(item), access, 0, list.clone()))
}

/// Shared deletion behaviour: pay the access, remove in place.
pub(crate) fn remove_report(list: &mut ListState, item: Item, model: CostModel) -> Result<StepReport> {
    let pos = list.position(item).ok_or_else(|| Error::UnknownItem(format!("{item:?}")))?;
    let access = model.access(pos);
    list.remove(item)?;
    Ok(StepReport::new(Event::Delete(item), access, 0, list.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::parse_sequence;

    /// Minimal algorithm: never reorganizes.
    struct Noop {
        list: ListState,
    }

    impl OnlineAlgorithm for Noop {
        fn name(&self) -> &'static str {
            "noop"
        }
        fn list(&self) -> &ListState {
            &self.list
        }
        fn serve(&mut self, event: &Event, model: CostModel) -> Result<StepReport> {
            match *event {
                Event::Access(it) => {
                    let pos = self.list.position(it).ok_or(Error::UnknownItem(String::new()))?;
                    Ok(StepReport::new(*event, model.access(pos), 0, self.list.clone()))
                }
                Event::Insert(it) => append_report(&mut self.list, it, model),
                Event::Delete(it) => remove_report(&mut self.list, it, model),
            }
        }
    }

    #[test]
    fn run_sums_step_costs() {
        let seq = parse_sequence("items: a b c\nc\nb\na\n").unwrap();
        let mut alg = Noop { list: seq.initial().clone() };
        let out = run_algorithm(&mut alg, &seq, CostModel::Partial, false).unwrap();
        assert_eq!(out.total_cost, 2 + 1 + 0);
        assert_eq!(out.raw_cost, out.total_cost);
        assert_eq!(out.steps.len(), 3);
    }

    #[test]
    fn adjusted_run_drops_insert_access() {
        let seq = parse_sequence("items: a b\n+c\nc\n-a\n").unwrap();
        let mut alg = Noop { list: seq.initial().clone() };
        let out = run_algorithm(&mut alg, &seq, CostModel::Partial, true).unwrap();
        // Insert lands at position 3 (partial access 2, adjusted away),
        // access c costs 2, delete a costs 0.
        assert_eq!(out.total_cost, 0 + 2 + 0);
        assert_eq!(out.raw_cost, 2 + 2 + 0);
    }

    #[test]
    fn run_requires_matching_initial_list() {
        let seq = parse_sequence("items: a b\na\n").unwrap();
        let mut alg = Noop { list: ListState::new(vec![Item(1), Item(0)]).unwrap() };
        assert!(run_algorithm(&mut alg, &seq, CostModel::Partial, false).is_err());
    }
}
