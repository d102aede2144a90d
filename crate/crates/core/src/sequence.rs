//! Request sequences: events, label universe, text format, random generation.
//!
//! Text format, one event per line:
//!
//! ```text
//! # comment
//! items: a b c        optional; fixes the initial list order
//! a                   access item a
//! +d                  insert a fresh item d at the back of the list
//! -b                  delete item b
//! ```
//!
//! Blank lines and `#` comments are skipped. Without an `items:` line the
//! initial list is empty and every item must be inserted before use. Deleted
//! items never return: a label is inserted at most once over the lifetime of
//! a sequence.

use std::collections::HashMap;
use std::fmt;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::list::{Item, ListState};

/// A single request.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Event {
    Access(Item),
    Insert(Item),
    Delete(Item),
}

impl Event {
    pub fn item(&self) -> Item {
        match *self {
            Event::Access(it) | Event::Insert(it) | Event::Delete(it) => it,
        }
    }

    pub fn is_access(&self) -> bool {
        matches!(self, Event::Access(_))
    }
}

/// Bidirectional label/id mapping. Ids are dense and never reused.
#[derive(Clone, Debug, Default)]
pub struct Universe {
    labels: Vec<String>,
    index: HashMap<String, Item>,
}

impl Universe {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        let mut u = Universe::default();
        for l in labels {
            u.add(l)?;
        }
        Ok(u)
    }

    /// Registers a label and returns its item id.
    pub fn add(&mut self, label: String) -> Result<Item> {
        validate_label(&label)?;
        if self.index.contains_key(&label) {
            return Err(Error::DuplicateItem(label));
        }
        let item = Item(self.labels.len() as u32);
        self.index.insert(label.clone(), item);
        self.labels.push(label);
        Ok(item)
    }

    pub fn item(&self, label: &str) -> Option<Item> {
        self.index.get(label).copied()
    }

    pub fn label(&self, item: Item) -> &str {
        &self.labels[item.index()]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

fn validate_label(label: &str) -> Result<()> {
    let bad = label.is_empty()
        || label.starts_with('+')
        || label.starts_with('-')
        || label.starts_with('#')
        || label.contains(char::is_whitespace)
        || label.contains(':');
    if bad {
        Err(Error::InvalidSequence { at: 0, reason: format!("bad label `{label}`") })
    } else {
        Ok(())
    }
}

/// A validated request sequence over a fixed label universe.
#[derive(Clone, Debug)]
pub struct RequestSequence {
    universe: Universe,
    initial: ListState,
    events: Vec<Event>,
}

impl RequestSequence {
    /// Builds and validates a sequence. Rules checked by replay: accesses
    /// and deletions hit present items, insertions use fresh labels only,
    /// and nothing is ever re-inserted.
    pub fn new(universe: Universe, initial: ListState, events: Vec<Event>) -> Result<Self> {
        let mut present = vec![false; universe.len()];
        let mut ever = vec![false; universe.len()];
        for &it in initial.items() {
            if it.index() >= universe.len() {
                return Err(Error::UnknownItem(format!("{it:?}")));
            }
            present[it.index()] = true;
            ever[it.index()] = true;
        }
        for (step, ev) in events.iter().enumerate() {
            let it = ev.item();
            if it.index() >= universe.len() {
                return Err(Error::UnknownItem(format!("{it:?}")));
            }
            match ev {
                Event::Access(_) | Event::Delete(_) => {
                    if !present[it.index()] {
                        return Err(Error::InvalidSequence {
                            at: step,
                            reason: format!("item `{}` not present", universe.label(it)),
                        });
                    }
                    if matches!(ev, Event::Delete(_)) {
                        present[it.index()] = false;
                    }
                }
                Event::Insert(_) => {
                    if ever[it.index()] {
                        return Err(Error::InvalidSequence {
                            at: step,
                            reason: format!("item `{}` inserted twice", universe.label(it)),
                        });
                    }
                    present[it.index()] = true;
                    ever[it.index()] = true;
                }
            }
        }
        Ok(RequestSequence { universe, initial, events })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn initial(&self) -> &ListState {
        &self.initial
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// True when no insertions or deletions occur.
    pub fn access_only(&self) -> bool {
        self.events.iter().all(Event::is_access)
    }
}

/// Parses the text format described at module level.
pub fn parse_sequence(text: &str) -> Result<RequestSequence> {
    let mut universe = Universe::default();
    let mut initial: Vec<Item> = Vec::new();
    let mut events: Vec<Event> = Vec::new();
    let mut saw_items_line = false;
    let mut saw_event = false;

    for (lineno, raw) in text.lines().enumerate() {
        let at = lineno + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("items:") {
            if saw_items_line || saw_event {
                return Err(Error::InvalidSequence {
                    at,
                    reason: "items line must come first and appear once".into(),
                });
            }
            saw_items_line = true;
            for label in rest.split_whitespace() {
                let item = universe
                    .add(label.to_string())
                    .map_err(|e| Error::InvalidSequence { at, reason: e.to_string() })?;
                initial.push(item);
            }
            continue;
        }
        saw_event = true;
        let mut tokens = line.split_whitespace();
        let tok = tokens.next().expect("non-empty line has a token");
        if tokens.next().is_some() {
            return Err(Error::InvalidSequence { at, reason: "one event per line".into() });
        }
        let event = if let Some(label) = tok.strip_prefix('+') {
            let item = match universe.item(label) {
                // Re-insert attempts are caught by sequence validation below.
                Some(it) => it,
                None => universe
                    .add(label.to_string())
                    .map_err(|e| Error::InvalidSequence { at, reason: e.to_string() })?,
            };
            Event::Insert(item)
        } else if let Some(label) = tok.strip_prefix('-') {
            let item = universe.item(label).ok_or_else(|| Error::InvalidSequence {
                at,
                reason: format!("unknown item `{label}`"),
            })?;
            Event::Delete(item)
        } else {
            let item = universe.item(tok).ok_or_else(|| Error::InvalidSequence {
                at,
                reason: format!("unknown item `{tok}`"),
            })?;
            Event::Access(item)
        };
        events.push(event);
    }

    let initial = ListState::new(initial)?;
    RequestSequence::new(universe, initial, events)
}

/// Serializes a sequence back into the text format. `parse_sequence` of the
/// output reproduces the sequence exactly.
pub fn serialize_sequence(seq: &RequestSequence) -> String {
    let mut out = String::new();
    if !seq.initial().is_empty() {
        out.push_str("items:");
        for &it in seq.initial().items() {
            out.push(' ');
            out.push_str(seq.universe().label(it));
        }
        out.push('\n');
    }
    for ev in seq.events() {
        match ev {
            Event::Access(it) => out.push_str(seq.universe().label(*it)),
            Event::Insert(it) => {
                out.push('+');
                out.push_str(seq.universe().label(*it));
            }
            Event::Delete(it) => {
                out.push('-');
                out.push_str(seq.universe().label(*it));
            }
        }
        out.push('\n');
    }
    out
}

/// Universe with labels `x0..x{n-1}` and the identity initial list.
pub fn standard_universe(n: usize) -> (Universe, ListState) {
    let labels = (0..n).map(|i| format!("x{i}")).collect();
    let universe = Universe::new(labels).expect("generated labels are valid");
    let initial = ListState::new((0..n as u32).map(Item).collect()).expect("distinct");
    (universe, initial)
}

/// Access-only sequence of `len` requests over `n` items, drawn uniformly or
/// from a Zipf law with exponent `s` (item `x_i` gets weight `1/(i+1)^s`).
pub fn random_access_sequence(
    n: usize,
    len: usize,
    seed: u64,
    zipf: Option<f64>,
) -> RequestSequence {
    let (universe, initial) = standard_universe(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let events: Vec<Event> = match zipf {
        None => (0..len).map(|_| Event::Access(Item(rng.gen_range(0..n as u32)))).collect(),
        Some(s) => {
            let weights: Vec<f64> = (0..n).map(|i| 1.0 / ((i + 1) as f64).powf(s)).collect();
            let dist = WeightedIndex::new(&weights).expect("positive weights");
            (0..len).map(|_| Event::Access(Item(dist.sample(&mut rng) as u32))).collect()
        }
    };
    RequestSequence::new(universe, initial, events).expect("generated sequence is valid")
}

/// Options for [`random_dynamic_sequence`].
#[derive(Clone, Copy, Debug)]
pub struct DynamicOptions {
    /// List length floor; deletions pause here.
    pub min_len: usize,
    /// List length ceiling; insertions pause here.
    pub max_len: usize,
    /// Probability of an insertion at each step (when allowed).
    pub p_insert: f64,
    /// Probability of a deletion at each step (when allowed).
    pub p_delete: f64,
}

impl Default for DynamicOptions {
    fn default() -> Self {
        DynamicOptions { min_len: 2, max_len: 8, p_insert: 0.1, p_delete: 0.1 }
    }
}

/// Mixed access/insert/delete sequence of `len` events starting from `n`
/// items. Fresh labels are minted for insertions; deleted labels never
/// return. List length stays within the configured band.
pub fn random_dynamic_sequence(
    n: usize,
    len: usize,
    seed: u64,
    opts: DynamicOptions,
) -> RequestSequence {
    assert!(opts.min_len >= 1 && opts.min_len <= n && n <= opts.max_len);
    let mut universe = Universe::new((0..n).map(|i| format!("x{i}")).collect()).expect("valid");
    let initial = ListState::new((0..n as u32).map(Item).collect()).expect("distinct");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut present: Vec<Item> = initial.items().to_vec();
    let mut fresh = n;
    let mut events = Vec::with_capacity(len);
    for _ in 0..len {
        let roll: f64 = rng.gen();
        let ev = if roll < opts.p_insert && present.len() < opts.max_len {
            let item = universe.add(format!("x{fresh}")).expect("fresh label");
            fresh += 1;
            present.push(item);
            Event::Insert(item)
        } else if roll < opts.p_insert + opts.p_delete && present.len() > opts.min_len {
            let k = rng.gen_range(0..present.len());
            Event::Delete(present.swap_remove(k))
        } else {
            Event::Access(present[rng.gen_range(0..present.len())])
        };
        events.push(ev);
    }
    RequestSequence::new(universe, initial, events).expect("generated sequence is valid")
}

impl fmt::Display for RequestSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_sequence(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_basic_sequence() {
        let seq = parse_sequence("items: a b c\na\n+d\n-b\nd\n").unwrap();
        assert_eq!(seq.initial().len(), 3);
        assert_eq!(seq.len(), 4);
        assert_eq!(seq.universe().len(), 4);
        let d = seq.universe().item("d").unwrap();
        assert_eq!(seq.events()[1], Event::Insert(d));
        assert_eq!(seq.events()[3], Event::Access(d));
    }

    #[test]
    fn parse_skips_comments_and_blanks() {
        let seq = parse_sequence("# header\n\nitems: a b\n a # trailing\n\nb\n").unwrap();
        assert_eq!(seq.len(), 2);
        assert!(seq.access_only());
    }

    #[test]
    fn parse_rejects_access_to_absent_item() {
        assert!(parse_sequence("items: a b\n-a\na\n").is_err());
        assert!(parse_sequence("items: a\nq\n").is_err());
    }

    #[test]
    fn parse_rejects_reinsert() {
        assert!(parse_sequence("items: a b\n-a\n+a\n").is_err());
        assert!(parse_sequence("items: a\n+a\n").is_err());
    }

    #[test]
    fn empty_initial_list_needs_inserts() {
        let seq = parse_sequence("+a\na\n+b\nb\n").unwrap();
        assert_eq!(seq.initial().len(), 0);
        assert_eq!(seq.len(), 4);
        assert!(parse_sequence("a\n").is_err());
    }

    #[test]
    fn serialize_round_trip() {
        let text = "items: a b c\na\n+d\n-b\nd\n";
        let seq = parse_sequence(text).unwrap();
        assert_eq!(serialize_sequence(&seq), text);
    }

    #[test]
    fn random_access_respects_bounds() {
        let seq = random_access_sequence(5, 100, 7, None);
        assert_eq!(seq.len(), 100);
        assert!(seq.access_only());
        let zipf = random_access_sequence(5, 100, 7, Some(1.2));
        assert_eq!(zipf.len(), 100);
    }

    #[test]
    fn random_dynamic_is_valid_and_banded() {
        let opts = DynamicOptions { min_len: 2, max_len: 5, p_insert: 0.3, p_delete: 0.3 };
        let seq = random_dynamic_sequence(3, 500, 11, opts);
        // RequestSequence::new already validated; re-check the band by replay.
        let mut n = seq.initial().len();
        for ev in seq.events() {
            match ev {
                Event::Insert(_) => n += 1,
                Event::Delete(_) => n -= 1,
                Event::Access(_) => {}
            }
            assert!(n >= 2 && n <= 5);
        }
        // Determinism under the same seed.
        let again = random_dynamic_sequence(3, 500, 11, opts);
        assert_eq!(seq.events(), again.events());
    }
}
