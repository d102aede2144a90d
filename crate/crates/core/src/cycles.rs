//! Extremal cost-ratio cycles in transition graphs.
//!
//! Adversary construction and certificate audits both reduce questions of
//! the form "how bad can a periodic schedule get" to a directed graph whose
//! edges carry two nonnegative integer costs: what the algorithm pays and
//! twice what the pair-based optimum pays (halves keep partial costs
//! integral). The ratio of a cycle is `alg / (opt_halves / 2)`; this module
//! finds the cycle maximizing or minimizing that ratio, decides exactly
//! whether any cycle falls below a rational threshold, and detects the two
//! degenerate cycle shapes (zero-opt with positive algorithm cost, and
//! zero-zero stalls).
//!
//! Search strategy for the maximum: a parametric binary search on the ratio
//! (Bellman-Ford detects a cycle with positive margin `sum(alg - r*opt)`),
//! followed by an exact rational improvement loop on integer weights. The
//! binary search only supplies a good starting cycle; the returned ratio is
//! always exact.

use crate::error::{Error, Result};
use crate::numeric::{rat, Rat};

/// One transition with its two costs. `opt_halves` is twice the optimum's
/// cost so that partial-model costs stay integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RatioEdge {
    pub from: usize,
    pub to: usize,
    pub alg: u64,
    pub opt_halves: u64,
}

/// A directed multigraph over dense node ids with cost-labeled edges.
/// Edge ids are assigned in insertion order and stay stable, so callers can
/// keep side tables (requests, responses) keyed by edge id and replay any
/// witness cycle.
#[derive(Clone, Debug, Default)]
pub struct RatioGraph {
    nodes: usize,
    edges: Vec<RatioEdge>,
}

impl RatioGraph {
    pub fn new(nodes: usize) -> Self {
        RatioGraph {
            nodes,
            edges: Vec::new(),
        }
    }

    /// Adds a node and returns its id.
    pub fn add_node(&mut self) -> usize {
        self.nodes += 1;
        self.nodes - 1
    }

    /// Adds an edge and returns its id. Endpoints must already exist.
    pub fn add_edge(&mut self, from: usize, to: usize, alg: u64, opt_halves: u64) -> usize {
        assert!(from < self.nodes && to < self.nodes, "edge endpoint out of range");
        self.edges.push(RatioEdge {
            from,
            to,
            alg,
            opt_halves,
        });
        self.edges.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: usize) -> &RatioEdge {
        &self.edges[id]
    }

    pub fn edges(&self) -> &[RatioEdge] {
        &self.edges
    }
}

/// Result of an extremal-ratio search. Witnesses are edge-id lists forming
/// a closed walk; `verify_cycle` checks that shape and `cycle_cost` prices
/// it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RatioOutcome {
    /// The graph has no directed cycle at all.
    NoCycle,
    /// A cycle the optimum traverses for free while the algorithm pays.
    Infinite { witness: Vec<usize> },
    /// The extremal finite ratio `2 * alg / opt_halves` with a cycle
    /// achieving it exactly.
    Finite { ratio: Rat, witness: Vec<usize> },
}

impl RatioOutcome {
    /// The witness cycle, if the outcome has one.
    pub fn witness(&self) -> Option<&[usize]> {
        match self {
            RatioOutcome::NoCycle => None,
            RatioOutcome::Infinite { witness } | RatioOutcome::Finite { witness, .. } => {
                Some(witness)
            }
        }
    }
}

/// Sums the two costs over a witness cycle.
pub fn cycle_cost(graph: &RatioGraph, cycle: &[usize]) -> (u64, u64) {
    let mut alg = 0u64;
    let mut halves = 0u64;
    for &id in cycle {
        let e = graph.edge(id);
        alg = alg.checked_add(e.alg).expect("cycle cost overflow");
        halves = halves.checked_add(e.opt_halves).expect("cycle cost overflow");
    }
    (alg, halves)
}

/// Checks that a witness is a nonempty closed walk of existing edges.
pub fn verify_cycle(graph: &RatioGraph, cycle: &[usize]) -> Result<()> {
    if cycle.is_empty() {
        return Err(Error::InvariantViolation("empty witness cycle".into()));
    }
    for &id in cycle {
        if id >= graph.edge_count() {
            return Err(Error::InvariantViolation(format!(
                "witness references edge {id} of {}",
                graph.edge_count()
            )));
        }
    }
    for pair in cycle.windows(2) {
        if graph.edge(pair[0]).to != graph.edge(pair[1]).from {
            return Err(Error::InvariantViolation(format!(
                "witness breaks between edges {} and {}",
                pair[0], pair[1]
            )));
        }
    }
    let first = graph.edge(cycle[0]);
    let last = graph.edge(cycle[cycle.len() - 1]);
    if last.to != first.from {
        return Err(Error::InvariantViolation(
            "witness walk is not closed".into(),
        ));
    }
    Ok(())
}

/// Strongly connected components over the subgraph of edges `keep` accepts.
/// Returns a component id per node (iterative Tarjan, no recursion).
fn components(graph: &RatioGraph, keep: impl Fn(&RatioEdge) -> bool) -> Vec<usize> {
    let n = graph.node_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in graph.edges() {
        if keep(e) {
            adj[e.from].push(e.to);
        }
    }

    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comp = vec![UNSET; n];
    let mut next_index = 0usize;
    let mut comp_count = 0usize;
    // Explicit DFS frames: (node, next child offset).
    let mut frames: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&(v, child)) = frames.last() {
            if child < adj[v].len() {
                let w = adj[v][child];
                frames.last_mut().expect("frame present").1 += 1;
                if index[w] == UNSET {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
            }
        }
    }
    comp
}

/// Finds a cycle through `seed` using only edges `keep` accepts. The seed's
/// endpoints must lie in one strongly connected component of that subgraph,
/// so a return path always exists.
fn cycle_through(
    graph: &RatioGraph,
    seed: usize,
    keep: impl Fn(&RatioEdge) -> bool,
) -> Vec<usize> {
    let e = *graph.edge(seed);
    if e.from == e.to {
        return vec![seed];
    }
    let n = graph.node_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (id, edge) in graph.edges().iter().enumerate() {
        if keep(edge) {
            adj[edge.from].push(id);
        }
    }
    let mut pred = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    seen[e.to] = true;
    queue.push_back(e.to);
    while let Some(v) = queue.pop_front() {
        if v == e.from {
            break;
        }
        for &id in &adj[v] {
            let w = graph.edge(id).to;
            if !seen[w] {
                seen[w] = true;
                pred[w] = id;
                queue.push_back(w);
            }
        }
    }
    assert!(seen[e.from], "seed endpoints not in one component");
    let mut path = Vec::new();
    let mut cur = e.from;
    while cur != e.to {
        let id = pred[cur];
        path.push(id);
        cur = graph.edge(id).from;
    }
    path.reverse();
    let mut cycle = vec![seed];
    cycle.extend(path);
    debug_assert!(verify_cycle(graph, &cycle).is_ok());
    cycle
}

/// Bellman-Ford negative-cycle detection from a virtual source (all
/// distances start at zero, so any negative cycle in the graph is found).
/// Returns the cycle as forward-ordered edge ids.
fn negative_cycle<W>(graph: &RatioGraph, weight: impl Fn(&RatioEdge) -> W) -> Option<Vec<usize>>
where
    W: Copy + PartialOrd + std::ops::Add<Output = W> + num_traits::Zero,
{
    let n = graph.node_count();
    if n == 0 || graph.edge_count() == 0 {
        return None;
    }
    let mut dist = vec![W::zero(); n];
    let mut pred = vec![usize::MAX; n];
    let mut last_touched = usize::MAX;
    for _ in 0..=n {
        last_touched = usize::MAX;
        for (id, e) in graph.edges().iter().enumerate() {
            let cand = dist[e.from] + weight(e);
            if cand < dist[e.to] {
                dist[e.to] = cand;
                pred[e.to] = id;
                last_touched = e.to;
            }
        }
        if last_touched == usize::MAX {
            return None;
        }
    }
    // A relaxation survived n+1 full rounds, so the predecessor chain from
    // the touched node runs into a cycle; the first node seen twice on a
    // backward walk is on it.
    let mut mark = vec![false; n];
    let mut cur = last_touched;
    while !mark[cur] {
        mark[cur] = true;
        debug_assert!(pred[cur] != usize::MAX, "predecessor chain broke");
        cur = graph.edge(pred[cur]).from;
    }
    let start = cur;
    let mut cycle = Vec::new();
    loop {
        let id = pred[cur];
        cycle.push(id);
        cur = graph.edge(id).from;
        if cur == start {
            break;
        }
    }
    cycle.reverse();
    debug_assert!(verify_cycle(graph, &cycle).is_ok());
    Some(cycle)
}

/// Exact variant: any cycle found is re-summed and must be strictly
/// negative, so callers can rely on it for rational comparisons.
fn negative_cycle_exact(
    graph: &RatioGraph,
    weight: impl Fn(&RatioEdge) -> i128,
) -> Option<Vec<usize>> {
    let cycle = negative_cycle(graph, &weight)?;
    let total: i128 = cycle.iter().map(|&id| weight(graph.edge(id))).sum();
    assert!(total < 0, "traced cycle is not negative (total {total})");
    Some(cycle)
}

/// A cycle the optimum traverses for free while the algorithm pays: all
/// edges have zero `opt_halves` and at least one has positive `alg`. Such a
/// cycle makes every ratio bound vacuous, so extremal searches screen for
/// it first.
pub fn infinite_cycle(graph: &RatioGraph) -> Option<Vec<usize>> {
    let keep = |e: &RatioEdge| e.opt_halves == 0;
    let comp = components(graph, keep);
    let seed = graph
        .edges()
        .iter()
        .position(|e| keep(e) && e.alg > 0 && comp[e.from] == comp[e.to])?;
    Some(cycle_through(graph, seed, keep))
}

/// A stall: a cycle that is free for both sides. Adversary subgraphs must
/// not contain one (the game could idle forever), so certificate audits
/// check this separately from the ratio.
pub fn null_cycle(graph: &RatioGraph) -> Option<Vec<usize>> {
    let keep = |e: &RatioEdge| e.opt_halves == 0 && e.alg == 0;
    let comp = components(graph, keep);
    let seed = graph
        .edges()
        .iter()
        .position(|e| keep(e) && comp[e.from] == comp[e.to])?;
    Some(cycle_through(graph, seed, keep))
}

/// A cycle whose ratio is strictly below `threshold`, or None when every
/// cycle meets it. Decided exactly on integer weights
/// `2q * alg - p * opt_halves` for `threshold = p/q`; cycles that cost the
/// optimum nothing can never fall below a positive threshold.
pub fn cycle_below(graph: &RatioGraph, threshold: Rat) -> Option<Vec<usize>> {
    let p = *threshold.numer() as i128;
    let q = *threshold.denom() as i128;
    negative_cycle_exact(graph, |e| 2 * q * e.alg as i128 - p * e.opt_halves as i128)
}

fn ratio_of(alg: u64, halves: u64) -> Rat {
    let num = i64::try_from(2 * alg as u128).expect("ratio numerator overflow");
    let den = i64::try_from(halves).expect("ratio denominator overflow");
    rat(num, den)
}

/// Exact improvement loop shared by the max and min searches: repeatedly
/// asks Bellman-Ford for a cycle strictly better than the current witness,
/// comparing cross products in integers. Each step strictly improves the
/// ratio and simple-cycle ratios form a finite set, so this terminates.
fn improve(graph: &RatioGraph, mut witness: Vec<usize>, maximize: bool) -> (Rat, Vec<usize>) {
    loop {
        let (a, h) = cycle_cost(graph, &witness);
        assert!(h > 0, "improvement witness must cost the optimum something");
        let (a, h) = (a as i128, h as i128);
        // Maximizing: a cycle (a', h') is better iff a'h > ah', i.e. the
        // weight a*opt_halves - h*alg sums negative over it. Minimizing
        // flips the sign. Either way a strictly-better cycle found under
        // these weights has h' > 0 automatically.
        let found = negative_cycle_exact(graph, |e| {
            let cross = a * e.opt_halves as i128 - h * e.alg as i128;
            if maximize {
                cross
            } else {
                -cross
            }
        });
        match found {
            Some(better) => witness = better,
            None => {
                let (a, h) = cycle_cost(graph, &witness);
                return (ratio_of(a, h), witness);
            }
        }
    }
}

/// The maximum of `alg / (opt_halves / 2)` over directed cycles.
///
/// Zero-opt cycles with positive algorithm cost report `Infinite`. The
/// finite case runs the parametric search (binary search on the ratio, a
/// Bellman-Ford cycle test per probe, tolerance 1e-6) and then confirms and
/// sharpens the witness with exact rational arithmetic, so the returned
/// ratio is the true maximum, not an approximation. Cycles that are free
/// for the algorithm report ratio 0.
pub fn max_cycle_ratio(graph: &RatioGraph) -> RatioOutcome {
    if let Some(witness) = infinite_cycle(graph) {
        return RatioOutcome::Infinite { witness };
    }
    let comp = components(graph, |_| true);
    let internal = |e: &RatioEdge| comp[e.from] == comp[e.to];
    let seed = match graph
        .edges()
        .iter()
        .position(|e| internal(e) && e.alg > 0)
    {
        Some(id) => id,
        None => {
            // No cycle costs the algorithm anything.
            let any = graph.edges().iter().position(internal);
            return match any {
                Some(id) => RatioOutcome::Finite {
                    ratio: rat(0, 1),
                    witness: cycle_through(graph, id, |_| true),
                },
                None => RatioOutcome::NoCycle,
            };
        }
    };
    // The seed cycle pays the algorithm, and the infinite screen above
    // guarantees every such cycle also pays the optimum.
    let mut witness = cycle_through(graph, seed, |_| true);

    // Parametric bracketing. Any simple cycle has integral opt_halves >= 1
    // here, so its ratio is at most twice its total algorithm cost.
    let max_alg: u64 = graph.edges().iter().map(|e| e.alg).max().unwrap_or(0);
    let mut lo = 0.0f64;
    let mut hi = 2.0 * graph.node_count() as f64 * max_alg as f64 + 1.0;
    let mut bracket_witness: Option<Vec<usize>> = None;
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        // A cycle with sum(alg - mid*opt) > 0 is a negative cycle under
        // mid*opt - alg.
        match negative_cycle(graph, |e| mid * (e.opt_halves as f64 / 2.0) - e.alg as f64) {
            Some(cycle) => {
                lo = mid;
                bracket_witness = Some(cycle);
            }
            None => hi = mid,
        }
    }
    if let Some(cand) = bracket_witness {
        let (ca, ch) = cycle_cost(graph, &cand);
        let (wa, wh) = cycle_cost(graph, &witness);
        // Adopt the bracketed cycle when it is exactly better; float
        // round-off can hand back a worse or even zero-opt cycle, which the
        // exact loop below must not start from.
        if ch > 0 && (ca as u128) * (wh as u128) > (wa as u128) * (ch as u128) {
            witness = cand;
        }
    }
    let (ratio, witness) = improve(graph, witness, true);
    RatioOutcome::Finite { ratio, witness }
}

/// The minimum of `alg / (opt_halves / 2)` over directed cycles that cost
/// the optimum something. Zero-opt cycles never lower the minimum; if every
/// cycle is free for the optimum the outcome is `Infinite` (callers screen
/// stalls with `null_cycle` beforehand).
pub fn min_cycle_ratio(graph: &RatioGraph) -> RatioOutcome {
    let comp = components(graph, |_| true);
    let internal = |e: &RatioEdge| comp[e.from] == comp[e.to];
    let seed = graph
        .edges()
        .iter()
        .position(|e| internal(e) && e.opt_halves > 0);
    let seed = match seed {
        Some(id) => id,
        None => {
            // Any remaining cycle is free for the optimum.
            let any = graph
                .edges()
                .iter()
                .position(|e| internal(e) && e.alg > 0)
                .or_else(|| graph.edges().iter().position(internal));
            return match any {
                Some(id) => RatioOutcome::Infinite {
                    witness: cycle_through(graph, id, |_| true),
                },
                None => RatioOutcome::NoCycle,
            };
        }
    };
    let witness = cycle_through(graph, seed, |_| true);
    let (ratio, witness) = improve(graph, witness, false);
    RatioOutcome::Finite { ratio, witness }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite(outcome: RatioOutcome) -> (Rat, Vec<usize>) {
        match outcome {
            RatioOutcome::Finite { ratio, witness } => (ratio, witness),
            other => panic!("expected finite ratio, got {other:?}"),
        }
    }

    #[test]
    fn two_loops_pick_the_right_extremes() {
        let mut g = RatioGraph::new(2);
        let slow = g.add_edge(0, 0, 3, 2); // ratio 3
        let fast = g.add_edge(1, 1, 5, 2); // ratio 5
        let over = g.add_edge(0, 1, 0, 4);
        let back = g.add_edge(1, 0, 0, 4); // the round trip alone: ratio 0

        let (max, max_wit) = finite(max_cycle_ratio(&g));
        assert_eq!(max, rat(5, 1));
        assert_eq!(max_wit, vec![fast]);
        let _ = slow;

        let (min, min_wit) = finite(min_cycle_ratio(&g));
        assert_eq!(min, rat(0, 1));
        verify_cycle(&g, &min_wit).unwrap();
        let (a, h) = cycle_cost(&g, &min_wit);
        assert_eq!((a, h), (0, 8));
        assert!(min_wit.contains(&over) && min_wit.contains(&back));
    }

    #[test]
    fn zero_opt_cycle_reports_infinite() {
        let mut g = RatioGraph::new(2);
        g.add_edge(0, 1, 1, 0);
        g.add_edge(1, 0, 0, 0);
        match max_cycle_ratio(&g) {
            RatioOutcome::Infinite { witness } => {
                verify_cycle(&g, &witness).unwrap();
                assert_eq!(cycle_cost(&g, &witness), (1, 0));
            }
            other => panic!("expected infinite, got {other:?}"),
        }
        assert!(null_cycle(&g).is_none());
    }

    #[test]
    fn stalls_are_found_separately() {
        let mut g = RatioGraph::new(3);
        g.add_edge(0, 1, 2, 2);
        g.add_edge(1, 0, 1, 2);
        g.add_edge(2, 2, 0, 0); // free for both sides
        let stall = null_cycle(&g).expect("stall cycle");
        assert_eq!(cycle_cost(&g, &stall), (0, 0));
        // The stall does not contaminate the finite extremes.
        let (max, _) = finite(max_cycle_ratio(&g));
        assert_eq!(max, rat(3, 2));
        let (min, _) = finite(min_cycle_ratio(&g));
        assert_eq!(min, rat(3, 2));
    }

    #[test]
    fn acyclic_graph_has_no_cycles() {
        let mut g = RatioGraph::new(3);
        g.add_edge(0, 1, 5, 1);
        g.add_edge(1, 2, 7, 3);
        assert_eq!(max_cycle_ratio(&g), RatioOutcome::NoCycle);
        assert_eq!(min_cycle_ratio(&g), RatioOutcome::NoCycle);
        assert!(infinite_cycle(&g).is_none());
        assert!(null_cycle(&g).is_none());
        assert!(cycle_below(&g, rat(100, 1)).is_none());
    }

    #[test]
    fn cycle_below_is_strict_at_the_threshold() {
        let mut g = RatioGraph::new(1);
        g.add_edge(0, 0, 3, 2); // ratio exactly 3
        assert!(cycle_below(&g, rat(3, 1)).is_none());
        let wit = cycle_below(&g, rat(31, 10)).expect("3 < 3.1");
        assert_eq!(cycle_cost(&g, &wit), (3, 2));
    }

    #[test]
    fn exact_confirmation_separates_near_ties() {
        // 2999999/1000000 vs 3: the gap sits at the float search tolerance,
        // so only the rational confirmation can rank them reliably.
        let mut g = RatioGraph::new(2);
        g.add_edge(0, 0, 2_999_999, 2_000_000);
        let three = g.add_edge(1, 1, 3, 2);
        g.add_edge(0, 1, 0, 2);
        g.add_edge(1, 0, 0, 2);
        let (max, wit) = finite(max_cycle_ratio(&g));
        assert_eq!(max, rat(3, 1));
        assert_eq!(wit, vec![three]);
        let (min, _) = finite(min_cycle_ratio(&g));
        assert_eq!(min, rat(0, 1)); // the two crossing edges alone
    }

    #[test]
    fn mixed_cycle_can_beat_every_pure_loop() {
        // No single loop exists; the only cycle mixes a costly alg edge
        // with a costly opt edge.
        let mut g = RatioGraph::new(2);
        g.add_edge(0, 1, 9, 0);
        g.add_edge(1, 0, 1, 4);
        let (max, wit) = finite(max_cycle_ratio(&g));
        assert_eq!(max, rat(5, 1)); // (9 + 1) / (4 / 2)
        assert_eq!(wit.len(), 2);
        assert!(cycle_below(&g, rat(5, 1)).is_none());
        assert!(cycle_below(&g, rat(51, 10)).is_some());
    }
}
