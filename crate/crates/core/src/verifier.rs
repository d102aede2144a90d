//! Exhaustive verification of competitive ratios on small lists.
//!
//! The request-answer game between the optimum and a memoryless-canonical
//! online player is finite once states are read relative to the current
//! list: an optimum vertex holds a canonical work-function state, a player
//! vertex additionally holds the pending request position. The optimum pays
//! the growth of the work-function minimum when it reveals a request; the
//! player pays the access in the old order plus the adjacent swaps of its
//! answering rearrangement.
//!
//! A potential function certifies a ratio `rho` on this graph. Writing
//! `alg(v, r)` for the player vertex reached from optimum vertex `v` by
//! request `r` and `next(u, t)` for the optimum vertex reached from player
//! vertex `u` by rearrangement `t`, the two inequalities
//!
//! ```text
//! phi(v) + rho * c_opt(v, r)  >=  phi(alg(v, r))        for every request
//! phi(u)                      >=  min_t [ c_alg(u, t) + phi(next(u, t)) ]
//! ```
//!
//! telescope along any play: the player that always answers with a tight
//! rearrangement pays at most `rho * OPT + phi(initial)` in total, so a
//! nonnegative fixed point with zero potential on the initial vertex proves
//! `rho`-competitiveness constructively. [`potential_iteration`] searches
//! for that fixed point from all zeros; both operators are monotone, so the
//! iteration either reaches the least fixed point or grows past any bound,
//! and [`audit_potentials`] re-checks the result in exact integer
//! arithmetic afterwards. Divergence is turned into evidence the other way
//! by [`class_lower_bound`]: the growing potentials suggest a request
//! strategy, and a cycle check on the induced subgraph certifies that every
//! restricted player loses `rho` against it.
//!
//! Potentials are stored as integer ticks of `1/(2q)` for `rho = p/q`:
//! optimum edge costs are half-integral, player edge costs integral, so
//! every quantity in both inequalities is a whole number of ticks and the
//! fixed-point test is exact.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cycles::{cycle_below, min_cycle_ratio, null_cycle, RatioGraph, RatioOutcome};
use crate::error::{Error, Result};
use crate::fullwf::relax_over_transpositions;
use crate::harness::{CanonicalOnline, OnlineAlgorithm, StepReport};
use crate::limits;
use crate::list::{CostModel, Item, ListState};
use crate::numeric::{rat, Rat};
use crate::pairwf::ModeMatrix;
use crate::perm::{compose, inversions, PermTable};
use crate::sequence::Event;

/// Which optimum model the game charges on its request edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WfKind {
    /// Exact optimum via the work function over all permutations.
    FullWf,
    /// Projected pair optimum via mode matrices; a lower bound on the true
    /// optimum, so verified ratios still hold against it only as stated.
    PairBasedWf,
}

impl WfKind {
    pub fn name(self) -> &'static str {
        match self {
            WfKind::FullWf => "full-wf",
            WfKind::PairBasedWf => "pair-based-wf",
        }
    }
}

/// Which rearrangements the player may answer with.
///
/// Every restriction must leave at least one answer per player vertex;
/// the builder rejects the graph otherwise.
#[derive(Clone, Copy, Debug)]
pub enum Restriction {
    /// All `n!` rearrangements.
    All,
    /// Minimizers of `W(pi) + d(pi, current)` after the request update.
    /// Needs [`WfKind::FullWf`]; the pair projection determines work values
    /// only up to pair offsets, which is a different class of minimizers.
    WfaClass,
    /// Keep the list, or move the requested item to the front.
    StayOrMtf,
    /// Arbitrary predicate on (request position, rearrangement). The
    /// rearrangement maps new positions to old 0-based positions.
    Custom(fn(usize, &[u8]) -> bool),
}

impl Restriction {
    pub fn name(self) -> &'static str {
        match self {
            Restriction::All => "all",
            Restriction::WfaClass => "wfa-class",
            Restriction::StayOrMtf => "stay-or-mtf",
            Restriction::Custom(_) => "custom",
        }
    }
}

/// Request edge: optimum vertex to player vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OptEdge {
    /// 1-based request position in the current list.
    pub request: usize,
    /// Twice the growth of the optimum's work-function minimum.
    pub cost_halves: u64,
    /// Player vertex index.
    pub to: usize,
}

/// Answer edge: player vertex to optimum vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlgEdge {
    /// Lexicographic rank of the rearrangement (new position -> old).
    pub target: u32,
    /// Twice the player cost: access in the old order plus adjacent swaps.
    pub cost_halves: u64,
    /// Optimum vertex index.
    pub to: usize,
}

enum StoredStates {
    Full(Vec<Vec<u32>>),
    Pair(Vec<ModeMatrix>),
}

/// The finite request-answer game over canonical states.
///
/// Optimum vertices carry request edges in position order `1..=n`; player
/// vertices carry answer edges in lexicographic rank order. Vertex ids are
/// breadth-first discovery order from the initial vertex (id 0, the fresh
/// work function of the initial list), so every vertex is reachable and
/// the numbering is deterministic.
pub struct GameGraph {
    n: usize,
    model: CostModel,
    kind: WfKind,
    restriction_name: &'static str,
    table: Arc<PermTable>,
    opt_adj: Vec<Vec<OptEdge>>,
    alg_adj: Vec<Vec<AlgEdge>>,
    alg_request: Vec<usize>,
    states: StoredStates,
}

impl GameGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> CostModel {
        self.model
    }

    pub fn kind(&self) -> WfKind {
        self.kind
    }

    pub fn restriction_name(&self) -> &'static str {
        self.restriction_name
    }

    pub fn opt_count(&self) -> usize {
        self.opt_adj.len()
    }

    pub fn alg_count(&self) -> usize {
        self.alg_adj.len()
    }

    pub fn opt_edge_total(&self) -> usize {
        self.opt_adj.iter().map(Vec::len).sum()
    }

    pub fn alg_edge_total(&self) -> usize {
        self.alg_adj.iter().map(Vec::len).sum()
    }

    /// The fresh-state vertex the game starts from.
    pub fn initial_vertex(&self) -> usize {
        0
    }

    /// Request edges of an optimum vertex, in position order; edge `r - 1`
    /// serves position `r`.
    pub fn opt_edges(&self, v: usize) -> &[OptEdge] {
        &self.opt_adj[v]
    }

    /// Answer edges of a player vertex, in lexicographic target order.
    pub fn alg_edges(&self, u: usize) -> &[AlgEdge] {
        &self.alg_adj[u]
    }

    /// The pending request position of a player vertex.
    pub fn alg_request(&self, u: usize) -> usize {
        self.alg_request[u]
    }

    /// The rearrangement behind a target rank: `perm[new_pos] = old_pos`.
    pub fn perm_of(&self, target: u32) -> &[u8] {
        &self.table.perms[target as usize]
    }

    /// Work-function offsets of an optimum vertex (full kind only).
    pub fn opt_state_full(&self, v: usize) -> Option<&[u32]> {
        match &self.states {
            StoredStates::Full(s) => Some(&s[v]),
            StoredStates::Pair(_) => None,
        }
    }

    /// Pair-mode state of an optimum vertex (pair kind only).
    pub fn opt_state_pair(&self, v: usize) -> Option<&ModeMatrix> {
        match &self.states {
            StoredStates::Full(_) => None,
            StoredStates::Pair(s) => Some(&s[v]),
        }
    }
}

impl fmt::Debug for GameGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GameGraph")
            .field("n", &self.n)
            .field("model", &self.model)
            .field("kind", &self.kind)
            .field("restriction", &self.restriction_name)
            .field("opt_vertices", &self.opt_count())
            .field("alg_vertices", &self.alg_count())
            .finish()
    }
}

/// Canonical work-function state machine the builder runs on. States are
/// relative to the current list; `relabel` rebases a state after the list
/// is rearranged by `target`.
trait WfEngine {
    type State: Clone;

    fn fresh(&self) -> Self::State;
    fn key(&self, s: &Self::State) -> Vec<u8>;
    /// Serves the item at 1-based position `r`; returns the updated state
    /// and the optimum cost in halves.
    fn request(&self, s: &Self::State, r: usize) -> (Self::State, u64);
    fn relabel(&self, s: &Self::State, target: u32) -> Self::State;
    /// Lexicographically sorted ranks minimizing `W(pi) + d(pi, id)`.
    fn wfa_targets(&self, s: &Self::State) -> Result<Vec<u32>>;
    fn store(&self, states: Vec<Self::State>) -> StoredStates;
}

struct FullEngine {
    table: Arc<PermTable>,
    model: CostModel,
    inv: Vec<u32>,
    /// `compose_rank[t][r] = rank(perms[t] o perms[r])`.
    compose_rank: Vec<Vec<u32>>,
}

impl FullEngine {
    fn new(table: Arc<PermTable>, model: CostModel) -> Self {
        let count = table.len();
        let inv: Vec<u32> = (0..count).map(|r| inversions(&table.perms[r]) as u32).collect();
        let compose_rank = (0..count)
            .map(|t| {
                (0..count)
                    .map(|r| table.rank_of(&compose(&table.perms[t], &table.perms[r])) as u32)
                    .collect()
            })
            .collect();
        FullEngine { table, model, inv, compose_rank }
    }
}

impl WfEngine for FullEngine {
    type State = Vec<u32>;

    fn fresh(&self) -> Vec<u32> {
        // Point mass on the identity: the offset of each order is its
        // distance from the current list.
        self.inv.clone()
    }

    fn key(&self, s: &Vec<u32>) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 * s.len());
        for &v in s {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    fn request(&self, s: &Vec<u32>, r: usize) -> (Vec<u32>, u64) {
        let item = (r - 1) as u8;
        let mut tmp: Vec<u32> = s
            .iter()
            .enumerate()
            .map(|(rank, &off)| off + self.model.access(self.table.position(rank, item) + 1) as u32)
            .collect();
        relax_over_transpositions(&self.table, &mut tmp);
        let inc = *tmp.iter().min().expect("nonempty table");
        for v in &mut tmp {
            *v -= inc;
        }
        (tmp, 2 * inc as u64)
    }

    fn relabel(&self, s: &Vec<u32>, target: u32) -> Vec<u32> {
        // An order pi in the new labels is t o pi in the old ones, so the
        // rebased function is a gather through the composition table.
        let map = &self.compose_rank[target as usize];
        (0..s.len()).map(|r| s[map[r] as usize]).collect()
    }

    fn wfa_targets(&self, s: &Vec<u32>) -> Result<Vec<u32>> {
        let best = s
            .iter()
            .zip(&self.inv)
            .map(|(&w, &d)| w + d)
            .min()
            .expect("nonempty table");
        Ok((0..s.len() as u32).filter(|&r| s[r as usize] + self.inv[r as usize] == best).collect())
    }

    fn store(&self, states: Vec<Vec<u32>>) -> StoredStates {
        StoredStates::Full(states)
    }
}

struct PairEngine {
    n: usize,
    model: CostModel,
}

impl WfEngine for PairEngine {
    type State = ModeMatrix;

    fn fresh(&self) -> ModeMatrix {
        ModeMatrix::fresh(self.n)
    }

    fn key(&self, s: &ModeMatrix) -> Vec<u8> {
        s.pack().to_le_bytes().to_vec()
    }

    fn request(&self, s: &ModeMatrix, r: usize) -> (ModeMatrix, u64) {
        let mut next = s.clone();
        let halves = next.request(r - 1, self.model);
        (next, halves)
    }

    fn relabel(&self, s: &ModeMatrix, target: u32) -> ModeMatrix {
        let mut next = s.clone();
        // Only needed for rearrangements the table already holds, and the
        // builder hands us ranks from that table.
        next.apply_move(&perm_of_rank(self.n, target));
        next
    }

    fn wfa_targets(&self, _s: &ModeMatrix) -> Result<Vec<u32>> {
        Err(Error::Unsupported(
            "the wfa-class restriction needs the full work function; pair modes fix work values only up to per-pair offsets".into(),
        ))
    }

    fn store(&self, states: Vec<ModeMatrix>) -> StoredStates {
        StoredStates::Pair(states)
    }
}

/// Unranks without a table borrow (the pair engine does not own one).
fn perm_of_rank(n: usize, rank: u32) -> Vec<u8> {
    let mut pool: Vec<u8> = (0..n as u8).collect();
    let mut rank = rank as usize;
    let mut fact: usize = (1..n).product();
    let mut out = Vec::with_capacity(n);
    for k in (1..=n).rev() {
        let idx = rank / fact;
        rank %= fact;
        out.push(pool.remove(idx));
        if k > 1 {
            fact /= k - 1;
        }
    }
    out
}

/// Largest `n` [`build_graph`] accepts per kind without an explicit opt-in
/// through [`build_graph_bounded`].
pub const FULL_WF_DEFAULT_MAX_N: usize = 4;
pub const PAIR_WF_DEFAULT_MAX_N: usize = 5;

/// Builds the reachable game graph for `n` items under the default size
/// bound for `kind` and the global state cap.
pub fn build_graph(
    n: usize,
    model: CostModel,
    kind: WfKind,
    restriction: Restriction,
) -> Result<GameGraph> {
    let max_n = match kind {
        WfKind::FullWf => FULL_WF_DEFAULT_MAX_N,
        WfKind::PairBasedWf => PAIR_WF_DEFAULT_MAX_N,
    };
    build_graph_bounded(n, model, kind, restriction, max_n, limits::state_cap())
}

/// [`build_graph`] with explicit size and state bounds for opt-in larger
/// runs. `state_cap` counts optimum and player vertices together.
pub fn build_graph_bounded(
    n: usize,
    model: CostModel,
    kind: WfKind,
    restriction: Restriction,
    max_n: usize,
    state_cap: usize,
) -> Result<GameGraph> {
    if n < 2 {
        return Err(Error::ConstraintViolation("the game needs at least two items".into()));
    }
    if n > max_n {
        return Err(Error::ConstraintViolation(format!(
            "{n} items exceeds the {} bound of {max_n}; raise the bound explicitly to opt in",
            kind.name()
        )));
    }
    if matches!((kind, restriction), (WfKind::PairBasedWf, Restriction::WfaClass)) {
        return Err(Error::Unsupported(
            "the wfa-class restriction needs the full work function; pair modes fix work values only up to per-pair offsets".into(),
        ));
    }
    let table = Arc::new(PermTable::new(n));
    match kind {
        WfKind::FullWf => {
            let engine = FullEngine::new(Arc::clone(&table), model);
            build_with(&engine, n, model, kind, restriction, table, state_cap)
        }
        WfKind::PairBasedWf => {
            let engine = PairEngine { n, model };
            build_with(&engine, n, model, kind, restriction, table, state_cap)
        }
    }
}

enum BuildItem {
    Opt(usize),
    Alg(usize),
}

fn build_with<E: WfEngine>(
    engine: &E,
    n: usize,
    model: CostModel,
    kind: WfKind,
    restriction: Restriction,
    table: Arc<PermTable>,
    state_cap: usize,
) -> Result<GameGraph> {
    let count = table.len() as u32;
    let inv: Vec<u64> = (0..count).map(|r| inversions(&table.perms[r as usize])).collect();

    let mut opt_states: Vec<E::State> = Vec::new();
    let mut alg_states: Vec<E::State> = Vec::new();
    let mut opt_ids: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut alg_ids: HashMap<(Vec<u8>, usize), usize> = HashMap::new();
    let mut opt_adj: Vec<Vec<OptEdge>> = Vec::new();
    let mut alg_adj: Vec<Vec<AlgEdge>> = Vec::new();
    let mut alg_request: Vec<usize> = Vec::new();
    let mut queue: VecDeque<BuildItem> = VecDeque::new();

    let fresh = engine.fresh();
    opt_ids.insert(engine.key(&fresh), 0);
    opt_states.push(fresh);
    opt_adj.push(Vec::new());
    queue.push_back(BuildItem::Opt(0));

    while let Some(item) = queue.pop_front() {
        match item {
            BuildItem::Opt(v) => {
                let s = opt_states[v].clone();
                let mut edges = Vec::with_capacity(n);
                for r in 1..=n {
                    let (s2, halves) = engine.request(&s, r);
                    let u = match alg_ids.entry((engine.key(&s2), r)) {
                        Entry::Occupied(e) => *e.get(),
                        Entry::Vacant(e) => {
                            let id = alg_states.len();
                            e.insert(id);
                            alg_states.push(s2);
                            alg_adj.push(Vec::new());
                            alg_request.push(r);
                            queue.push_back(BuildItem::Alg(id));
                            id
                        }
                    };
                    edges.push(OptEdge { request: r, cost_halves: halves, to: u });
                }
                opt_adj[v] = edges;
            }
            BuildItem::Alg(u) => {
                let s = alg_states[u].clone();
                let r = alg_request[u];
                let targets: Vec<u32> = match restriction {
                    Restriction::All => (0..count).collect(),
                    Restriction::WfaClass => engine.wfa_targets(&s)?,
                    Restriction::StayOrMtf => stay_or_mtf_targets(&table, r),
                    Restriction::Custom(f) => {
                        (0..count).filter(|&t| f(r, &table.perms[t as usize])).collect()
                    }
                };
                if targets.is_empty() {
                    return Err(Error::InvariantViolation(format!(
                        "restriction `{}` leaves request position {r} with no answer",
                        restriction.name()
                    )));
                }
                let mut edges = Vec::with_capacity(targets.len());
                for t in targets {
                    let s2 = engine.relabel(&s, t);
                    let v = match opt_ids.entry(engine.key(&s2)) {
                        Entry::Occupied(e) => *e.get(),
                        Entry::Vacant(e) => {
                            let id = opt_states.len();
                            e.insert(id);
                            opt_states.push(s2);
                            opt_adj.push(Vec::new());
                            queue.push_back(BuildItem::Opt(id));
                            id
                        }
                    };
                    let cost = 2 * (model.access(r) + inv[t as usize]);
                    edges.push(AlgEdge { target: t, cost_halves: cost, to: v });
                }
                alg_adj[u] = edges;
            }
        }
        let states = opt_states.len() + alg_states.len();
        if states > state_cap {
            return Err(Error::StateSpaceExceeded { states, cap: state_cap });
        }
    }

    Ok(GameGraph {
        n,
        model,
        kind,
        restriction_name: restriction.name(),
        table,
        opt_adj,
        alg_adj,
        alg_request,
        states: engine.store(opt_states),
    })
}

/// The identity plus the rearrangement fronting position `r` (they
/// coincide for `r = 1`).
fn stay_or_mtf_targets(table: &PermTable, r: usize) -> Vec<u32> {
    if r == 1 {
        return vec![0];
    }
    let n = table.n;
    let mut front: Vec<u8> = Vec::with_capacity(n);
    front.push((r - 1) as u8);
    front.extend((0..n as u8).filter(|&p| p != (r - 1) as u8));
    vec![0, table.rank_of(&front) as u32]
}

/// A vertex of either side, for witness reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameVertex {
    Opt(usize),
    Alg(usize),
}

impl fmt::Display for GameVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameVertex::Opt(v) => write!(f, "opt vertex {v}"),
            GameVertex::Alg(u) => write!(f, "player vertex {u}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PotentialStatus {
    /// Exact fixed point reached and audited.
    Verified,
    /// Growth passed the divergence cap (or the round budget ran out)
    /// at `iteration` with `max_ticks` on `witness`.
    Diverged { iteration: usize, max_ticks: i64, witness: GameVertex },
}

/// Potentials in ticks of `1/(2 * denom(rho))` per vertex side.
#[derive(Clone, Debug)]
pub struct PotentialAssignment {
    pub rho: Rat,
    pub status: PotentialStatus,
    /// Completed synchronous rounds.
    pub rounds: usize,
    pub opt_ticks: Vec<i64>,
    pub alg_ticks: Vec<i64>,
}

impl PotentialAssignment {
    pub fn is_verified(&self) -> bool {
        matches!(self.status, PotentialStatus::Verified)
    }

    /// Ticks per potential unit: `2 * denom(rho)`.
    pub fn tick_unit(&self) -> i64 {
        2 * *self.rho.denom()
    }

    pub fn opt_potential(&self, v: usize) -> Rat {
        rat(self.opt_ticks[v], self.tick_unit())
    }

    pub fn alg_potential(&self, u: usize) -> Rat {
        rat(self.alg_ticks[u], self.tick_unit())
    }

    /// Largest potential across both sides.
    pub fn max_potential(&self) -> Rat {
        let m = self
            .opt_ticks
            .iter()
            .chain(&self.alg_ticks)
            .copied()
            .max()
            .unwrap_or(0);
        rat(m, self.tick_unit())
    }
}

/// Round budget [`potential_iteration`] is usually called with.
pub const DEFAULT_MAX_ROUNDS: usize = 100_000;

/// Growth bound that declares divergence: past every fixed-point potential
/// seen in practice, yet small enough to abort runaway growth quickly.
pub fn default_divergence_cap(n: usize, rho: Rat) -> Rat {
    rat(10 * n as i64 * n as i64, 1) * rho
}

fn rho_parts(rho: Rat) -> Result<(i64, i64)> {
    if rho <= rat(1, 1) {
        return Err(Error::ConstraintViolation(format!(
            "potential arguments need rho > 1, got {rho}"
        )));
    }
    let (p, q) = (*rho.numer(), *rho.denom());
    if p > 1_000_000_000 || q > 1_000_000_000 {
        return Err(Error::ConstraintViolation(format!(
            "rho = {rho} is finer than the exact tick arithmetic supports"
        )));
    }
    Ok((p, q))
}

/// Kleene iteration for the potential inequalities, synchronous and exact.
///
/// Each round recomputes every player vertex as the minimum of
/// `rho-scaled answer cost + optimum potential` and every optimum vertex as
/// the maximum of `player potential - rho * request cost`, clamped at zero,
/// both from the previous round's values. Starting from all zeros the
/// sequence is pointwise nondecreasing, so it either stabilizes at the
/// least fixed point (`Verified`, re-audited exactly before returning) or
/// grows past the divergence cap (`Diverged`). `divergence_cap` of `None`
/// uses [`default_divergence_cap`].
pub fn potential_iteration(
    graph: &GameGraph,
    rho: Rat,
    max_rounds: usize,
    divergence_cap: Option<Rat>,
) -> Result<PotentialAssignment> {
    let (p, q) = rho_parts(rho)?;
    let cap_ticks: i64 = match divergence_cap {
        Some(cap) => {
            let ticks = (cap * rat(2 * q, 1)).ceil().to_integer();
            if ticks <= 0 {
                return Err(Error::ConstraintViolation("divergence cap must be positive".into()));
            }
            ticks
        }
        None => 20 * (graph.n * graph.n) as i64 * p,
    };

    let mut opt = vec![0i64; graph.opt_count()];
    let mut alg = vec![0i64; graph.alg_count()];
    for round in 1..=max_rounds {
        let new_alg: Vec<i64> = graph
            .alg_adj
            .iter()
            .map(|edges| {
                edges
                    .iter()
                    .map(|e| q * e.cost_halves as i64 + opt[e.to])
                    .min()
                    .expect("player vertices have answers")
            })
            .collect();
        let new_opt: Vec<i64> = graph
            .opt_adj
            .iter()
            .map(|edges| {
                edges
                    .iter()
                    .map(|e| alg[e.to] - p * e.cost_halves as i64)
                    .max()
                    .expect("optimum vertices have requests")
                    .max(0)
            })
            .collect();
        let fixed = new_alg == alg && new_opt == opt;
        alg = new_alg;
        opt = new_opt;
        if fixed {
            let pa = PotentialAssignment {
                rho,
                status: PotentialStatus::Verified,
                rounds: round,
                opt_ticks: opt,
                alg_ticks: alg,
            };
            audit_potentials(graph, &pa)?;
            return Ok(pa);
        }
        let (max_ticks, witness) = peak(&opt, &alg);
        if max_ticks > cap_ticks {
            return Ok(PotentialAssignment {
                rho,
                status: PotentialStatus::Diverged { iteration: round, max_ticks, witness },
                rounds: round,
                opt_ticks: opt,
                alg_ticks: alg,
            });
        }
    }
    let (max_ticks, witness) = peak(&opt, &alg);
    Ok(PotentialAssignment {
        rho,
        status: PotentialStatus::Diverged { iteration: max_rounds, max_ticks, witness },
        rounds: max_rounds,
        opt_ticks: opt,
        alg_ticks: alg,
    })
}

fn peak(opt: &[i64], alg: &[i64]) -> (i64, GameVertex) {
    let mut best = (i64::MIN, GameVertex::Opt(0));
    for (v, &t) in opt.iter().enumerate() {
        if t > best.0 {
            best = (t, GameVertex::Opt(v));
        }
    }
    for (u, &t) in alg.iter().enumerate() {
        if t > best.0 {
            best = (t, GameVertex::Alg(u));
        }
    }
    best
}

/// Re-checks a verified assignment in exact integer arithmetic: both
/// telescoping inequalities, nonnegativity, and zero potential on the
/// initial vertex. This pass, not the iteration, is the correctness
/// anchor; certificates loaded from disk go through the same checks.
pub fn audit_potentials(graph: &GameGraph, pa: &PotentialAssignment) -> Result<()> {
    if !pa.is_verified() {
        return Err(Error::Unsupported("audits apply to verified assignments".into()));
    }
    audit_ticks(graph, pa.rho, &pa.opt_ticks, &pa.alg_ticks)
}

fn audit_ticks(graph: &GameGraph, rho: Rat, opt: &[i64], alg: &[i64]) -> Result<()> {
    let (p, q) = rho_parts(rho)?;
    if opt.len() != graph.opt_count() || alg.len() != graph.alg_count() {
        return Err(Error::InvariantViolation(format!(
            "potential table sized {}x{} against a {}x{} graph",
            opt.len(),
            alg.len(),
            graph.opt_count(),
            graph.alg_count()
        )));
    }
    if let Some(t) = opt.iter().chain(alg).find(|&&t| t < 0) {
        return Err(Error::InvariantViolation(format!("negative potential {t} ticks")));
    }
    let init = graph.initial_vertex();
    if opt[init] != 0 {
        return Err(Error::InvariantViolation(format!(
            "initial vertex carries potential {} ticks, expected zero",
            opt[init]
        )));
    }
    for (v, edges) in graph.opt_adj.iter().enumerate() {
        for e in edges {
            if opt[v] + p * (e.cost_halves as i64) < alg[e.to] {
                return Err(Error::InvariantViolation(format!(
                    "request inequality fails at opt vertex {v}, position {}",
                    e.request
                )));
            }
        }
    }
    for (u, edges) in graph.alg_adj.iter().enumerate() {
        let best = edges
            .iter()
            .map(|e| q * e.cost_halves as i64 + opt[e.to])
            .min()
            .expect("player vertices have answers");
        if alg[u] < best {
            return Err(Error::InvariantViolation(format!(
                "answer inequality fails at player vertex {u}: potential {} below best reply {best}",
                alg[u]
            )));
        }
    }
    Ok(())
}

/// First answer edge per player vertex whose cost plus landing potential
/// stays within the vertex potential. Lexicographic rank order makes the
/// choice deterministic.
fn compute_policy(graph: &GameGraph, rho: Rat, opt: &[i64], alg: &[i64]) -> Result<Vec<u32>> {
    let (_, q) = rho_parts(rho)?;
    let mut policy = Vec::with_capacity(graph.alg_count());
    for (u, edges) in graph.alg_adj.iter().enumerate() {
        let tight = edges
            .iter()
            .position(|e| q * e.cost_halves as i64 + opt[e.to] <= alg[u]);
        match tight {
            Some(idx) => policy.push(idx as u32),
            None => return Err(Error::NoTightEdge { vertex: u }),
        }
    }
    Ok(policy)
}

/// The algorithm a verified potential proves to exist: from the current
/// vertex, route the request along its edge and answer with the stored
/// tight rearrangement. Its cost over any sequence telescopes to
/// `rho * (game optimum) + initial potential`, and the initial potential
/// is audited to be zero.
#[derive(Clone)]
pub struct ExtractedAlgorithm {
    graph: Arc<GameGraph>,
    policy: Arc<Vec<u32>>,
    list: ListState,
    vertex: usize,
}

impl ExtractedAlgorithm {
    pub fn vertex(&self) -> usize {
        self.vertex
    }

    pub fn policy(&self) -> &[u32] {
        &self.policy
    }
}

/// Turns a verified assignment into a runnable algorithm on `initial`.
pub fn extract_algorithm(
    graph: &Arc<GameGraph>,
    pa: &PotentialAssignment,
    initial: &ListState,
) -> Result<ExtractedAlgorithm> {
    if !pa.is_verified() {
        return Err(Error::Unsupported("extraction needs a verified assignment".into()));
    }
    if initial.len() != graph.n {
        return Err(Error::UniverseMismatch);
    }
    let policy = compute_policy(graph, pa.rho, &pa.opt_ticks, &pa.alg_ticks)?;
    Ok(ExtractedAlgorithm {
        graph: Arc::clone(graph),
        policy: Arc::new(policy),
        list: initial.clone(),
        vertex: graph.initial_vertex(),
    })
}

impl OnlineAlgorithm for ExtractedAlgorithm {
    fn name(&self) -> &'static str {
        "extracted"
    }

    fn list(&self) -> &ListState {
        &self.list
    }

    fn serve(&mut self, event: &Event, model: CostModel) -> Result<StepReport> {
        if model != self.graph.model {
            return Err(Error::Unsupported(format!(
                "policy was verified for the {} model",
                model_name(self.graph.model)
            )));
        }
        let Event::Access(item) = *event else {
            return Err(Error::Unsupported("extracted policies answer access requests only".into()));
        };
        let r = self
            .list
            .position(item)
            .ok_or_else(|| Error::UnknownItem(format!("{item:?}")))?;
        let oe = self.graph.opt_adj[self.vertex][r - 1];
        debug_assert_eq!(oe.request, r);
        let ae = self.graph.alg_adj[oe.to][self.policy[oe.to] as usize];
        let perm = self.graph.perm_of(ae.target);
        let order: Vec<Item> = perm.iter().map(|&o| self.list.items()[o as usize]).collect();
        let access = model.access(r);
        let swaps = ae.cost_halves / 2 - access;
        self.list = ListState::new(order)?;
        self.vertex = ae.to;
        Ok(StepReport::new(*event, access, swaps, self.list.clone()))
    }
}

impl CanonicalOnline for ExtractedAlgorithm {
    fn memory_encoding(&self) -> Vec<u8> {
        // The vertex is a canonical state by construction: the graph was
        // built relative to the current list at every step.
        (self.vertex as u64).to_le_bytes().to_vec()
    }
}

/// A request strategy all restricted players lose `rho` against.
#[derive(Clone, Debug)]
pub struct ClassCertificate {
    /// The certified bound: every cycle of `subgraph` has ratio at least
    /// this, so every player expressible in the restricted graph pays at
    /// least `rho * OPT - O(1)` against [`ClassCertificate::strategy`].
    pub rho: Rat,
    /// The ladder rung whose divergence suggested the strategy.
    pub probe_rho: Rat,
    /// Request edge index per optimum vertex.
    pub strategy: Vec<usize>,
    /// Reachable play under the strategy: nodes are optimum vertices, one
    /// edge per answer, costs are the combined request-answer step.
    pub subgraph: RatioGraph,
    /// Subgraph node index to optimum vertex id.
    pub vertex_of: Vec<usize>,
    /// Exact minimum cycle ratio of the subgraph; `None` when every cycle
    /// is free for the optimum (the bound is then unbounded).
    pub min_ratio: Option<Rat>,
}

#[derive(Clone, Debug)]
pub enum ClassBoundOutcome {
    Certified(ClassCertificate),
    Inconclusive { reason: String },
}

const PROBE_LADDER: [(i64, i64); 4] = [(1, 8), (1, 64), (1, 512), (1, 4096)];

/// Tries to certify that every player inside the graph's restriction pays
/// ratio at least `rho`.
///
/// Each ladder rung runs the potential iteration slightly below `rho`. A
/// verification there refutes the claim outright (the fixed point is a
/// better player inside the restriction). A divergence suggests a request
/// strategy: per optimum vertex, the request whose player successor grew
/// the most, with growing potentials re-read as unrealized adversary gain.
/// The strategy is then checked exactly on its reachable subgraph: no
/// null cycle (a stall where the play stops paying anyone) and no cycle
/// with ratio below `rho`. Any walk then decomposes into such cycles plus
/// a bounded remainder, so every answering policy pays at least
/// `rho * OPT - O(1)`, with OPT unbounded or the player's cost pumped for
/// free. The exact cycle check alone carries the claim; the iteration and
/// the stall-repair loop only propose candidates.
pub fn class_lower_bound(graph: &GameGraph, rho: Rat) -> Result<ClassBoundOutcome> {
    rho_parts(rho)?;
    for (en, ed) in PROBE_LADDER {
        let probe = rho - rat(en, ed);
        if probe <= rat(1, 1) {
            continue;
        }
        let pa = potential_iteration(graph, probe, DEFAULT_MAX_ROUNDS, None)?;
        if pa.is_verified() {
            return Ok(ClassBoundOutcome::Inconclusive {
                reason: format!(
                    "a policy inside the restriction verifies at {probe}, refuting {rho} as a class bound"
                ),
            });
        }
        let order = preference_order(graph, &pa);
        if let Some((strategy, subgraph, vertex_of)) = certified_strategy(graph, &order, rho) {
            let min_ratio = match min_cycle_ratio(&subgraph) {
                RatioOutcome::Finite { ratio, .. } => Some(ratio),
                RatioOutcome::Infinite { .. } => None,
                RatioOutcome::NoCycle => {
                    return Err(Error::InvariantViolation(
                        "strategy subgraph has no cycle despite total out-degrees".into(),
                    ))
                }
            };
            return Ok(ClassBoundOutcome::Certified(ClassCertificate {
                rho,
                probe_rho: probe,
                strategy,
                subgraph,
                vertex_of,
                min_ratio,
            }));
        }
    }
    Ok(ClassBoundOutcome::Inconclusive {
        reason: "no divergence probe produced a request strategy whose cycles all clear the target".into(),
    })
}

/// Request edges of each optimum vertex sorted adversary-best-first:
/// by unrealized gain (successor growth minus scaled request cost), then
/// by request cost, then by position. The cost tiebreak prefers requests
/// that charge the optimum, avoiding free self-loops that stall the play
/// when the gain is indifferent.
fn preference_order(graph: &GameGraph, pa: &PotentialAssignment) -> Vec<Vec<usize>> {
    let p = *pa.rho.numer();
    graph
        .opt_adj
        .iter()
        .map(|edges| {
            let mut idx: Vec<usize> = (0..edges.len()).collect();
            idx.sort_by_key(|&i| {
                let e = &edges[i];
                let gain = pa.alg_ticks[e.to] - p * e.cost_halves as i64;
                (-gain, -(e.cost_halves as i64), i)
            });
            idx
        })
        .collect()
}

/// Builds the reachable combined-step graph of a strategy: one node per
/// optimum vertex, one edge per answer to the strategy's request, costing
/// the answer (real units) against the request (halves).
fn strategy_subgraph(graph: &GameGraph, strategy: &[usize]) -> (RatioGraph, Vec<usize>) {
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut vertex_of: Vec<usize> = Vec::new();
    let mut sub = RatioGraph::new(0);
    let mut queue = VecDeque::new();
    let initial = graph.initial_vertex();
    ids.insert(initial, sub.add_node());
    vertex_of.push(initial);
    queue.push_back(initial);
    while let Some(v) = queue.pop_front() {
        let from = ids[&v];
        let oe = graph.opt_adj[v][strategy[v]];
        for ae in &graph.alg_adj[oe.to] {
            let to = match ids.entry(ae.to) {
                Entry::Occupied(e) => *e.get(),
                Entry::Vacant(e) => {
                    let id = sub.add_node();
                    e.insert(id);
                    vertex_of.push(ae.to);
                    queue.push_back(ae.to);
                    id
                }
            };
            sub.add_edge(from, to, ae.cost_halves / 2, oe.cost_halves);
        }
    }
    (sub, vertex_of)
}

/// Walks candidate strategies in preference order until one passes the
/// exact cycle checks. Stalls (null cycles) advance the first stalled
/// vertex to its next-preferred request and retry; a cycle genuinely below
/// `rho` fails the rung. The advance budget is the total edge count, so
/// the loop terminates.
fn certified_strategy(
    graph: &GameGraph,
    order: &[Vec<usize>],
    rho: Rat,
) -> Option<(Vec<usize>, RatioGraph, Vec<usize>)> {
    let mut choice = vec![0usize; graph.opt_count()];
    let budget: usize = order.iter().map(Vec::len).sum::<usize>() + 1;
    for _ in 0..budget {
        let strategy: Vec<usize> = choice.iter().zip(order).map(|(&c, o)| o[c]).collect();
        let (sub, vertex_of) = strategy_subgraph(graph, &strategy);
        if let Some(stall) = null_cycle(&sub) {
            let mut advanced = false;
            for &eid in &stall {
                let v = vertex_of[sub.edge(eid).from];
                if choice[v] + 1 < order[v].len() {
                    choice[v] += 1;
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                return None;
            }
            continue;
        }
        if cycle_below(&sub, rho).is_some() {
            return None;
        }
        return Some((strategy, sub, vertex_of));
    }
    None
}

pub fn model_name(model: CostModel) -> &'static str {
    match model {
        CostModel::Full => "full",
        CostModel::Partial => "partial",
    }
}

/// On-disk form of a verified potential: enough to re-audit against a
/// rebuilt graph without re-running the iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub n: usize,
    pub model: String,
    pub kind: String,
    pub restriction: String,
    pub rho_numer: i64,
    pub rho_denom: i64,
    /// Digest of the deterministic edge serialization; a rebuilt graph
    /// must reproduce it before the ticks mean anything.
    pub graph_hash: String,
    pub opt_vertices: usize,
    pub alg_vertices: usize,
    pub opt_ticks: Vec<i64>,
    pub alg_ticks: Vec<i64>,
    /// Tight answer edge index per player vertex.
    pub policy: Vec<u32>,
}

/// Digest over the graph's full edge structure and metadata. Vertex ids
/// are deterministic discovery order, so equal builds hash equally.
pub fn graph_hash(graph: &GameGraph) -> String {
    let mut h = Sha256::new();
    h.update(b"listup-game-graph-v1");
    h.update((graph.n as u64).to_le_bytes());
    h.update(model_name(graph.model).as_bytes());
    h.update(graph.kind.name().as_bytes());
    h.update(graph.restriction_name.as_bytes());
    h.update((graph.opt_count() as u64).to_le_bytes());
    h.update((graph.alg_count() as u64).to_le_bytes());
    for edges in &graph.opt_adj {
        h.update((edges.len() as u64).to_le_bytes());
        for e in edges {
            h.update((e.request as u64).to_le_bytes());
            h.update(e.cost_halves.to_le_bytes());
            h.update((e.to as u64).to_le_bytes());
        }
    }
    for (u, edges) in graph.alg_adj.iter().enumerate() {
        h.update((graph.alg_request[u] as u64).to_le_bytes());
        h.update((edges.len() as u64).to_le_bytes());
        for e in edges {
            h.update((e.target as u64).to_le_bytes());
            h.update(e.cost_halves.to_le_bytes());
            h.update((e.to as u64).to_le_bytes());
        }
    }
    let digest = h.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn make_certificate(graph: &GameGraph, pa: &PotentialAssignment) -> Result<Certificate> {
    if !pa.is_verified() {
        return Err(Error::Unsupported("certificates require a verified assignment".into()));
    }
    let policy = compute_policy(graph, pa.rho, &pa.opt_ticks, &pa.alg_ticks)?;
    Ok(Certificate {
        version: 1,
        n: graph.n,
        model: model_name(graph.model).into(),
        kind: graph.kind.name().into(),
        restriction: graph.restriction_name.into(),
        rho_numer: *pa.rho.numer(),
        rho_denom: *pa.rho.denom(),
        graph_hash: graph_hash(graph),
        opt_vertices: graph.opt_count(),
        alg_vertices: graph.alg_count(),
        opt_ticks: pa.opt_ticks.clone(),
        alg_ticks: pa.alg_ticks.clone(),
        policy,
    })
}

/// Full audit of a loaded certificate against a rebuilt graph: metadata,
/// graph digest, both potential inequalities, and policy tightness. This
/// is the fast path for re-checking a stored result without iterating.
pub fn check_certificate(graph: &GameGraph, cert: &Certificate) -> Result<()> {
    if cert.version != 1 {
        return Err(Error::Unsupported(format!("unknown certificate version {}", cert.version)));
    }
    if cert.n != graph.n
        || cert.model != model_name(graph.model)
        || cert.kind != graph.kind.name()
        || cert.restriction != graph.restriction_name
    {
        return Err(Error::InvariantViolation(
            "certificate metadata does not match the graph".into(),
        ));
    }
    if cert.opt_vertices != graph.opt_count() || cert.alg_vertices != graph.alg_count() {
        return Err(Error::InvariantViolation(
            "certificate vertex counts do not match the graph".into(),
        ));
    }
    if cert.graph_hash != graph_hash(graph) {
        return Err(Error::InvariantViolation(
            "certificate graph digest does not match the rebuilt graph".into(),
        ));
    }
    if cert.rho_denom == 0 {
        return Err(Error::ConstraintViolation("certificate rho has a zero denominator".into()));
    }
    let rho = rat(cert.rho_numer, cert.rho_denom);
    let (_, q) = rho_parts(rho)?;
    audit_ticks(graph, rho, &cert.opt_ticks, &cert.alg_ticks)?;
    if cert.policy.len() != graph.alg_count() {
        return Err(Error::InvariantViolation("policy table length mismatch".into()));
    }
    for (u, &idx) in cert.policy.iter().enumerate() {
        let edges = &graph.alg_adj[u];
        let Some(e) = edges.get(idx as usize) else {
            return Err(Error::InvariantViolation(format!(
                "policy at player vertex {u} references answer {idx} of {}",
                edges.len()
            )));
        };
        if q * e.cost_halves as i64 + cert.opt_ticks[e.to] > cert.alg_ticks[u] {
            return Err(Error::NoTightEdge { vertex: u });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary;
    use crate::fullwf::{opt_exact, FullWorkFunction};
    use crate::harness::run_algorithm;
    use crate::list::swap_distance;
    use crate::sequence::{random_access_sequence, standard_universe, RequestSequence};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn full_graph(n: usize, restriction: Restriction) -> GameGraph {
        build_graph(n, CostModel::Partial, WfKind::FullWf, restriction).unwrap()
    }

    /// Adjacency shape of a graph with optimum edge costs optionally
    /// blanked. The two work-function kinds price requests differently
    /// step by step (minimum growth versus projected average growth), so
    /// structural comparisons must mask them.
    fn fingerprint(graph: &GameGraph, mask_opt_costs: bool) -> Vec<u64> {
        let mut out = Vec::new();
        for v in 0..graph.opt_count() {
            out.push(u64::MAX);
            for e in graph.opt_edges(v) {
                out.push(e.request as u64);
                out.push(if mask_opt_costs { 0 } else { e.cost_halves });
                out.push(e.to as u64);
            }
        }
        for u in 0..graph.alg_count() {
            out.push(u64::MAX - 1);
            out.push(graph.alg_request(u) as u64);
            for e in graph.alg_edges(u) {
                out.push(e.target as u64);
                out.push(e.cost_halves);
                out.push(e.to as u64);
            }
        }
        out
    }

    #[test]
    fn two_item_graph_matches_the_hand_enumeration() {
        // Offsets over the two orders can only be (0,1), (0,0), (1,0);
        // all three appear, and the four reachable (state, request) pairs
        // are (0,1)+r1, (0,0)+r2, (0,0)+r1, (1,0)+r2. Each side then has
        // two edges per vertex.
        let g = full_graph(2, Restriction::All);
        assert_eq!(g.opt_count(), 3);
        assert_eq!(g.alg_count(), 4);
        assert_eq!(g.opt_edge_total(), 6);
        assert_eq!(g.alg_edge_total(), 8);
        assert_eq!(g.initial_vertex(), 0);
        assert_eq!(g.opt_state_full(0).unwrap(), &[0, 1]);
    }

    #[test]
    fn two_item_kinds_share_their_shape_but_not_their_prices() {
        let full = full_graph(2, Restriction::All);
        let pair = build_graph(2, CostModel::Partial, WfKind::PairBasedWf, Restriction::All).unwrap();
        assert_eq!(fingerprint(&full, true), fingerprint(&pair, true));
        // The per-step optimum prices genuinely differ: a fronted pair
        // charges the average a half where the minimum stays flat.
        assert_ne!(fingerprint(&full, false), fingerprint(&pair, false));
    }

    #[test]
    fn size_guards_reject_out_of_range_builds() {
        let err = build_graph(5, CostModel::Partial, WfKind::FullWf, Restriction::All).unwrap_err();
        assert!(matches!(err, Error::ConstraintViolation(_)));
        let err = build_graph(1, CostModel::Partial, WfKind::FullWf, Restriction::All).unwrap_err();
        assert!(matches!(err, Error::ConstraintViolation(_)));
        let err = build_graph_bounded(
            3,
            CostModel::Partial,
            WfKind::FullWf,
            Restriction::All,
            4,
            10,
        )
        .unwrap_err();
        assert!(matches!(err, Error::StateSpaceExceeded { .. }));
    }

    #[test]
    fn wfa_restriction_needs_the_full_kind() {
        let err =
            build_graph(3, CostModel::Partial, WfKind::PairBasedWf, Restriction::WfaClass).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn stay_or_mtf_edges_have_the_right_shape() {
        let g = full_graph(3, Restriction::StayOrMtf);
        for u in 0..g.alg_count() {
            let edges = g.alg_edges(u);
            let r = g.alg_request(u);
            if r == 1 {
                assert_eq!(edges.len(), 1);
                assert_eq!(edges[0].target, 0);
            } else {
                assert_eq!(edges.len(), 2);
                assert_eq!(edges[0].target, 0);
                let front = g.perm_of(edges[1].target);
                assert_eq!(front[0] as usize, r - 1);
                assert_eq!(edges[1].cost_halves, 2 * ((r as u64 - 1) + (r as u64 - 1)));
            }
        }
    }

    #[test]
    fn two_item_iteration_pins_the_exact_value() {
        let g = full_graph(2, Restriction::All);
        // Hand iteration of the three-state game: the least fixed point at
        // rho = 3 puts two potential units on both non-initial states.
        let pa = potential_iteration(&g, rat(3, 1), DEFAULT_MAX_ROUNDS, None).unwrap();
        assert!(pa.is_verified());
        assert_eq!(pa.opt_ticks, vec![0, 4, 4]);
        assert_eq!(pa.alg_ticks, vec![0, 6, 4, 4]);
        assert_eq!(pa.opt_potential(1), rat(2, 1));
        // Just below three the same game pumps its worst cycle forever.
        let pa = potential_iteration(&g, rat(299, 100), DEFAULT_MAX_ROUNDS, None).unwrap();
        assert!(matches!(pa.status, PotentialStatus::Diverged { .. }));
    }

    #[test]
    fn divergence_reports_where_the_growth_happened() {
        let g = full_graph(2, Restriction::All);
        let pa = potential_iteration(&g, rat(101, 100), DEFAULT_MAX_ROUNDS, None).unwrap();
        let PotentialStatus::Diverged { iteration, max_ticks, .. } = pa.status else {
            panic!("expected divergence at 1.01");
        };
        assert!(iteration > 0);
        assert!(max_ticks > 0);
        assert!(pa.max_potential() > rat(0, 1));
    }

    #[test]
    fn three_items_verify_at_three_for_both_kinds() {
        for kind in [WfKind::FullWf, WfKind::PairBasedWf] {
            let g = build_graph(3, CostModel::Partial, kind, Restriction::All).unwrap();
            let pa = potential_iteration(&g, rat(3, 1), DEFAULT_MAX_ROUNDS, None).unwrap();
            assert!(pa.is_verified(), "kind {:?} failed to verify at 3", kind);
            audit_potentials(&g, &pa).unwrap();
            assert_eq!(pa.opt_ticks[g.initial_vertex()], 0);
            // Monotonicity: a ratio that verifies keeps verifying above.
            let above = potential_iteration(&g, rat(7, 2), DEFAULT_MAX_ROUNDS, None).unwrap();
            assert!(above.is_verified());
        }
    }

    #[test]
    fn extracted_policy_stays_within_three_times_the_optimum() {
        let g = Arc::new(full_graph(3, Restriction::All));
        let pa = potential_iteration(&g, rat(3, 1), DEFAULT_MAX_ROUNDS, None).unwrap();
        let (_, initial) = standard_universe(3);
        let template = extract_algorithm(&g, &pa, &initial).unwrap();
        for seed in 0..50u64 {
            let seq = random_access_sequence(3, 150, seed, None);
            let mut alg = template.clone();
            let outcome = run_algorithm(&mut alg, &seq, CostModel::Partial, false).unwrap();
            let opt = opt_exact(&seq, CostModel::Partial).unwrap();
            // The initial potential is zero, so the telescope is clean.
            assert!(
                outcome.total_cost <= 3 * opt,
                "seed {seed}: {} > 3 * {opt}",
                outcome.total_cost
            );
            assert!(outcome.total_cost >= opt);
        }
    }

    #[test]
    fn extracted_two_item_worst_cycle_is_exactly_three() {
        let g = Arc::new(full_graph(2, Restriction::All));
        let pa = potential_iteration(&g, rat(3, 1), DEFAULT_MAX_ROUNDS, None).unwrap();
        let (_, initial) = standard_universe(2);
        let alg = extract_algorithm(&g, &pa, &initial).unwrap();
        let (outcome, _) = adversary::max_ratio_cycle(&alg, 10_000).unwrap();
        match outcome {
            RatioOutcome::Finite { ratio, .. } => assert_eq!(ratio, rat(3, 1)),
            other => panic!("expected a finite worst cycle, got {other:?}"),
        }
    }

    #[test]
    fn replayed_edges_price_like_the_real_work_function() {
        // Decanonicalization: walk the graph with random requests and
        // answers while simulating honestly on labeled items. Edge costs
        // and the landing states must reproduce the real work function
        // relabeled to the real list at every step.
        let g = full_graph(3, Restriction::All);
        let (_, initial) = standard_universe(3);
        let mut wf = FullWorkFunction::new(&initial).unwrap();
        let mut list = initial.clone();
        let mut vertex = g.initial_vertex();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let r = rng.gen_range(1..=3);
            let item = list.at(r).unwrap();
            let growth = wf.update(item, CostModel::Partial).unwrap();
            let oe = g.opt_edges(vertex)[r - 1];
            assert_eq!(oe.request, r);
            assert_eq!(oe.cost_halves, 2 * growth);
            let edges = g.alg_edges(oe.to);
            let ae = edges[rng.gen_range(0..edges.len())];
            let perm = g.perm_of(ae.target);
            let order: Vec<Item> = perm.iter().map(|&o| list.items()[o as usize]).collect();
            let next = ListState::new(order).unwrap();
            let swaps = swap_distance(&list, &next).unwrap();
            assert_eq!(ae.cost_halves, 2 * (CostModel::Partial.access(r) + swaps));
            list = next;
            vertex = ae.to;
            let offsets = g.opt_state_full(vertex).unwrap();
            for rank in 0..6usize {
                let shape = g.perm_of(rank as u32);
                let real: Vec<Item> = shape.iter().map(|&l| list.items()[l as usize]).collect();
                let value = wf.value(&ListState::new(real).unwrap()).unwrap();
                assert_eq!(offsets[rank] as u64, value - wf.min_value());
            }
        }
    }

    #[test]
    fn class_bound_certifies_the_two_item_game() {
        let g = full_graph(2, Restriction::All);
        let outcome = class_lower_bound(&g, rat(3, 1)).unwrap();
        let ClassBoundOutcome::Certified(cert) = outcome else {
            panic!("two items force ratio three, expected a certificate");
        };
        assert_eq!(cert.min_ratio, Some(rat(3, 1)));
        assert!(cert.probe_rho < rat(3, 1));
        assert!(cert.subgraph.edge_count() > 0);
        assert_eq!(cert.strategy.len(), g.opt_count());
    }

    #[test]
    fn stay_or_mtf_on_three_items_certifies_thirteen_quarters() {
        let g = full_graph(3, Restriction::StayOrMtf);
        let outcome = class_lower_bound(&g, rat(13, 4)).unwrap();
        let ClassBoundOutcome::Certified(cert) = outcome else {
            panic!("stay-or-mtf on three items loses 13/4, expected a certificate");
        };
        assert!(cert.min_ratio.unwrap() >= rat(13, 4));
    }

    #[test]
    fn wfa_class_on_three_items_is_inconclusive_just_above_three() {
        // The class contains a three-competitive policy on three items, so
        // every strategy subgraph has a ratio-three cycle and nothing can
        // clear a strictly larger target.
        let g = full_graph(3, Restriction::WfaClass);
        let outcome = class_lower_bound(&g, rat(301, 100)).unwrap();
        assert!(matches!(outcome, ClassBoundOutcome::Inconclusive { .. }));
    }

    #[test]
    #[ignore = "five-item search; needs LISTUP_MAX_STATES=20000000 and >6 GB of memory"]
    fn wfa_class_on_five_items_certifies_three_point_one() {
        let g = build_graph_bounded(
            5,
            CostModel::Partial,
            WfKind::FullWf,
            Restriction::WfaClass,
            5,
            limits::state_cap(),
        )
        .unwrap();
        let outcome = class_lower_bound(&g, rat(31, 10)).unwrap();
        let ClassBoundOutcome::Certified(cert) = outcome else {
            panic!("wfa minimizers on five items lose 3.1, expected a certificate");
        };
        assert!(cert.min_ratio.unwrap() >= rat(31, 10));
    }

    #[test]
    fn certificates_roundtrip_and_resist_tampering() {
        let g = full_graph(3, Restriction::All);
        let pa = potential_iteration(&g, rat(3, 1), DEFAULT_MAX_ROUNDS, None).unwrap();
        let cert = make_certificate(&g, &pa).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back: Certificate = serde_json::from_str(&json).unwrap();
        check_certificate(&g, &back).unwrap();

        let mut bad = cert.clone();
        bad.graph_hash = format!("{:0>64}", "0");
        assert!(check_certificate(&g, &bad).is_err());

        let mut bad = cert.clone();
        bad.rho_numer = 2;
        assert!(check_certificate(&g, &bad).is_err());

        // A rebuilt graph with different edges must reject the stored
        // digest outright.
        let other = full_graph(3, Restriction::StayOrMtf);
        assert!(check_certificate(&other, &cert).is_err());
    }

    #[test]
    fn extraction_replays_as_a_valid_permutation_action() {
        // Every serve must keep the list a permutation of the universe and
        // report costs consistent with the physical rearrangement.
        let g = Arc::new(full_graph(3, Restriction::All));
        let pa = potential_iteration(&g, rat(3, 1), DEFAULT_MAX_ROUNDS, None).unwrap();
        let (universe, initial) = standard_universe(3);
        let mut alg = extract_algorithm(&g, &pa, &initial).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut events = Vec::new();
        for _ in 0..120 {
            events.push(Event::Access(initial.items()[rng.gen_range(0..3)]));
        }
        let seq = RequestSequence::new(universe, initial.clone(), events).unwrap();
        let mut prev = initial.clone();
        for ev in seq.events() {
            let report = alg.serve(ev, CostModel::Partial).unwrap();
            let mut sorted: Vec<Item> = report.list_after.items().to_vec();
            sorted.sort_by_key(|it| it.index());
            assert_eq!(sorted, initial.items().to_vec());
            let moved = swap_distance(&prev, &report.list_after).unwrap();
            assert_eq!(report.swap_count, moved);
            let pos = prev.position(ev.item()).unwrap();
            assert_eq!(report.access_cost, CostModel::Partial.access(pos));
            prev = report.list_after.clone();
        }
    }
}
