//! Laboratory for the list update problem with paid unit swaps.
//!
//! Every exchange of two neighbouring items costs 1 and accessing position
//! `l` costs `l` (full model) or `l - 1` (partial model). This crate packages
//! the machinery needed to study deterministic online algorithms in that
//! regime end to end:
//!
//! * list/cost primitives and a shared run harness ([`list`], [`sequence`],
//!   [`harness`]),
//! * pair and full work functions with exact optimum oracles ([`pairwf`],
//!   [`fullwf`]),
//! * the target-based move engine with its amortized per-step accounting
//!   ([`fpm`]),
//! * classic baselines ([`baselines`]),
//! * adversarial sequence generators and a best-cycle ratio search over
//!   product graphs ([`adversary`], [`cycles`]),
//! * a game-graph verifier that proves or refutes competitive ratios for
//!   small list lengths and extracts certified algorithms ([`verifier`]).

pub mod adversary;
pub mod baselines;
pub mod cycles;
pub mod error;
pub mod fpm;
pub mod fullwf;
pub mod harness;
pub mod limits;
pub mod list;
pub mod numeric;
pub mod pairwf;
pub mod perm;
pub mod sequence;
pub mod verifier;

pub use adversary::{
    build_product_graph, gen_dbit_full, gen_dbit_partial, gen_fpm_lb, gen_halfmove,
    max_ratio_cycle, run_offline, CycleSummary, LowerBoundReport, OfflineSchedule, ProductGraph,
};
pub use baselines::{stay_or_mtf_move, Dbit, HalfMove, Mtf, StaticList, Wfa};
pub use cycles::{
    cycle_below, cycle_cost, max_cycle_ratio, min_cycle_ratio, null_cycle, verify_cycle,
    RatioEdge, RatioGraph, RatioOutcome,
};
pub use error::{Error, Result};
pub use fpm::{
    transition_rows, CountVector, Flavor, Fpm, FpmStepReport, GainVectors, MoveKind, PairClass,
    PotentialParams, TransitionRow,
};
pub use harness::{run_algorithm, CanonicalOnline, OnlineAlgorithm, RunOutcome, StepReport};
pub use list::{access_cost, move_item, swap_distance, CostModel, Item, ListState};
pub use numeric::{Q17, Rat};
pub use pairwf::{classify_mode, pair_based_opt, Mode, PairTracker, PairWorkFunction};
pub use sequence::{parse_sequence, serialize_sequence, Event, RequestSequence, Universe};
pub use verifier::{
    audit_potentials, build_graph, build_graph_bounded, check_certificate, class_lower_bound,
    extract_algorithm, graph_hash, make_certificate, model_name, potential_iteration, AlgEdge,
    Certificate, ClassBoundOutcome, ClassCertificate, ExtractedAlgorithm, GameGraph, GameVertex,
    OptEdge, PotentialAssignment, PotentialStatus, Restriction, WfKind, DEFAULT_MAX_ROUNDS,
};
