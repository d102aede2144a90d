//! `check`: the engine's constant tables, parameter inequalities, the gain
//! identity, and a transition audit run.

use std::process::ExitCode;

use clap::{Args, ValueEnum};
use listup_core::fpm::{transition_rows, OTHER, PRED, SUCC};
use listup_core::numeric::rat;
use listup_core::sequence::{random_dynamic_sequence, DynamicOptions, Event};
use listup_core::{
    Fpm, GainVectors, Item, ListState, MoveKind, OnlineAlgorithm, PairClass, PotentialParams, Q17,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckWhat {
    /// Replay workloads and compare every pair transition to the table.
    Tables,
    /// The inequalities the potential weights must satisfy.
    Params,
    /// The closed-form identity tying the gain vectors to the ratio.
    GainIdentity,
    /// Serve a long mixed workload; the engine audits every step.
    Transitions,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub what: CheckWhat,
    /// Events in the audited random workload.
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
    /// Items in the random workload's initial list.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

pub fn run(args: &CheckArgs) -> Result<ExitCode, String> {
    let pass = match args.what {
        CheckWhat::Params => check_params(),
        CheckWhat::GainIdentity => check_gain_identity(),
        CheckWhat::Transitions => check_transitions(args),
        CheckWhat::Tables => check_tables(args),
    };
    let name = match args.what {
        CheckWhat::Params => "params",
        CheckWhat::GainIdentity => "gain-identity",
        CheckWhat::Transitions => "transitions",
        CheckWhat::Tables => "tables",
    };
    println!("check {name}: {}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn line(ok: &mut bool, pass: bool, what: &str) {
    *ok &= pass;
    println!("[{}] {what}", if pass { "pass" } else { "FAIL" });
}

fn check_params() -> bool {
    let p = PotentialParams::default();
    let mut ok = true;
    let half_ratio = p.ratio * Q17::rational(rat(1, 2));

    line(&mut ok, p.validate().is_ok(), "full parameter validation");
    line(&mut ok, p.alpha_disjoint.is_zero(), "alpha_disjoint = 0");
    for (name, v) in [
        ("beta_disjoint", p.beta_disjoint),
        ("alpha_overlap_equal", p.alpha_overlap_equal),
        ("beta_overlap", p.beta_overlap),
        ("beta_nested_equal", p.beta_nested_equal),
        ("gamma_nested_equal", p.gamma_nested_equal),
    ] {
        line(&mut ok, v.signum() >= 0, &format!("{name} >= 0  ({v})"));
    }
    let slack = p.beta_nested_equal + half_ratio - p.alpha_overlap_equal;
    line(
        &mut ok,
        slack.signum() >= 0,
        "alpha_overlap_equal <= beta_nested_equal + ratio/2",
    );
    line(
        &mut ok,
        slack.is_zero(),
        "alpha_overlap_equal = beta_nested_equal + ratio/2 holds with equality",
    );
    line(&mut ok, p.beta_nested_equal <= p.beta_overlap, "beta_nested_equal <= beta_overlap");
    let cap = p.gamma_nested_equal + half_ratio;
    line(
        &mut ok,
        p.beta_disjoint.max(p.beta_overlap) <= cap,
        "max(beta_disjoint, beta_overlap) <= gamma_nested_equal + ratio/2",
    );
    line(
        &mut ok,
        p.mix.signum() >= 0 && (Q17::from_int(1) - p.mix).signum() >= 0,
        &format!("mix within [0, 1]  ({})", p.mix),
    );
    line(&mut ok, (p.ratio - Q17::from_int(1)).signum() > 0, &format!("ratio > 1  ({})", p.ratio));
    ok
}

fn check_gain_identity() -> bool {
    let params = PotentialParams::default();
    let gains = match GainVectors::from_params(&params) {
        Ok(g) => g,
        Err(e) => {
            println!("[FAIL] gain vectors: {e}");
            return false;
        }
    };
    let comb = gains.mixed(params.mix);
    let sixteen = Q17::from_int(16);
    let target = Q17::new(rat(23, 1), rat(1, 1));
    let mut ok = true;
    let mut worst = 0f64;
    for (i, &g) in comb.iter().enumerate() {
        let lhs = g * sixteen;
        let rhs = if i < 5 { target } else { Q17::ZERO };
        worst = worst.max((lhs - rhs).to_f64().abs());
        line(
            &mut ok,
            lhs == rhs,
            &format!("16 * mixed[{i}] = {} exactly", if i < 5 { "23 + sqrt17" } else { "0" }),
        );
    }
    println!("largest residual {worst:.3e} (tolerance 1e-12)");
    ok &= worst <= 1e-12;

    // The same identity framed against the optimum's gains.
    let mut exact = true;
    for i in 0..6 {
        exact &= comb[i] == params.ratio * gains.opt[i];
    }
    line(&mut ok, exact, "mixed gains = ratio * optimum gains, coordinatewise");
    ok
}

fn check_transitions(args: &CheckArgs) -> bool {
    if args.n < 1 {
        println!("[FAIL] --n must be at least 1");
        return false;
    }
    let seq = random_dynamic_sequence(args.n, args.steps, args.seed, dynamic_band(args.n));
    let mut fpm = Fpm::new(seq.initial());
    let (mut accesses, mut inserts, mut deletes) = (0u64, 0u64, 0u64);
    for (i, ev) in seq.events().iter().enumerate() {
        match ev {
            Event::Access(_) => accesses += 1,
            Event::Insert(_) => inserts += 1,
            Event::Delete(_) => deletes += 1,
        }
        // Every step re-checks the transition tables, the candidate price
        // decomposition and the amortized inequalities; any breach is an
        // error here.
        if let Err(e) = fpm.step(ev) {
            println!("[FAIL] violation at step {}: {e}", i + 1);
            return false;
        }
    }
    let mut ok = true;
    line(
        &mut ok,
        true,
        &format!(
            "served {} events ({accesses} accesses, {inserts} inserts, {deletes} deletes): 0 violations",
            seq.len()
        ),
    );
    ok
}

fn dynamic_band(n: usize) -> DynamicOptions {
    DynamicOptions {
        min_len: 2.min(n),
        max_len: n.max(DynamicOptions::default().max_len),
        ..DynamicOptions::default()
    }
}

const KIND_NAMES: [&str; 2] = ["to-target", "to-front"];
const PART_NAMES: [&str; 3] = ["pred", "succ", "other"];

fn kind_ix(kind: MoveKind) -> usize {
    match kind {
        MoveKind::ToTarget => 0,
        MoveKind::ToFront => 1,
    }
}

fn class_name(c: PairClass) -> &'static str {
    match c {
        PairClass::AlphaDisjoint => "alpha-disjoint",
        PairClass::BetaDisjoint => "beta-disjoint",
        PairClass::AlphaOverlapEqual => "alpha-overlap-equal",
        PairClass::BetaOverlap => "beta-overlap",
        PairClass::BetaNestedEqual => "beta-nested-equal",
        PairClass::GammaNestedEqual => "gamma-nested-equal",
    }
}

/// Observed transition counts, indexed partition x kind x pre x post.
type Seen = [[[[u64; 6]; 6]; 2]; 3];
/// Allowed landings in the same layout.
type Allowed = [[[[bool; 6]; 6]; 2]; 3];

fn check_tables(args: &CheckArgs) -> bool {
    let mut allowed: Allowed = [[[[false; 6]; 6]; 2]; 3];
    for row in transition_rows() {
        for &post in row.allowed {
            allowed[row.partition][kind_ix(row.kind)][row.pre.index()][post.index()] = true;
        }
    }
    let mut seen: Seen = [[[[0; 6]; 6]; 2]; 3];
    let mut violations: Vec<String> = Vec::new();

    // Exhaustive short workloads on small lists, then one long random
    // mixed workload for the states short prefixes cannot reach.
    for (n, len) in [(3usize, 7u32), (4, 5)] {
        let initial = ListState::new((0..n as u32).map(Item).collect()).expect("distinct items");
        for code in 0..n.pow(len) {
            let mut events = Vec::with_capacity(len as usize);
            let mut rest = code;
            for _ in 0..len {
                events.push(Event::Access(Item((rest % n) as u32)));
                rest /= n;
            }
            drive(&initial, &events, &allowed, &mut seen, &mut violations, &format!("n={n} #{code}"));
            if violations.len() > 20 {
                break;
            }
        }
    }
    let seq = random_dynamic_sequence(args.n, args.steps, args.seed, dynamic_band(args.n));
    drive(seq.initial(), seq.events(), &allowed, &mut seen, &mut violations, "random");

    // Predecessor rows depend on the move kind; the others do not, so
    // their two kind slots are reported merged.
    for pre in PairClass::ALL {
        for kind in [MoveKind::ToTarget, MoveKind::ToFront] {
            report_row(PRED, kind_ix(kind), Some(kind), pre, &allowed, &seen);
        }
    }
    for part in [SUCC, OTHER] {
        for pre in PairClass::ALL {
            report_row(part, 0, None, pre, &allowed, &merge_kinds(part, &seen));
        }
    }

    for v in violations.iter().take(10) {
        println!("[FAIL] {v}");
    }
    // Kind-independent partitions count an entry as hit under either kind.
    let mut unseen = 0usize;
    for kind in 0..2 {
        for pre in 0..6 {
            for post in 0..6 {
                if allowed[PRED][kind][pre][post] && seen[PRED][kind][pre][post] == 0 {
                    unseen += 1;
                }
            }
        }
    }
    for part in [SUCC, OTHER] {
        for pre in 0..6 {
            for post in 0..6 {
                if allowed[part][0][pre][post]
                    && seen[part][0][pre][post] + seen[part][1][pre][post] == 0
                {
                    unseen += 1;
                }
            }
        }
    }
    println!(
        "observed transitions all inside the table: {}; allowed entries never hit: {unseen}",
        if violations.is_empty() { "yes" } else { "NO" },
    );
    violations.is_empty()
}

/// Folds the two kind slots of a kind-independent partition together.
fn merge_kinds(part: usize, seen: &Seen) -> Seen {
    let mut merged: Seen = [[[[0; 6]; 6]; 2]; 3];
    for pre in 0..6 {
        for post in 0..6 {
            merged[part][0][pre][post] = seen[part][0][pre][post] + seen[part][1][pre][post];
        }
    }
    merged
}

fn report_row(
    part: usize,
    kind_slot: usize,
    kind: Option<MoveKind>,
    pre: PairClass,
    allowed: &Allowed,
    seen: &Seen,
) {
    let kind_label = kind.map_or("(any move)", |k| KIND_NAMES[kind_ix(k)]);
    let mut cells: Vec<String> = Vec::new();
    for post in PairClass::ALL {
        let count = seen[part][kind_slot][pre.index()][post.index()];
        let ok = allowed[part][kind_slot][pre.index()][post.index()];
        if count > 0 || ok {
            cells.push(format!(
                "{}{} x{}",
                class_name(post),
                if ok { "" } else { " [FORBIDDEN]" },
                count
            ));
        }
    }
    println!("{:5} {:11} {:19} -> {}", PART_NAMES[part], kind_label, class_name(pre), cells.join(", "));
}

/// Serves `events` from `initial`, recording every access step's pair
/// transitions and flagging any outside the table.
fn drive(
    initial: &ListState,
    events: &[Event],
    allowed: &Allowed,
    seen: &mut Seen,
    violations: &mut Vec<String>,
    tag: &str,
) {
    let mut fpm = Fpm::new(initial);
    let mut pre_classes: Vec<(Item, Item, usize, PairClass)> = Vec::new();
    for (step, ev) in events.iter().enumerate() {
        let is_access = matches!(ev, Event::Access(_));
        if is_access {
            pre_classes.clear();
            let items = fpm.list().items().to_vec();
            let served = ev.item();
            for i in 0..items.len() {
                for j in i + 1..items.len() {
                    let (a, b) = (items[i], items[j]);
                    let part = if b == served {
                        PRED
                    } else if a == served {
                        SUCC
                    } else {
                        OTHER
                    };
                    match fpm.class_of(a, b) {
                        Ok(class) => pre_classes.push((a, b, part, class)),
                        Err(e) => violations.push(format!("{tag} step {}: {e}", step + 1)),
                    }
                }
            }
        }
        let rep = match fpm.step(ev) {
            Ok(rep) => rep,
            Err(e) => {
                violations.push(format!("{tag} step {}: {e}", step + 1));
                return;
            }
        };
        if !is_access {
            continue;
        }
        let kind = kind_ix(rep.kind);
        for &(a, b, part, pre) in &pre_classes {
            // The pair may have flipped sides during the move.
            let (pa, pb) = (fpm.list().position(a), fpm.list().position(b));
            let (earlier, later) = if pa < pb { (a, b) } else { (b, a) };
            let post = match fpm.class_of(earlier, later) {
                Ok(c) => c,
                Err(e) => {
                    violations.push(format!("{tag} step {}: {e}", step + 1));
                    continue;
                }
            };
            seen[part][kind][pre.index()][post.index()] += 1;
            if !allowed[part][kind][pre.index()][post.index()] {
                violations.push(format!(
                    "{tag} step {}: {} {} pair in {} landed in {}",
                    step + 1,
                    PART_NAMES[part],
                    KIND_NAMES[kind],
                    class_name(pre),
                    class_name(post),
                ));
            }
        }
    }
}
