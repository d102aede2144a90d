//! `verify`: build the request game, then either verify a potential at a
//! target ratio, certify a class lower bound, or re-audit a stored
//! certificate.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, ValueEnum};
use listup_core::{
    audit_potentials, build_graph, build_graph_bounded, check_certificate, class_lower_bound,
    limits, make_certificate, model_name, potential_iteration, Certificate, ClassBoundOutcome,
    CostModel, GameGraph, PotentialStatus, Restriction, WfKind, DEFAULT_MAX_ROUNDS,
};

use crate::common::{parse_ratio, show_rat, ModelArg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    /// Work function over whole-list configurations.
    FullWf,
    /// Sum of projected two-item work functions.
    PairBasedWf,
}

impl From<KindArg> for WfKind {
    fn from(k: KindArg) -> WfKind {
        match k {
            KindArg::FullWf => WfKind::FullWf,
            KindArg::PairBasedWf => WfKind::PairBasedWf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RestrictArg {
    /// The player may rearrange into any permutation.
    All,
    /// Minimizers of work-function value plus move distance.
    WfaClass,
    /// Leave the requested item in place or move it to the front.
    StayOrMtf,
}

impl From<RestrictArg> for Restriction {
    fn from(r: RestrictArg) -> Restriction {
        match r {
            RestrictArg::All => Restriction::All,
            RestrictArg::WfaClass => Restriction::WfaClass,
            RestrictArg::StayOrMtf => Restriction::StayOrMtf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Find an exact potential proving the ratio as an upper bound.
    Verify,
    /// Certify that every restricted policy pays at least the ratio.
    LowerBound,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// List length of the request game.
    #[arg(long, required_unless_present = "audit")]
    pub n: Option<usize>,
    /// Target ratio: an integer, a decimal, or p/q.
    #[arg(long, required_unless_present = "audit")]
    pub rho: Option<String>,
    #[arg(long, value_enum, default_value_t = ModelArg::Partial)]
    pub model: ModelArg,
    #[arg(long, value_enum, default_value_t = KindArg::FullWf)]
    pub kind: KindArg,
    #[arg(long, value_enum, default_value_t = RestrictArg::All)]
    pub restrict: RestrictArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Verify)]
    pub mode: ModeArg,
    /// Iteration budget before giving up on a fixed point.
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    pub max_rounds: usize,
    /// Lift the builder's default list-length guard up to this value.
    #[arg(long)]
    pub max_n: Option<usize>,
    /// Write the verified certificate here (verify mode only).
    #[arg(long, value_name = "FILE")]
    pub cert: Option<PathBuf>,
    /// Re-audit a stored certificate against a freshly built graph.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["n", "rho", "mode", "cert"])]
    pub audit: Option<PathBuf>,
}

pub fn run(args: &VerifyArgs) -> Result<ExitCode, String> {
    if let Some(path) = &args.audit {
        return audit(path);
    }
    let n = args.n.ok_or("--n is required")?;
    let rho = parse_ratio(args.rho.as_deref().ok_or("--rho is required")?)?;
    let graph = build(n, args)?;
    println!(
        "graph: n={} {} {} restriction={} ({} opt, {} alg vertices)",
        graph.n(),
        graph.kind().name(),
        model_name(graph.model()),
        graph.restriction_name(),
        graph.opt_count(),
        graph.alg_count(),
    );
    match args.mode {
        ModeArg::Verify => {
            let pa =
                potential_iteration(&graph, rho, args.max_rounds, None).map_err(|e| e.to_string())?;
            match &pa.status {
                PotentialStatus::Verified => {
                    audit_potentials(&graph, &pa).map_err(|e| e.to_string())?;
                    println!(
                        "rho {}: Verified in {} rounds; max potential {}",
                        show_rat(rho),
                        pa.rounds,
                        show_rat(pa.max_potential()),
                    );
                    if let Some(path) = &args.cert {
                        let cert = make_certificate(&graph, &pa).map_err(|e| e.to_string())?;
                        let mut text =
                            serde_json::to_string_pretty(&cert).map_err(|e| e.to_string())?;
                        text.push('\n');
                        fs::write(path, text)
                            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
                        println!("certificate written to {}", path.display());
                    }
                    Ok(ExitCode::SUCCESS)
                }
                PotentialStatus::Diverged { iteration, max_ticks, witness } => {
                    println!(
                        "rho {}: Diverged at iteration {iteration} ({max_ticks} ticks on {witness}); not verified",
                        show_rat(rho),
                    );
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        ModeArg::LowerBound => match class_lower_bound(&graph, rho).map_err(|e| e.to_string())? {
            ClassBoundOutcome::Certified(cert) => {
                println!(
                    "Certified: every {} policy pays at least {} times the optimum asymptotically",
                    graph.restriction_name(),
                    show_rat(cert.rho),
                );
                println!(
                    "probe {}; strategy subgraph {} vertices / {} edges; min cycle ratio {}",
                    show_rat(cert.probe_rho),
                    cert.subgraph.node_count(),
                    cert.subgraph.edge_count(),
                    cert.min_ratio
                        .map_or_else(|| "unbounded (no optimum-paying cycle)".into(), show_rat),
                );
                Ok(ExitCode::SUCCESS)
            }
            ClassBoundOutcome::Inconclusive { reason } => {
                println!("Inconclusive: {reason}");
                Ok(ExitCode::FAILURE)
            }
        },
    }
}

fn build(n: usize, args: &VerifyArgs) -> Result<GameGraph, String> {
    let model = CostModel::from(args.model);
    let kind = WfKind::from(args.kind);
    let restriction = Restriction::from(args.restrict);
    match args.max_n {
        None => build_graph(n, model, kind, restriction),
        Some(m) => build_graph_bounded(n, model, kind, restriction, m, limits::state_cap()),
    }
    .map_err(|e| e.to_string())
}

/// Rebuilds the graph a certificate describes and re-runs the exact audit.
fn audit(path: &Path) -> Result<ExitCode, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let cert: Certificate = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let model = match cert.model.as_str() {
        "full" => CostModel::Full,
        "partial" => CostModel::Partial,
        other => return Err(format!("unknown cost model `{other}` in certificate")),
    };
    let kind = match cert.kind.as_str() {
        "full-wf" => WfKind::FullWf,
        "pair-based-wf" => WfKind::PairBasedWf,
        other => return Err(format!("unknown work-function kind `{other}` in certificate")),
    };
    let restriction = match cert.restriction.as_str() {
        "all" => Restriction::All,
        "wfa-class" => Restriction::WfaClass,
        "stay-or-mtf" => Restriction::StayOrMtf,
        other => return Err(format!("restriction `{other}` cannot be rebuilt")),
    };
    let graph = build_graph_bounded(cert.n, model, kind, restriction, cert.n, limits::state_cap())
        .map_err(|e| e.to_string())?;
    check_certificate(&graph, &cert).map_err(|e| format!("audit failed: {e}"))?;
    println!(
        "certificate audit passed: n={} {} {} {} at rho {}/{} ({} opt, {} alg vertices)",
        cert.n,
        cert.kind,
        cert.model,
        cert.restriction,
        cert.rho_numer,
        cert.rho_denom,
        cert.opt_vertices,
        cert.alg_vertices,
    );
    Ok(ExitCode::SUCCESS)
}
