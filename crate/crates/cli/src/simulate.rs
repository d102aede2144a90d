//! `simulate`: run one online algorithm over a sequence and report costs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Args;
use listup_core::adversary::LowerBoundReport;
use listup_core::harness::run_algorithm;
use listup_core::sequence::Event;
use listup_core::{model_name, CostModel, RequestSequence, StepReport};
use serde_json::json;

use crate::common::{make_alg, rat_f64, write_sink, AlgArg, ModelArg, OutputArg};
use crate::source::{self, SourceArgs};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Algorithm to run.
    #[arg(long, value_enum)]
    pub alg: AlgArg,
    #[command(flatten)]
    pub source: SourceArgs,
    /// Cost model; defaults to the source's own model (partial for files
    /// and random sequences).
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Drop insertion access costs from the headline total.
    #[arg(long)]
    pub adjusted: bool,
    #[arg(long, value_enum, default_value_t = OutputArg::Csv)]
    pub output: OutputArg,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

pub fn run(args: &SimulateArgs) -> Result<ExitCode, String> {
    let resolved = source::resolve(&args.source)?;
    let model = args.model.map_or(resolved.default_model, CostModel::from);
    let mut alg = make_alg(args.alg, resolved.sequence.initial())?;
    let outcome = run_algorithm(alg.as_mut(), &resolved.sequence, model, args.adjusted)
        .map_err(|e| e.to_string())?;

    let per_cycle = measured_cycles(&resolved, &outcome.steps);
    match args.output {
        OutputArg::Csv => {
            let csv = steps_csv(&resolved.sequence, &outcome.steps);
            write_sink(args.out.as_deref(), &csv).map_err(|e| e.to_string())?;
            eprint!(
                "{}",
                text_summary(args, model, &resolved, outcome.total_cost, outcome.raw_cost, &per_cycle)
            );
        }
        OutputArg::Text => {
            let text =
                text_summary(args, model, &resolved, outcome.total_cost, outcome.raw_cost, &per_cycle);
            write_sink(args.out.as_deref(), &text).map_err(|e| e.to_string())?;
        }
        OutputArg::Json => {
            let summary = json_summary(args, model, &resolved, outcome.total_cost, outcome.raw_cost, &per_cycle);
            let mut text = serde_json::to_string_pretty(&summary).map_err(|e| e.to_string())?;
            text.push('\n');
            write_sink(args.out.as_deref(), &text).map_err(|e| e.to_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Sums the simulated cost over each trailing repetition window when the
/// source is a generator with a declared cycle.
fn measured_cycles(resolved: &source::Resolved, steps: &[StepReport]) -> Vec<u64> {
    let Some(report) = &resolved.report else { return Vec::new() };
    let (Some(cycle), Some(k)) = (report.cycle, resolved.cycles) else { return Vec::new() };
    if cycle.length == 0 || steps.len() < k * cycle.length {
        return Vec::new();
    }
    let warmup = steps.len() - k * cycle.length;
    (0..k)
        .map(|j| {
            steps[warmup + j * cycle.length..warmup + (j + 1) * cycle.length]
                .iter()
                .map(|s| s.total_cost)
                .sum()
        })
        .collect()
}

fn steps_csv(seq: &RequestSequence, steps: &[StepReport]) -> String {
    let mut out = String::from("step,event,item,access,swaps,total,cumulative\n");
    let mut cum = 0u64;
    for (i, s) in steps.iter().enumerate() {
        cum += s.total_cost;
        let (kind, item) = match s.event {
            Event::Access(it) => ("access", it),
            Event::Insert(it) => ("insert", it),
            Event::Delete(it) => ("delete", it),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            i + 1,
            kind,
            seq.universe().label(item),
            s.access_cost,
            s.swap_count,
            s.total_cost,
            cum
        ));
    }
    out
}

fn text_summary(
    args: &SimulateArgs,
    model: CostModel,
    resolved: &source::Resolved,
    total: u64,
    raw: u64,
    per_cycle: &[u64],
) -> String {
    let mut out = format!(
        "algorithm {} over {} events ({} cost model): total {}\n",
        args.alg.name(),
        resolved.sequence.len(),
        model_name(model),
        total,
    );
    if args.adjusted {
        out.push_str(&format!("raw total (insert accesses included): {raw}\n"));
    }
    if let Some(report) = &resolved.report {
        out.push_str(&construction_text(report));
    }
    if !per_cycle.is_empty() {
        let shown: Vec<String> = per_cycle.iter().map(u64::to_string).collect();
        out.push_str(&format!("measured per-cycle cost: {}\n", shown.join(",")));
    }
    out
}

fn construction_text(report: &LowerBoundReport) -> String {
    let mut out = format!(
        "construction {}: its target pays {}, offline schedule pays {} (ratio {:.4})\n",
        report.name,
        report.alg_cost,
        report.opt_upper,
        rat_f64(report.ratio),
    );
    if let Some(c) = report.cycle {
        out.push_str(&format!(
            "per-cycle: {} events, alg cost {}, optimum {}\n",
            c.length,
            c.alg_cost,
            halves(c.opt_halves),
        ));
    }
    out
}

/// Renders a halves count as an exact decimal.
fn halves(h: u64) -> String {
    if h % 2 == 0 {
        format!("{}", h / 2)
    } else {
        format!("{}.5", h / 2)
    }
}

fn json_summary(
    args: &SimulateArgs,
    model: CostModel,
    resolved: &source::Resolved,
    total: u64,
    raw: u64,
    per_cycle: &[u64],
) -> serde_json::Value {
    let construction = resolved.report.as_ref().map(|r| {
        json!({
            "name": r.name,
            "alg_cost": r.alg_cost,
            "opt_upper": r.opt_upper,
            "predicted_alg": r.predicted_alg,
            "predicted_opt": r.predicted_opt,
            "ratio": rat_f64(r.ratio),
            "cycle": r.cycle.map(|c| json!({
                "length": c.length,
                "alg_cost": c.alg_cost,
                "opt": c.opt_halves as f64 / 2.0,
            })),
        })
    });
    json!({
        "command": "simulate",
        "algorithm": args.alg.name(),
        "model": model_name(model),
        "events": resolved.sequence.len(),
        "adjusted": args.adjusted,
        "total_cost": total,
        "raw_cost": raw,
        "per_cycle_measured": per_cycle,
        "construction": construction,
    })
}
