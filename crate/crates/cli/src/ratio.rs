//! `ratio`: price an algorithm against optimum oracles.

use std::path::PathBuf;
use std::process::ExitCode;
use std::thread;

use clap::{Args, ValueEnum};
use listup_core::fullwf::opt_exact;
use listup_core::harness::run_algorithm;
use listup_core::numeric::rat;
use listup_core::pairwf::pair_based_opt;
use listup_core::{model_name, CostModel, Rat, RequestSequence};
use serde_json::json;

use crate::common::{make_alg, rat_f64, show_rat, write_sink, AlgArg, ModelArg, OutputArg};
use crate::source::{self, SourceArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    /// Exact optimum via the full work function (small lists only).
    Exact,
    /// Pair-based lower bound on the optimum.
    Pair,
    /// Both of the above.
    Both,
    /// The generator's constructed offline schedule (generator sources only).
    Schedule,
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    /// Algorithm to price.
    #[arg(long, value_enum)]
    pub alg: AlgArg,
    #[command(flatten)]
    pub source: SourceArgs,
    /// Cost model; defaults to the source's own model.
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    /// Drop insertion access costs from both sides.
    #[arg(long)]
    pub adjusted: bool,
    #[arg(long, value_enum, default_value_t = OracleArg::Pair)]
    pub oracle: OracleArg,
    /// Independent random runs; run i draws its sequence at seed+i.
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    #[arg(long, value_enum, default_value_t = OutputArg::Text)]
    pub output: OutputArg,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// One priced run. Oracle fields are filled per the `--oracle` choice.
struct Row {
    run: usize,
    seed: u64,
    model: CostModel,
    alg_cost: u64,
    exact: Option<u64>,
    pair: Option<Rat>,
    schedule: Option<u64>,
    /// Generator sources only: steady-state (alg, optimum) cost per cycle.
    /// The warm-up's additive noise cancels here.
    cycle: Option<(u64, Rat)>,
}

impl Row {
    /// `alg / opt`, or `None` when the optimum is zero.
    fn ratio_to(&self, opt: Rat) -> Option<f64> {
        if opt == rat(0, 1) {
            None
        } else {
            Some(self.alg_cost as f64 / rat_f64(opt))
        }
    }
}

pub fn run(args: &RatioArgs) -> Result<ExitCode, String> {
    if args.runs == 0 {
        return Err("--runs must be positive".into());
    }
    let rows = if args.runs == 1 { vec![single_run(args)?] } else { batch(args)? };
    render(args, &rows)?;
    Ok(ExitCode::SUCCESS)
}

fn single_run(args: &RatioArgs) -> Result<Row, String> {
    let resolved = source::resolve(&args.source)?;
    let model = args.model.map_or(resolved.default_model, CostModel::from);
    let schedule = match args.oracle {
        OracleArg::Schedule => {
            let report = resolved
                .report
                .as_ref()
                .ok_or("the schedule oracle needs a generator source")?;
            Some(report.opt_upper)
        }
        _ => None,
    };
    let cycle = resolved
        .report
        .as_ref()
        .and_then(|r| r.cycle)
        .map(|c| (c.alg_cost, rat(c.opt_halves as i64, 2)));
    let mut row = price(args, &resolved.sequence, model, 0, args.source.seed, schedule)?;
    row.cycle = cycle;
    Ok(row)
}

fn batch(args: &RatioArgs) -> Result<Vec<Row>, String> {
    if !args.source.random {
        return Err("batch runs redraw random sequences; --runs needs --random".into());
    }
    let model = args.model.map_or(CostModel::Partial, CostModel::from);
    let runs = args.runs;
    let workers = thread::available_parallelism().map_or(1, |p| p.get()).min(runs);
    let results: Vec<Result<Row, String>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..runs)
                        .step_by(workers)
                        .map(|i| {
                            let seed = args.source.seed + i as u64;
                            let seq = source::random_sequence(&args.source, seed)?;
                            price(args, &seq, model, i, seed, None).map(|r| (i, r))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        let mut slots: Vec<Option<Result<Row, String>>> = (0..runs).map(|_| None).collect();
        for handle in handles {
            for item in handle.join().expect("worker panicked") {
                match item {
                    Ok((i, row)) => slots[i] = Some(Ok(row)),
                    Err(e) => return vec![Err(e)],
                }
            }
        }
        slots.into_iter().map(|s| s.expect("every run assigned")).collect()
    });
    results.into_iter().collect()
}

fn price(
    args: &RatioArgs,
    seq: &RequestSequence,
    model: CostModel,
    run: usize,
    seed: u64,
    schedule: Option<u64>,
) -> Result<Row, String> {
    let mut alg = make_alg(args.alg, seq.initial())?;
    let outcome = run_algorithm(alg.as_mut(), seq, model, args.adjusted).map_err(|e| e.to_string())?;
    let exact = match args.oracle {
        OracleArg::Exact | OracleArg::Both => {
            Some(opt_exact(seq, model).map_err(|e| e.to_string())?)
        }
        _ => None,
    };
    let pair = match args.oracle {
        OracleArg::Pair | OracleArg::Both => {
            Some(pair_based_opt(seq, model).map_err(|e| e.to_string())?)
        }
        _ => None,
    };
    Ok(Row { run, seed, model, alg_cost: outcome.total_cost, exact, pair, schedule, cycle: None })
}

/// Per-oracle view of the rows: label plus extraction of the opt value.
const ORACLES: [(&str, fn(&Row) -> Option<Rat>); 3] = [
    ("exact optimum", |r| r.exact.map(|v| rat(v as i64, 1))),
    ("pair-based optimum", |r| r.pair),
    ("schedule optimum", |r| r.schedule.map(|v| rat(v as i64, 1))),
];

fn render(args: &RatioArgs, rows: &[Row]) -> Result<(), String> {
    let text = match args.output {
        OutputArg::Text => text_report(args, rows),
        OutputArg::Csv => csv_report(rows),
        OutputArg::Json => {
            let mut s =
                serde_json::to_string_pretty(&json_report(args, rows)).map_err(|e| e.to_string())?;
            s.push('\n');
            s
        }
    };
    write_sink(args.out.as_deref(), &text).map_err(|e| e.to_string())
}

fn text_report(args: &RatioArgs, rows: &[Row]) -> String {
    if let [row] = rows {
        let mut out = format!(
            "algorithm {} cost {} ({} cost model)\n",
            args.alg.name(),
            row.alg_cost,
            model_name(row.model),
        );
        for (label, opt_of) in ORACLES {
            let Some(opt) = opt_of(row) else { continue };
            out.push_str(&format!("{label} {}\n", show_rat(opt)));
            match row.ratio_to(opt) {
                Some(ratio) => out.push_str(&format!("ratio vs {label}: {ratio:.4}\n")),
                None => out.push_str(&format!(
                    "ratio vs {label}: undefined (optimum cost 0)\n"
                )),
            }
        }
        if let Some((alg, opt)) = row.cycle {
            let ratio = alg as f64 / rat_f64(opt);
            out.push_str(&format!(
                "steady-state cycle: alg {alg} vs optimum {} per cycle; ratio {ratio:.4}\n",
                show_rat(opt),
            ));
        }
        return out;
    }
    let mut out = format!("{} runs of {} events each\n", rows.len(), args.source.len);
    for (label, opt_of) in ORACLES {
        if rows.iter().all(|r| opt_of(r).is_none()) {
            continue;
        }
        let mut defined: Vec<(f64, u64)> = Vec::new();
        let mut undefined = 0usize;
        for row in rows {
            match opt_of(row).and_then(|o| row.ratio_to(o)) {
                Some(ratio) => defined.push((ratio, row.seed)),
                None => undefined += 1,
            }
        }
        if defined.is_empty() {
            out.push_str(&format!("vs {label}: every run undefined (optimum 0)\n"));
            continue;
        }
        let (max, max_seed) =
            defined.iter().copied().fold((f64::MIN, 0), |acc, x| if x.0 > acc.0 { x } else { acc });
        let min = defined.iter().map(|x| x.0).fold(f64::MAX, f64::min);
        let mean = defined.iter().map(|x| x.0).sum::<f64>() / defined.len() as f64;
        out.push_str(&format!(
            "vs {label}: max ratio {max:.4} (seed {max_seed}), min {min:.4}, mean {mean:.4}",
        ));
        if undefined > 0 {
            out.push_str(&format!(", {undefined} undefined"));
        }
        out.push('\n');
    }
    out
}

fn csv_report(rows: &[Row]) -> String {
    let mut out = String::from(
        "run,seed,alg_cost,opt_exact,opt_pair,opt_schedule,ratio_exact,ratio_pair,ratio_schedule\n",
    );
    let opt_cell = |o: Option<Rat>| o.map_or(String::new(), |v| format!("{:.4}", rat_f64(v)));
    let ratio_cell = |row: &Row, o: Option<Rat>| match o {
        None => String::new(),
        Some(v) => row.ratio_to(v).map_or("undefined".into(), |r| format!("{r:.6}")),
    };
    for row in rows {
        let exact = row.exact.map(|v| rat(v as i64, 1));
        let sched = row.schedule.map(|v| rat(v as i64, 1));
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.run,
            row.seed,
            row.alg_cost,
            opt_cell(exact),
            opt_cell(row.pair),
            opt_cell(sched),
            ratio_cell(row, exact),
            ratio_cell(row, row.pair),
            ratio_cell(row, sched),
        ));
    }
    out
}

fn json_report(args: &RatioArgs, rows: &[Row]) -> serde_json::Value {
    let row_json = |row: &Row| {
        // An oracle that ran but found optimum 0 reports the string
        // "undefined"; an oracle that was not requested reports null.
        let ratio = |o: Option<Rat>| match o {
            None => serde_json::Value::Null,
            Some(v) => match row.ratio_to(v) {
                Some(r) => json!(r),
                None => json!("undefined"),
            },
        };
        json!({
            "run": row.run,
            "seed": row.seed,
            "model": model_name(row.model),
            "alg_cost": row.alg_cost,
            "opt_exact": row.exact,
            "opt_pair": row.pair.map(rat_f64),
            "opt_schedule": row.schedule,
            "ratio_exact": ratio(row.exact.map(|v| rat(v as i64, 1))),
            "ratio_pair": ratio(row.pair),
            "ratio_schedule": ratio(row.schedule.map(|v| rat(v as i64, 1))),
            "cycle_ratio": row.cycle.map(|(alg, opt)| alg as f64 / rat_f64(opt)),
        })
    };
    json!({
        "command": "ratio",
        "algorithm": args.alg.name(),
        "runs": rows.iter().map(row_json).collect::<Vec<_>>(),
    })
}
