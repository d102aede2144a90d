//! Sequence sources: a `.lup` file, an adversarial generator, or random.

use std::fs;
use std::path::PathBuf;

use clap::{ArgGroup, Args, ValueEnum};
use listup_core::adversary::{gen_dbit_full, gen_dbit_partial, gen_fpm_lb, gen_halfmove, LowerBoundReport};
use listup_core::numeric::rat;
use listup_core::sequence::{
    parse_sequence, random_access_sequence, random_dynamic_sequence, DynamicOptions,
};
use listup_core::{CostModel, RequestSequence};

use crate::common::parse_ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenArg {
    /// Warm-up plus repeated 16-request cycle over five items.
    FpmLb,
    /// Marked-item workload against DBIT, full cost model.
    DbitFull,
    /// Doubled single-item workload against DBIT, partial cost model.
    DbitPartial,
    /// Repeated far-item bursts against Half-Move.
    Halfmove,
}

/// Knobs for the generators; which ones apply depends on the construction.
#[derive(Debug, Args)]
pub struct GenParams {
    /// Items in the initial list.
    #[arg(long)]
    pub n: Option<usize>,
    /// Repetitions of the construction's repeated block.
    #[arg(long, visible_alias = "k")]
    pub cycles: Option<usize>,
    /// Front-part fraction for dbit-full (p/q or decimal; c*n must be integral).
    #[arg(long)]
    pub c: Option<String>,
}

/// Where the requests come from; exactly one source must be chosen.
#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).multiple(false)))]
pub struct SourceArgs {
    /// Sequence file to replay.
    #[arg(long, value_name = "FILE", group = "source")]
    pub seq: Option<PathBuf>,
    /// Adversarial construction to generate.
    #[arg(long, value_enum, group = "source")]
    pub gen: Option<GenArg>,
    /// Random access sequence (uniform item choice unless --zipf is given).
    #[arg(long, group = "source")]
    pub random: bool,

    #[command(flatten)]
    pub params: GenParams,

    /// Number of random requests.
    #[arg(long, default_value_t = 1000)]
    pub len: usize,
    /// Seed for random sequences.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Zipf skew for random item choice.
    #[arg(long, value_name = "S")]
    pub zipf: Option<f64>,
    /// Mix insertions and deletions into the random sequence.
    #[arg(long)]
    pub dynamic: bool,
}

/// A resolved source: the sequence, the generator's report when one ran,
/// the repetition count actually used, and the cost model the source is
/// naturally priced in.
pub struct Resolved {
    pub sequence: RequestSequence,
    pub report: Option<LowerBoundReport>,
    pub cycles: Option<usize>,
    pub default_model: CostModel,
}

pub fn resolve(args: &SourceArgs) -> Result<Resolved, String> {
    if let Some(path) = &args.seq {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let sequence = parse_sequence(&text).map_err(|e| e.to_string())?;
        return Ok(Resolved {
            sequence,
            report: None,
            cycles: None,
            default_model: CostModel::Partial,
        });
    }
    if let Some(gen) = args.gen {
        let (report, cycles) = resolve_gen(gen, &args.params)?;
        return Ok(Resolved {
            sequence: report.sequence.clone(),
            default_model: report.model,
            cycles,
            report: Some(report),
        });
    }
    let sequence = random_sequence(args, args.seed)?;
    Ok(Resolved { sequence, report: None, cycles: None, default_model: CostModel::Partial })
}

/// The random sequence the source flags describe, at an explicit seed.
/// Batch commands call this once per run with shifted seeds.
pub fn random_sequence(args: &SourceArgs, seed: u64) -> Result<RequestSequence, String> {
    let n = args.params.n.unwrap_or(5);
    if n < 1 {
        return Err("--n must be at least 1".into());
    }
    Ok(if args.dynamic {
        let opts = DynamicOptions {
            min_len: 2.min(n),
            max_len: n.max(DynamicOptions::default().max_len),
            ..DynamicOptions::default()
        };
        random_dynamic_sequence(n, args.len, seed, opts)
    } else {
        random_access_sequence(n, args.len, seed, args.zipf)
    })
}

/// Runs a generator with its per-construction defaults, returning the
/// report and the repetition count used. Each generator checks its own
/// closed forms and errors out on any mismatch.
pub fn resolve_gen(
    gen: GenArg,
    params: &GenParams,
) -> Result<(LowerBoundReport, Option<usize>), String> {
    let (report, cycles) = match gen {
        GenArg::FpmLb => {
            if let Some(n) = params.n {
                if n != 5 {
                    return Err("fpm-lb fixes five items; drop --n or pass 5".into());
                }
            }
            let k = params.cycles.unwrap_or(3);
            (gen_fpm_lb(k), Some(k))
        }
        GenArg::DbitFull => {
            let n = params.n.unwrap_or(300);
            let c = match &params.c {
                Some(s) => parse_ratio(s)?,
                None => default_split(n)?,
            };
            let reps = params.cycles.unwrap_or(1);
            (gen_dbit_full(n, c, reps), Some(reps))
        }
        GenArg::DbitPartial => (gen_dbit_partial(params.n.unwrap_or(8)), None),
        GenArg::Halfmove => {
            let k = params.cycles.unwrap_or(100);
            (gen_halfmove(params.n.unwrap_or(40), k), Some(k))
        }
    };
    Ok((report.map_err(|e| e.to_string())?, cycles))
}

/// Default dbit-full split: the cost-maximizing fraction (5 - sqrt(13)) / 3,
/// rounded to the nearest integral front-part size.
fn default_split(n: usize) -> Result<listup_core::Rat, String> {
    let c = (5.0 - 13f64.sqrt()) / 3.0;
    let a = ((c * n as f64).round() as i64).clamp(1, n as i64 - 1);
    if n < 2 {
        return Err("dbit-full needs at least two items".into());
    }
    Ok(rat(a, n as i64))
}
