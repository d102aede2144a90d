//! `generate`: emit an adversarial workload file plus its predicted costs.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Args;
use listup_core::sequence::serialize_sequence;
use listup_core::model_name;
use serde_json::json;

use crate::common::{rat_f64, OutputArg};
use crate::source::{resolve_gen, GenArg, GenParams};

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Construction to emit.
    #[arg(long, value_enum)]
    pub gen: GenArg,
    #[command(flatten)]
    pub params: GenParams,
    /// Sequence file to write; the default name encodes the parameters.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputArg::Text)]
    pub output: OutputArg,
}

pub fn run(args: &GenerateArgs) -> Result<ExitCode, String> {
    let (report, cycles) = resolve_gen(args.gen, &args.params)?;
    let path = args.out.clone().unwrap_or_else(|| {
        let mut name = format!("{}-n{}", report.name, report.sequence.initial().len());
        if let Some(k) = cycles {
            name.push_str(&format!("-k{k}"));
        }
        PathBuf::from(name + ".lup")
    });
    fs::write(&path, serialize_sequence(&report.sequence))
        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;

    match args.output {
        OutputArg::Json => {
            let summary = json!({
                "command": "generate",
                "construction": report.name,
                "model": model_name(report.model),
                "events": report.sequence.len(),
                "path": path.display().to_string(),
                "alg_cost": report.alg_cost,
                "predicted_alg": report.predicted_alg,
                "opt_upper": report.opt_upper,
                "predicted_opt": report.predicted_opt,
                "ratio": rat_f64(report.ratio),
                "cycle": report.cycle.map(|c| json!({
                    "length": c.length,
                    "alg_cost": c.alg_cost,
                    "opt": c.opt_halves as f64 / 2.0,
                })),
            });
            println!("{}", serde_json::to_string_pretty(&summary).map_err(|e| e.to_string())?);
        }
        _ => {
            println!(
                "wrote {} events to {} ({} cost model)",
                report.sequence.len(),
                path.display(),
                model_name(report.model),
            );
            let forms = |v: Option<u64>| {
                v.map_or("no closed form".to_string(), |p| format!("closed form {p}"))
            };
            println!(
                "target algorithm pays {} ({}); offline schedule pays {} ({})",
                report.alg_cost,
                forms(report.predicted_alg),
                report.opt_upper,
                forms(report.predicted_opt),
            );
            println!("ratio {:.4}", rat_f64(report.ratio));
            if let Some(c) = report.cycle {
                let opt = if c.opt_halves % 2 == 0 {
                    format!("{}", c.opt_halves / 2)
                } else {
                    format!("{}.5", c.opt_halves / 2)
                };
                println!("per-cycle: {} events, alg cost {}, optimum {}", c.length, c.alg_cost, opt);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
