//! Flag enums and small helpers shared by the subcommands.

use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use clap::ValueEnum;
use listup_core::baselines::{Dbit, HalfMove, Mtf, StaticList, Wfa};
use listup_core::numeric::rat;
use listup_core::{CostModel, Fpm, ListState, OnlineAlgorithm, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    /// Accessing position l costs l - 1.
    Partial,
    /// Accessing position l costs l.
    Full,
}

impl From<ModelArg> for CostModel {
    fn from(m: ModelArg) -> CostModel {
        match m {
            ModelArg::Partial => CostModel::Partial,
            ModelArg::Full => CostModel::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgArg {
    Mtf,
    Dbit,
    Halfmove,
    Static,
    Wfa,
    Fpm,
}

impl AlgArg {
    pub fn name(self) -> &'static str {
        match self {
            AlgArg::Mtf => "mtf",
            AlgArg::Dbit => "dbit",
            AlgArg::Halfmove => "halfmove",
            AlgArg::Static => "static",
            AlgArg::Wfa => "wfa",
            AlgArg::Fpm => "fpm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputArg {
    /// Human-readable lines.
    Text,
    /// Step rows (simulate) or per-run rows (ratio batches).
    Csv,
    /// One summary object.
    Json,
}

/// Instantiates a named algorithm on the sequence's initial list.
pub fn make_alg(alg: AlgArg, initial: &ListState) -> Result<Box<dyn OnlineAlgorithm>, String> {
    Ok(match alg {
        AlgArg::Mtf => Box::new(Mtf::new(initial)),
        AlgArg::Dbit => Box::new(Dbit::new(initial)),
        AlgArg::Halfmove => Box::new(HalfMove::new(initial)),
        AlgArg::Static => Box::new(StaticList::new(initial)),
        AlgArg::Wfa => Box::new(Wfa::new(initial).map_err(|e| e.to_string())?),
        AlgArg::Fpm => Box::new(Fpm::new(initial)),
    })
}

/// Parses "13/4", "3.25" or "3" into an exact rational.
pub fn parse_ratio(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let bad = || format!("`{s}` is not a ratio; use p/q, a decimal, or an integer");
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s),
    };
    if let Some((p, q)) = body.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err("denominator must be nonzero".into());
        }
        return Ok(rat(sign * p, q));
    }
    if let Some((int, frac)) = body.split_once('.') {
        if frac.is_empty() || frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let digits: i64 = frac.parse().map_err(|_| bad())?;
        let scale = 10i64.pow(frac.len() as u32);
        return Ok(rat(sign * (int * scale + digits), scale));
    }
    body.parse::<i64>().map(|v| rat(sign * v, 1)).map_err(|_| bad())
}

/// `p/q (~d.dddd)`, or the bare integer when the ratio is integral.
pub fn show_rat(r: Rat) -> String {
    if r.is_integer() {
        format!("{}", r.to_integer())
    } else {
        format!("{} (~{:.6})", r, rat_f64(r))
    }
}

pub fn rat_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Writes to the file, or to stdout when no path is given.
pub fn write_sink(path: Option<&Path>, content: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, content),
        None => io::stdout().write_all(content.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_strings_parse_exactly() {
        assert_eq!(parse_ratio("13/4").unwrap(), rat(13, 4));
        assert_eq!(parse_ratio("3.25").unwrap(), rat(13, 4));
        assert_eq!(parse_ratio("3.1").unwrap(), rat(31, 10));
        assert_eq!(parse_ratio(" 3 ").unwrap(), rat(3, 1));
        assert_eq!(parse_ratio("-0.5").unwrap(), rat(-1, 2));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("3.").is_err());
        assert!(parse_ratio("x").is_err());
    }
}
