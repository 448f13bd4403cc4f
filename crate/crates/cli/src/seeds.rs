//! Seed lists: `7`, `1..10` (inclusive), `1..=10`, `1,4,9`, or a JSON array.

use serde::{Deserialize, Deserializer};

use crate::error::{CliError, CliResult};

pub fn parse_seeds(s: &str) -> CliResult<Vec<u64>> {
    let bad = || {
        CliError::Usage(format!(
            "invalid seed list `{s}` (expected N, A..B or A,B,C)"
        ))
    };
    let s = s.trim();
    let seeds: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (u64, u64) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        );
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<CliResult<_>>()?
    };
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SeedsRepr {
    List(Vec<u64>),
    Text(String),
}

pub(crate) fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<u64>>, D::Error> {
    match Option::<SeedsRepr>::deserialize(d)? {
        None => Ok(None),
        Some(SeedsRepr::List(v)) if v.is_empty() => {
            Err(serde::de::Error::custom("empty seed list"))
        }
        Some(SeedsRepr::List(v)) => Ok(Some(v)),
        Some(SeedsRepr::Text(s)) => parse_seeds(&s).map(Some).map_err(serde::de::Error::custom),
    }
}
