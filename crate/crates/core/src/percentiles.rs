//! Rank to percentile mapping on the 0–100 scale.
//!
//! | method | formula (×100)            |
//! |--------|---------------------------|
//! | a      | i / n                     |
//! | b      | (i − 1) / n               |
//! | c      | (i − 0.5) / n  (Hazen)    |
//! | d      | (i − 0.375) / n  (Blom)   |
//! | e      | (i − 0.44) / (n + 0.12)  (Gringorten) |
//! | general| (i − a) / (n − 2a + 1), a ∈ [0, 0.5] |
//!
//! Uncited publications always score 0, whatever the method.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ranking::RankedSet;

#[derive(Debug, Error, PartialEq)]
pub enum PercentileError {
    #[error("rank {rank} outside [1, {n}]")]
    RankOutOfRange { rank: f64, n: usize },
    #[error("plotting-position parameter a = {0} outside [0, 0.5]")]
    BadParameter(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PercentileMethod {
    /// i / n
    Ratio,
    /// (i − 1) / n
    Lower,
    Hazen,
    /// (i − 0.375) / n
    Blom,
    Gringorten,
    /// The (i − a) / (n − 2a + 1) plotting-position family.
    General {
        a: f64,
    },
}

impl PercentileMethod {
    pub const TABLE: [PercentileMethod; 5] = [
        PercentileMethod::Ratio,
        PercentileMethod::Lower,
        PercentileMethod::Hazen,
        PercentileMethod::Blom,
        PercentileMethod::Gringorten,
    ];

    pub fn general(a: f64) -> Result<Self, PercentileError> {
        if (0.0..=0.5).contains(&a) {
            Ok(PercentileMethod::General { a })
        } else {
            Err(PercentileError::BadParameter(a))
        }
    }

    /// `(offset, denominator)` so that the quantile is `(i − offset) / denominator`.
    fn terms(self, n: f64) -> (f64, f64) {
        match self {
            PercentileMethod::Ratio => (0.0, n),
            PercentileMethod::Lower => (1.0, n),
            PercentileMethod::Hazen => (0.5, n),
            PercentileMethod::Blom => (0.375, n),
            PercentileMethod::Gringorten => (0.44, n + 0.12),
            PercentileMethod::General { a } => (a, n - 2.0 * a + 1.0),
        }
    }
}

impl fmt::Display for PercentileMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PercentileMethod::Ratio => f.write_str("a"),
            PercentileMethod::Lower => f.write_str("b"),
            PercentileMethod::Hazen => f.write_str("c"),
            PercentileMethod::Blom => f.write_str("d"),
            PercentileMethod::Gringorten => f.write_str("e"),
            PercentileMethod::General { a } => write!(f, "general:a={a}"),
        }
    }
}

impl FromStr for PercentileMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "a" => Ok(PercentileMethod::Ratio),
            "b" => Ok(PercentileMethod::Lower),
            "c" | "hazen" => Ok(PercentileMethod::Hazen),
            "d" | "blom" => Ok(PercentileMethod::Blom),
            "e" | "gringorten" => Ok(PercentileMethod::Gringorten),
            other => {
                let value = other.strip_prefix("general:a=").ok_or_else(|| {
                    format!("unknown method `{other}` (expected a|b|c|d|e|general:a=<value>)")
                })?;
                let a: f64 = value
                    .parse()
                    .map_err(|_| format!("`{value}` is not a number"))?;
                PercentileMethod::general(a).map_err(|e| e.to_string())
            }
        }
    }
}

impl Serialize for PercentileMethod {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieMode {
    /// Tied members share the percentile of their average rank.
    #[default]
    RankAverage,
    /// Tied members share the mean of the percentiles of the positions they occupy.
    PercentileAverage,
}

impl FromStr for TieMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "rank-average" | "rank" => Ok(TieMode::RankAverage),
            "percentile-average" | "percentile" => Ok(TieMode::PercentileAverage),
            other => Err(format!(
                "unknown tie mode `{other}` (expected rank-average or percentile-average)"
            )),
        }
    }
}

/// Percentile of rank `i` among `n`.
pub fn plotting_position(
    i: f64,
    n: usize,
    method: PercentileMethod,
) -> Result<f64, PercentileError> {
    if let PercentileMethod::General { a } = method {
        if !(0.0..=0.5).contains(&a) {
            return Err(PercentileError::BadParameter(a));
        }
    }
    if n == 0 || !(1.0..=n as f64).contains(&i) {
        return Err(PercentileError::RankOutOfRange { rank: i, n });
    }
    let (offset, denominator) = method.terms(n as f64);
    Ok(100.0 * (i - offset) / denominator)
}

/// The InCites-style complement: uncited publications are pinned at 100.
pub fn invert(percentile: f64, zero_cited: bool) -> f64 {
    if zero_cited {
        100.0
    } else {
        100.0 - percentile
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercentileScore {
    pub id: String,
    pub citations: u64,
    pub rank: f64,
    pub percentile: f64,
    pub inverted: f64,
}

/// Score every member of a ranked set, in member order.
pub fn score_set(
    ranked: &RankedSet,
    method: PercentileMethod,
    tie_mode: TieMode,
) -> Result<Vec<PercentileScore>, PercentileError> {
    let n = ranked.n();
    let group_scores = ranked
        .groups
        .iter()
        .map(|g| match tie_mode {
            TieMode::RankAverage => plotting_position(g.rank, n, method),
            TieMode::PercentileAverage => {
                let total = g
                    .positions()
                    .map(|pos| plotting_position(pos as f64, n, method))
                    .sum::<Result<f64, _>>()?;
                Ok(total / g.len() as f64)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(ranked
        .members
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let zero = m.citations == 0;
            let percentile = if zero {
                0.0
            } else {
                group_scores[ranked.group_of[k]]
            };
            PercentileScore {
                id: m.id.clone(),
                citations: m.citations,
                rank: ranked.ranks[k],
                percentile,
                inverted: invert(percentile, zero),
            }
        })
        .collect())
}
