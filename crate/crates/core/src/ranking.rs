//! Rank-frequency ordering with average ranks for ties.
//!
//! Ranks ascend with citations: the least-cited member has rank 1 and the
//! most-cited has rank n. Members that remain tied share the mean of the
//! integer positions they occupy, so the rank sum is always n(n+1)/2.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{CitationRecord, GroupKey, ReferenceSet};

#[derive(Debug, Error, PartialEq)]
pub enum RankingError {
    #[error("member `{id}` is tied on citations but has no {key} value")]
    MissingCovariate { id: String, key: TieBreakKey },
}

/// Secondary sort keys applied among members with equal citation counts.
/// Higher key values rank higher.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreakKey {
    /// citations / pages
    CitationsPerPage,
    /// Journal prestige score, highest first.
    JournalMetric,
}

impl TieBreakKey {
    fn value(self, record: &CitationRecord) -> Option<f64> {
        match self {
            TieBreakKey::CitationsPerPage => {
                record.pages.map(|p| record.citations as f64 / p as f64)
            }
            TieBreakKey::JournalMetric => record.journal_metric,
        }
    }
}

impl fmt::Display for TieBreakKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieBreakKey::CitationsPerPage => "citations-per-page",
            TieBreakKey::JournalMetric => "journal-metric",
        })
    }
}

impl FromStr for TieBreakKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "citations-per-page" | "pages" => Ok(TieBreakKey::CitationsPerPage),
            "journal-metric" | "journal" => Ok(TieBreakKey::JournalMetric),
            other => Err(format!(
                "unknown tie-break key `{other}` (expected citations-per-page or journal-metric)"
            )),
        }
    }
}

/// Ordered tie-break keys. The empty chain ranks on citations alone.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TieBreakChain(pub Vec<TieBreakKey>);

impl TieBreakChain {
    pub fn none() -> Self {
        TieBreakChain(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn keys(&self) -> &[TieBreakKey] {
        &self.0
    }
}

impl FromStr for TieBreakChain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() || s.trim() == "none" {
            return Ok(TieBreakChain::none());
        }
        s.split(',')
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map(TieBreakChain)
    }
}

/// The score a member is ordered by: its citation count, then each chain
/// key in turn.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveScore {
    pub citations: u64,
    pub tie_keys: Vec<f64>,
}

impl EffectiveScore {
    fn cmp_ascending(&self, other: &Self) -> Ordering {
        self.citations.cmp(&other.citations).then_with(|| {
            self.tie_keys
                .iter()
                .zip(&other.tie_keys)
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

/// Members sharing one effective score, and therefore one rank.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TieGroup {
    pub score: EffectiveScore,
    /// Indices into [`RankedSet::members`], sorted by id.
    pub members: Vec<usize>,
    pub rank: f64,
    /// Number of members ranked strictly below this group.
    pub below: usize,
}

impl TieGroup {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Integer positions (1-based, ascending) the group occupies.
    pub fn positions(&self) -> std::ops::RangeInclusive<usize> {
        self.below + 1..=self.below + self.members.len()
    }
}

/// A reference set with ranks attached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedSet {
    pub key: GroupKey,
    /// Members in their original order.
    pub members: Vec<CitationRecord>,
    /// `ranks[k]` is the rank of `members[k]`.
    pub ranks: Vec<f64>,
    /// Tie groups in ascending rank order.
    pub groups: Vec<TieGroup>,
    /// `group_of[k]` indexes the group of `members[k]` in `groups`.
    pub group_of: Vec<usize>,
    pub chain: TieBreakChain,
}

impl RankedSet {
    pub fn n(&self) -> usize {
        self.members.len()
    }

    pub fn largest_tie_group(&self) -> usize {
        self.groups.iter().map(TieGroup::len).max().unwrap_or(0)
    }

    pub fn group_for(&self, member: usize) -> &TieGroup {
        &self.groups[self.group_of[member]]
    }
}

/// Effective ordering scores, one per member in input order.
///
/// Chain keys are only required on members that share their citation count
/// with another member; elsewhere a missing covariate is reported as NaN
/// since it never takes part in a comparison.
pub fn effective_scores(
    set: &ReferenceSet,
    chain: &TieBreakChain,
) -> Result<Vec<EffectiveScore>, RankingError> {
    let mut multiplicity = std::collections::HashMap::new();
    for m in &set.members {
        *multiplicity.entry(m.citations).or_insert(0usize) += 1;
    }
    set.members
        .iter()
        .map(|m| {
            let tied = multiplicity[&m.citations] > 1;
            let tie_keys = chain
                .keys()
                .iter()
                .map(|&key| match key.value(m) {
                    Some(v) => Ok(v),
                    None if tied => Err(RankingError::MissingCovariate {
                        id: m.id.clone(),
                        key,
                    }),
                    None => Ok(f64::NAN),
                })
                .collect::<Result<_, _>>()?;
            Ok(EffectiveScore {
                citations: m.citations,
                tie_keys,
            })
        })
        .collect()
}

/// Rank a reference set, refining equal-citation ties with `chain` and
/// averaging ranks over whatever ties remain.
pub fn rank_with_ties(
    set: &ReferenceSet,
    chain: &TieBreakChain,
) -> Result<RankedSet, RankingError> {
    let scores = effective_scores(set, chain)?;
    let n = set.members.len();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        scores[a]
            .cmp_ascending(&scores[b])
            .then_with(|| set.members[a].id.cmp(&set.members[b].id))
    });

    let mut ranks = vec![0.0; n];
    let mut group_of = vec![0; n];
    let mut groups = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n
            && scores[order[end]]
                .cmp_ascending(&scores[order[start]])
                .is_eq()
        {
            end += 1;
        }
        // mean of positions start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        let members = order[start..end].to_vec();
        for &m in &members {
            ranks[m] = rank;
            group_of[m] = groups.len();
        }
        groups.push(TieGroup {
            score: scores[order[start]].clone(),
            members,
            rank,
            below: start,
        });
        start = end;
    }

    Ok(RankedSet {
        key: set.key.clone(),
        members: set.members.clone(),
        ranks,
        groups,
        group_of,
        chain: chain.clone(),
    })
}
