//! End-to-end analysis of one reference set.

use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::ingest::{GroupKey, ReferenceSet};
use crate::percentiles::{score_set, PercentileError, PercentileMethod, PercentileScore, TieMode};
use crate::rank_classes::{
    assign_crisp, assign_fractional, BoundaryPolicy, ClassAssignment, RankClassScheme, SchemeKind,
};
use crate::ranking::{rank_with_ties, RankedSet, RankingError, TieBreakChain};
use crate::stats::{
    class_shares, distribution_summary, esi_shares, ClassShareReport, DistributionSummary,
    StatsError,
};

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("{key}: {source}")]
    Ranking { key: GroupKey, source: RankingError },
    #[error("{key}: {source}")]
    Percentile {
        key: GroupKey,
        source: PercentileError,
    },
    #[error("{key}: {source}")]
    Stats { key: GroupKey, source: StatsError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssignMode {
    Crisp(BoundaryPolicy),
    Fractional,
}

impl FromStr for AssignMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "crisp-up" => Ok(AssignMode::Crisp(BoundaryPolicy::AssignUp)),
            "crisp-down" => Ok(AssignMode::Crisp(BoundaryPolicy::AssignDown)),
            "missing" => Ok(AssignMode::Crisp(BoundaryPolicy::MissingOnAmbiguity)),
            "fractional" => Ok(AssignMode::Fractional),
            other => Err(format!(
                "unknown assignment mode `{other}` (expected crisp-up, crisp-down, missing or fractional)"
            )),
        }
    }
}

/// Which percentile scale the distribution summary describes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SummaryScale {
    Plain,
    #[default]
    Inverted,
}

impl FromStr for SummaryScale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "plain" => Ok(SummaryScale::Plain),
            "inverted" => Ok(SummaryScale::Inverted),
            other => Err(format!(
                "unknown summary scale `{other}` (expected plain or inverted)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    pub method: PercentileMethod,
    pub tie_mode: TieMode,
    pub chain: TieBreakChain,
    pub scheme: RankClassScheme,
    pub assign: AssignMode,
    pub summary: SummaryScale,
}

impl Default for Pipeline {
    fn default() -> Self {
        Pipeline {
            method: PercentileMethod::Hazen,
            tie_mode: TieMode::RankAverage,
            chain: TieBreakChain::none(),
            scheme: RankClassScheme::new(SchemeKind::Pr2_10),
            assign: AssignMode::Fractional,
            summary: SummaryScale::Inverted,
        }
    }
}

/// Ranked, scored and classified reference set.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAnalysis {
    pub ranked: RankedSet,
    pub scores: Vec<PercentileScore>,
    pub assignments: Vec<ClassAssignment>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupReport {
    pub key: GroupKey,
    pub n: usize,
    pub method: PercentileMethod,
    pub shares: ClassShareReport,
    pub summary_scale: SummaryScale,
    pub summary: DistributionSummary,
}

impl Pipeline {
    pub fn rank(&self, set: &ReferenceSet) -> Result<RankedSet, ReportError> {
        rank_with_ties(set, &self.chain).map_err(|source| ReportError::Ranking {
            key: set.key.clone(),
            source,
        })
    }

    pub fn score(&self, ranked: &RankedSet) -> Result<Vec<PercentileScore>, ReportError> {
        score_set(ranked, self.method, self.tie_mode).map_err(|source| ReportError::Percentile {
            key: ranked.key.clone(),
            source,
        })
    }

    pub fn analyze(&self, set: &ReferenceSet) -> Result<GroupAnalysis, ReportError> {
        let ranked = self.rank(set)?;
        let scores = self.score(&ranked)?;
        let assignments = match self.assign {
            AssignMode::Crisp(policy) => assign_crisp(&ranked, &scores, &self.scheme, policy),
            AssignMode::Fractional => assign_fractional(&ranked, &self.scheme),
        };
        Ok(GroupAnalysis {
            ranked,
            scores,
            assignments,
        })
    }

    pub fn report(&self, set: &ReferenceSet) -> Result<GroupReport, ReportError> {
        let analysis = self.analyze(set)?;
        let stats_err = |source| ReportError::Stats {
            key: set.key.clone(),
            source,
        };
        let shares = if self.scheme.nested {
            esi_shares(&analysis.scores)
        } else {
            class_shares(&analysis.assignments, &self.scheme, set.n())
        }
        .map_err(stats_err)?;
        let values: Vec<f64> = analysis
            .scores
            .iter()
            .map(|s| match self.summary {
                SummaryScale::Plain => s.percentile,
                SummaryScale::Inverted => s.inverted,
            })
            .collect();
        let summary = distribution_summary(&values).map_err(stats_err)?;
        Ok(GroupReport {
            key: set.key.clone(),
            n: set.n(),
            method: self.method,
            shares,
            summary_scale: self.summary,
            summary,
        })
    }
}
