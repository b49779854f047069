//! Tie-aware citation percentiles and percentile rank classes.
//!
//! The pipeline runs in five stages, each in its own module:
//!
//! 1. [`ingest`] parses publication records and groups them into reference
//!    sets keyed by subject field, publication year and document type.
//! 2. [`ranking`] orders a reference set by citations, averaging ranks over
//!    ties and optionally refining ties with covariates.
//! 3. [`percentiles`] maps ranks to percentiles with a choice of plotting
//!    positions, applying the zero-citation rule.
//! 4. [`rank_classes`] buckets percentiles into rank classes (crisp, missing
//!    or fractional assignment) and checks whether a scheme is supportable.
//! 5. [`stats`] summarises class shares against their expected values,
//!    tests proportions, and describes percentile distributions.
//!
//! [`report`] ties the stages together for one reference set.

pub mod ingest;
pub mod percentiles;
pub mod rank_classes;
pub mod ranking;
pub mod report;
pub mod stats;

pub use ingest::{
    build_reference_sets, parse_records, write_records, CitationRecord, GroupKey, IngestError,
    InputFormat, ReferenceSet,
};
pub use percentiles::{
    invert, plotting_position, score_set, PercentileError, PercentileMethod, PercentileScore,
    TieMode,
};
pub use rank_classes::{
    assign_crisp, assign_fractional, classify_crisp, esi_membership, validate_equal_classes,
    validate_feasibility, Assignment, BoundaryPolicy, ClassAssignment, ClassSpan,
    FeasibilityReport, RankClass, RankClassScheme, SchemeKind,
};
pub use ranking::{
    effective_scores, rank_with_ties, RankedSet, RankingError, TieBreakChain, TieBreakKey,
};
pub use stats::{
    class_shares, distribution_summary, esi_shares, proportion_test, ClassShareReport,
    DistributionSummary, Observed, ProportionTestResult, StatsError,
};
