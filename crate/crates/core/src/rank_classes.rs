//! Percentile rank classes.
//!
//! A scheme is an ordered list of percentile intervals `[lower, upper)`,
//! lowest first; the top interval is closed at 100. Publications are placed
//! crisply (one label, or missing when their tie group straddles a class
//! boundary and the policy says so) or fractionally.
//!
//! Fractional weights come from the descending count axis `(0, n]`: a class
//! `[lo, hi)` owns the count interval `(n·(100 − hi)/100, n·(100 − lo)/100]`,
//! and a tie group occupying `(b, b + g]` hands each member
//! `overlap / g` of every class. Total class mass is therefore exactly
//! `n · width / 100`.

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::percentiles::PercentileScore;
use crate::ranking::{RankedSet, TieGroup};

/// Weights at or below this are treated as zero when deciding ambiguity.
const WEIGHT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    /// Top 10% against the rest.
    Pr2_10,
    /// Upper half against lower half.
    Pr2_50,
    /// Six classes: <50%, 50%, 25%, 10%, 5%, 1%.
    Pr6,
    /// Nested thresholds at the 50th, 80th, 90th, 99th, 99.9th and 99.99th percentiles.
    Esi6,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Pr2_10,
        SchemeKind::Pr2_50,
        SchemeKind::Pr6,
        SchemeKind::Esi6,
    ];

    pub fn title(self) -> &'static str {
        match self {
            SchemeKind::Pr2_10 => "PR(2,10)",
            SchemeKind::Pr2_50 => "PR(2,50)",
            SchemeKind::Pr6 => "PR(6)",
            SchemeKind::Esi6 => "ESI(6)",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Pr2_10 => "pr2-10",
            SchemeKind::Pr2_50 => "pr2-50",
            SchemeKind::Pr6 => "pr6",
            SchemeKind::Esi6 => "esi",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pr2-10" | "pr(2,10)" => Ok(SchemeKind::Pr2_10),
            "pr2-50" | "pr(2,50)" => Ok(SchemeKind::Pr2_50),
            "pr6" | "pr(6)" => Ok(SchemeKind::Pr6),
            "esi" | "esi6" | "esi(6)" => Ok(SchemeKind::Esi6),
            other => Err(format!(
                "unknown scheme `{other}` (expected pr2-10, pr2-50, pr6 or esi)"
            )),
        }
    }
}

impl Serialize for SchemeKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One labelled percentile interval `[lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankClass {
    pub label: &'static str,
    pub lower: f64,
    pub upper: f64,
}

impl RankClass {
    const fn new(label: &'static str, lower: f64, upper: f64) -> Self {
        RankClass {
            label,
            lower,
            upper,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

const PR2_10: [RankClass; 2] = [
    RankClass::new("<90%", 0.0, 90.0),
    RankClass::new("10%", 90.0, 100.0),
];
const PR2_50: [RankClass; 2] = [
    RankClass::new("<50%", 0.0, 50.0),
    RankClass::new("50%+", 50.0, 100.0),
];
const PR6: [RankClass; 6] = [
    RankClass::new("<50%", 0.0, 50.0),
    RankClass::new("50%", 50.0, 75.0),
    RankClass::new("25%", 75.0, 90.0),
    RankClass::new("10%", 90.0, 95.0),
    RankClass::new("5%", 95.0, 99.0),
    RankClass::new("1%", 99.0, 100.0),
];
/// Exclusive bands between consecutive ESI thresholds.
const ESI_BANDS: [RankClass; 7] = [
    RankClass::new("<50%", 0.0, 50.0),
    RankClass::new("50%", 50.0, 80.0),
    RankClass::new("20%", 80.0, 90.0),
    RankClass::new("10%", 90.0, 99.0),
    RankClass::new("1%", 99.0, 99.9),
    RankClass::new("0.1%", 99.9, 99.99),
    RankClass::new("0.01%", 99.99, 100.0),
];
/// (threshold, label) pairs, ascending.
pub const ESI_THRESHOLDS: [(f64, &str); 6] = [
    (50.0, "50%"),
    (80.0, "20%"),
    (90.0, "10%"),
    (99.0, "1%"),
    (99.9, "0.1%"),
    (99.99, "0.01%"),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankClassScheme {
    pub kind: SchemeKind,
    /// Partition of [0, 100], lowest class first.
    pub classes: Vec<RankClass>,
    /// Membership is nested thresholds rather than exclusive classes.
    pub nested: bool,
}

impl RankClassScheme {
    pub fn new(kind: SchemeKind) -> Self {
        let classes: &[RankClass] = match kind {
            SchemeKind::Pr2_10 => &PR2_10,
            SchemeKind::Pr2_50 => &PR2_50,
            SchemeKind::Pr6 => &PR6,
            SchemeKind::Esi6 => &ESI_BANDS,
        };
        RankClassScheme {
            kind,
            classes: classes.to_vec(),
            nested: kind == SchemeKind::Esi6,
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.classes.iter().map(|c| c.label)
    }

    /// Index of the class containing `percentile`. Values above 100 land in
    /// the top class, values below 0 in the bottom one.
    pub fn class_index(&self, percentile: f64) -> usize {
        self.classes
            .iter()
            .rposition(|c| percentile >= c.lower)
            .unwrap_or(0)
    }

    pub fn min_width(&self) -> f64 {
        self.classes
            .iter()
            .map(RankClass::width)
            .fold(f64::INFINITY, f64::min)
    }

    /// Number of equal-size classes whose size matches the smallest class.
    pub fn equivalent_classes(&self) -> usize {
        (100.0 / self.min_width()).round() as usize
    }

    pub fn equal_widths(&self) -> bool {
        let w = self.classes[0].width();
        self.classes.iter().all(|c| (c.width() - w).abs() < 1e-9)
    }

    /// Count interval `(from, to]` on the descending axis owned by class `idx`.
    fn count_interval(&self, idx: usize, n: f64) -> (f64, f64) {
        let c = &self.classes[idx];
        (n * (100.0 - c.upper) / 100.0, n * (100.0 - c.lower) / 100.0)
    }
}

impl From<SchemeKind> for RankClassScheme {
    fn from(kind: SchemeKind) -> Self {
        RankClassScheme::new(kind)
    }
}

/// How a crisp assignment resolves a tie group that straddles a boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryPolicy {
    AssignUp,
    AssignDown,
    MissingOnAmbiguity,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Assignment {
    Crisp(&'static str),
    Missing,
    /// (label, weight) in scheme class order.
    Fractional(Vec<(&'static str, f64)>),
}

impl Assignment {
    pub fn label(&self) -> Option<&'static str> {
        match self {
            Assignment::Crisp(l) => Some(l),
            _ => None,
        }
    }

    pub fn weight(&self, label: &str) -> f64 {
        match self {
            Assignment::Crisp(l) => f64::from(u8::from(*l == label)),
            Assignment::Missing => 0.0,
            Assignment::Fractional(w) => {
                w.iter().find(|(l, _)| *l == label).map_or(0.0, |(_, w)| *w)
            }
        }
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Assignment::Crisp(l) => s.serialize_str(l),
            Assignment::Missing => s.serialize_none(),
            Assignment::Fractional(weights) => {
                let mut map = s.serialize_map(Some(weights.len()))?;
                for (l, w) in weights {
                    map.serialize_entry(l, w)?;
                }
                map.end()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassAssignment {
    pub id: String,
    pub scheme: SchemeKind,
    pub assignment: Assignment,
}

/// Per-class share of a tie group, in scheme class order. A publication is
/// ambiguous iff its group's span covers more than one class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassSpan {
    pub weights: Vec<f64>,
}

impl ClassSpan {
    pub fn of_group(group: &TieGroup, n: usize, scheme: &RankClassScheme) -> Self {
        let n_f = n as f64;
        let g = group.len() as f64;
        let from = (n - group.below - group.len()) as f64;
        let to = from + g;
        let weights = (0..scheme.classes.len())
            .map(|idx| {
                let (lo, hi) = scheme.count_interval(idx, n_f);
                (to.min(hi) - from.max(lo)).max(0.0) / g
            })
            .collect();
        ClassSpan { weights }
    }

    /// A span that sits wholly in one class.
    pub fn single(scheme: &RankClassScheme, idx: usize) -> Self {
        let mut weights = vec![0.0; scheme.classes.len()];
        weights[idx] = 1.0;
        ClassSpan { weights }
    }

    fn touched(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > WEIGHT_EPS)
            .map(|(i, _)| i)
    }

    pub fn is_ambiguous(&self) -> bool {
        self.touched().nth(1).is_some()
    }
}

/// Crisp class for one score. Unambiguous publications go to the class
/// containing their percentile; ambiguous ones follow `policy`.
pub fn classify_crisp(
    score: &PercentileScore,
    scheme: &RankClassScheme,
    policy: BoundaryPolicy,
    span: &ClassSpan,
) -> ClassAssignment {
    let assignment = if span.is_ambiguous() {
        match policy {
            BoundaryPolicy::AssignUp => {
                Assignment::Crisp(scheme.classes[span.touched().next_back().unwrap()].label)
            }
            BoundaryPolicy::AssignDown => {
                Assignment::Crisp(scheme.classes[span.touched().next().unwrap()].label)
            }
            BoundaryPolicy::MissingOnAmbiguity => Assignment::Missing,
        }
    } else {
        Assignment::Crisp(scheme.classes[scheme.class_index(score.percentile)].label)
    };
    ClassAssignment {
        id: score.id.clone(),
        scheme: scheme.kind,
        assignment,
    }
}

/// Crisp assignment of a whole scored set. `scores` must be in the member
/// order of `ranked`, as produced by [`crate::percentiles::score_set`].
pub fn assign_crisp(
    ranked: &RankedSet,
    scores: &[PercentileScore],
    scheme: &RankClassScheme,
    policy: BoundaryPolicy,
) -> Vec<ClassAssignment> {
    let spans: Vec<ClassSpan> = ranked
        .groups
        .iter()
        .map(|g| ClassSpan::of_group(g, ranked.n(), scheme))
        .collect();
    scores
        .iter()
        .enumerate()
        .map(|(k, s)| classify_crisp(s, scheme, policy, &spans[ranked.group_of[k]]))
        .collect()
}

/// Fractional assignment by count-interval overlap, in member order.
pub fn assign_fractional(ranked: &RankedSet, scheme: &RankClassScheme) -> Vec<ClassAssignment> {
    let spans: Vec<ClassSpan> = ranked
        .groups
        .iter()
        .map(|g| ClassSpan::of_group(g, ranked.n(), scheme))
        .collect();
    ranked
        .members
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let span = &spans[ranked.group_of[k]];
            ClassAssignment {
                id: m.id.clone(),
                scheme: scheme.kind,
                assignment: Assignment::Fractional(
                    scheme.labels().zip(span.weights.iter().copied()).collect(),
                ),
            }
        })
        .collect()
}

/// ESI thresholds met by a percentile ("equal to or larger than"), lowest first.
pub fn esi_membership(score: &PercentileScore) -> Vec<&'static str> {
    ESI_THRESHOLDS
        .iter()
        .filter(|(t, _)| score.percentile >= *t)
        .map(|(_, l)| *l)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    /// What was checked, e.g. `PR(6)` or `5 equal classes`.
    pub target: String,
    /// Equal-size classes the target amounts to (100 / smallest width for schemes).
    pub classes: usize,
    /// Minimum set size demanded by the size rule.
    pub required_n: usize,
    /// No tie group is larger than one class.
    pub ties_ok: bool,
    /// Enough publications for the number of classes.
    pub size_ok: bool,
    pub feasible: bool,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub n: usize,
    pub largest_tie_group: usize,
    /// floor(n / largest tie group)
    pub max_equal_classes: usize,
    /// n + 1
    pub max_classes_by_size: usize,
    pub verdict: Verdict,
}

fn verdict(ranked: &RankedSet, target: String, classes: usize, unequal: bool) -> FeasibilityReport {
    let n = ranked.n();
    let largest = ranked.largest_tie_group();
    // Unequal schemes are sized by their smallest class and need one more
    // publication than that class count; equal ones need classes <= n + 1.
    let required_n = if unequal {
        classes + 1
    } else {
        classes.saturating_sub(1).max(1)
    };
    let size_ok = n >= required_n;
    let ties_ok = largest <= 1 || largest * classes <= n;

    let mut reasons = Vec::new();
    if !size_ok {
        reasons.push(if unequal {
            format!("n = {n} is below the {required_n} publications without ties needed to resolve the smallest class ({classes} equivalent classes)")
        } else {
            format!("{classes} classes exceed n + 1 = {}", n + 1)
        });
    }
    if !ties_ok {
        reasons.push(format!(
            "a tie group of {largest} publications exceeds the class size n / {classes} = {:.4}; at most {} equal-size classes can be formed unequivocally",
            n as f64 / classes as f64,
            n / largest.max(1)
        ));
    }
    let feasible = size_ok && ties_ok;
    let reason = if feasible {
        format!("{classes} classes supportable with n = {n} and largest tie group {largest}")
    } else {
        reasons.join("; ")
    };

    FeasibilityReport {
        n,
        largest_tie_group: largest,
        max_equal_classes: n / largest.max(1),
        max_classes_by_size: n + 1,
        verdict: Verdict {
            target,
            classes,
            required_n,
            ties_ok,
            size_ok,
            feasible,
            reason,
        },
    }
}

/// Check whether `scheme` can be applied to `ranked`.
pub fn validate_feasibility(ranked: &RankedSet, scheme: &RankClassScheme) -> FeasibilityReport {
    let unequal = !scheme.equal_widths();
    verdict(
        ranked,
        scheme.kind.title().to_string(),
        scheme.equivalent_classes(),
        unequal,
    )
}

/// Check whether `classes` equal-size classes (quantiles) can be formed.
pub fn validate_equal_classes(ranked: &RankedSet, classes: usize) -> FeasibilityReport {
    verdict(ranked, format!("{classes} equal classes"), classes, false)
}
