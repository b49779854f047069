//! Class shares against expected values, proportion tests, and box-plot
//! style summaries of percentile distributions.

use serde::Serialize;
use statrs::distribution::{Binomial, Discrete};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::percentiles::PercentileScore;
use crate::rank_classes::{
    Assignment, ClassAssignment, RankClassScheme, SchemeKind, ESI_THRESHOLDS,
};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("empty sample")]
    Empty,
    #[error("observed {k} outside [0, {n}]")]
    ObservedOutOfRange { k: f64, n: u64 },
    #[error("null proportion {0} outside (0, 1)")]
    BadNull(f64),
    #[error("assignment for `{id}` uses scheme {found}, expected {expected}")]
    MixedSchemes {
        id: String,
        found: SchemeKind,
        expected: SchemeKind,
    },
}

/// What a proportion test counts: whole publications, or fractional mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observed {
    Count(u64),
    Mass(f64),
}

impl Observed {
    fn value(self) -> f64 {
        match self {
            Observed::Count(k) => k as f64,
            Observed::Mass(m) => m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProportionTestResult {
    pub observed: f64,
    pub n: u64,
    pub p0: f64,
    pub z: f64,
    /// Two-sided, normal approximation.
    pub p_normal: f64,
    /// Two-sided exact binomial; counts only.
    pub p_exact: Option<f64>,
}

/// One-sample test of an observed proportion against `p0`.
pub fn proportion_test(
    observed: Observed,
    n: u64,
    p0: f64,
) -> Result<ProportionTestResult, StatsError> {
    if n == 0 {
        return Err(StatsError::Empty);
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(StatsError::BadNull(p0));
    }
    let k = observed.value();
    if !(0.0..=n as f64).contains(&k) {
        return Err(StatsError::ObservedOutOfRange { k, n });
    }
    let nf = n as f64;
    let z = (k / nf - p0) / (p0 * (1.0 - p0) / nf).sqrt();
    let p_normal = erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0);
    let p_exact = match observed {
        Observed::Count(k) => Some(binomial_two_sided(k, n, p0)),
        Observed::Mass(_) => None,
    };
    Ok(ProportionTestResult {
        observed: k,
        n,
        p0,
        z,
        p_normal,
        p_exact,
    })
}

/// Sum of the probabilities of all outcomes no more likely than `k`.
fn binomial_two_sided(k: u64, n: u64, p0: f64) -> f64 {
    let dist = Binomial::new(p0, n).expect("p0 checked above");
    let pk = dist.pmf(k);
    // relative slack so outcomes equal to pk up to rounding are included
    let cutoff = pk * (1.0 + 1e-7);
    let total: f64 = (0..=n).map(|j| dist.pmf(j)).filter(|&p| p <= cutoff).sum();
    total.min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassShare {
    pub label: &'static str,
    /// Publication count (crisp) or summed weight (fractional).
    pub mass: f64,
    /// Percent of n.
    pub observed: f64,
    /// Percent of n expected under a uniform percentile distribution.
    pub expected: f64,
    pub deviation: f64,
    pub test: ProportionTestResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassShareReport {
    pub scheme: SchemeKind,
    pub n: usize,
    pub fractional: bool,
    /// Shares are nested thresholds and do not sum to 100.
    pub nested: bool,
    /// Publications left unassigned (missing-on-ambiguity).
    pub missing: usize,
    pub classes: Vec<ClassShare>,
}

fn class_share(
    label: &'static str,
    mass: f64,
    expected: f64,
    n: usize,
    observed: Observed,
) -> Result<ClassShare, StatsError> {
    let share = 100.0 * mass / n as f64;
    Ok(ClassShare {
        label,
        mass,
        observed: share,
        expected,
        deviation: share - expected,
        test: proportion_test(observed, n as u64, expected / 100.0)?,
    })
}

/// Observed class shares of one group against the class widths.
pub fn class_shares(
    assignments: &[ClassAssignment],
    scheme: &RankClassScheme,
    n: usize,
) -> Result<ClassShareReport, StatsError> {
    if n == 0 {
        return Err(StatsError::Empty);
    }
    if let Some(a) = assignments.iter().find(|a| a.scheme != scheme.kind) {
        return Err(StatsError::MixedSchemes {
            id: a.id.clone(),
            found: a.scheme,
            expected: scheme.kind,
        });
    }
    let fractional = assignments
        .iter()
        .any(|a| matches!(a.assignment, Assignment::Fractional(_)));
    let missing = assignments
        .iter()
        .filter(|a| a.assignment == Assignment::Missing)
        .count();

    let classes = scheme
        .classes
        .iter()
        .map(|c| {
            let mass: f64 = assignments
                .iter()
                .map(|a| a.assignment.weight(c.label))
                .sum();
            let observed = if fractional {
                Observed::Mass(mass)
            } else {
                Observed::Count(mass.round() as u64)
            };
            class_share(c.label, mass, c.width(), n, observed)
        })
        .collect::<Result<_, _>>()?;

    Ok(ClassShareReport {
        scheme: scheme.kind,
        n,
        fractional,
        nested: false,
        missing,
        classes,
    })
}

/// Shares of publications meeting each ESI threshold.
pub fn esi_shares(scores: &[PercentileScore]) -> Result<ClassShareReport, StatsError> {
    let n = scores.len();
    if n == 0 {
        return Err(StatsError::Empty);
    }
    let classes = ESI_THRESHOLDS
        .iter()
        .map(|&(threshold, label)| {
            let count = scores.iter().filter(|s| s.percentile >= threshold).count();
            class_share(
                label,
                count as f64,
                100.0 - threshold,
                n,
                Observed::Count(count as u64),
            )
        })
        .collect::<Result<_, _>>()?;
    Ok(ClassShareReport {
        scheme: SchemeKind::Esi6,
        n,
        fractional: false,
        nested: true,
        missing: 0,
        classes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator; 0 for a single value).
    pub sd: f64,
    pub min: f64,
    pub lower_adjacent: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub upper_adjacent: f64,
    pub max: f64,
}

/// Linear interpolation between order statistics at position 1 + (n − 1)·q.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Box-plot summary. Adjacent values are the most extreme observations
/// within 1.5 IQR of the quartiles; a whisker never reaches inside the box.
pub fn distribution_summary(values: &[f64]) -> Result<DistributionSummary, StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();

    let mean = sorted.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let q1 = quantile(&sorted, 0.25);
    let median = quantile(&sorted, 0.5);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let low_fence = q1 - 1.5 * iqr;
    let high_fence = q3 + 1.5 * iqr;
    let lower_adjacent = sorted
        .iter()
        .copied()
        .find(|&v| v >= low_fence)
        .unwrap_or(q1)
        .min(q1);
    let upper_adjacent = sorted
        .iter()
        .rev()
        .copied()
        .find(|&v| v <= high_fence)
        .unwrap_or(q3)
        .max(q3);

    Ok(DistributionSummary {
        n,
        mean,
        sd,
        min: sorted[0],
        lower_adjacent,
        q1,
        median,
        q3,
        upper_adjacent,
        max: sorted[n - 1],
    })
}
