//! Fixtures and independent oracles shared by the integration tests.
//!
//! Nothing here calls into the ranking, percentile or class-assignment code
//! paths it is used to check.
#![allow(dead_code)]

use prclass::{CitationRecord, GroupKey, ReferenceSet};

/// The 41-publication sample: (citations, printed rank, printed percentiles
/// under methods a..e), most-cited first.
pub const SAMPLE: [(u64, f64, [f64; 5]); 41] = [
    (15, 40.5, [98.78049, 96.34146, 97.56097, 97.86585, 97.42218]),
    (15, 40.5, [98.78049, 96.34146, 97.56097, 97.86585, 97.42218]),
    (14, 37.5, [91.46342, 89.02439, 90.2439, 90.54878, 90.12646]),
    (14, 37.5, [91.46342, 89.02439, 90.2439, 90.54878, 90.12646]),
    (14, 37.5, [91.46342, 89.02439, 90.2439, 90.54878, 90.12646]),
    (14, 37.5, [91.46342, 89.02439, 90.2439, 90.54878, 90.12646]),
    (12, 33.5, [81.70731, 79.2683, 80.48781, 80.79269, 80.39883]),
    (12, 33.5, [81.70731, 79.2683, 80.48781, 80.79269, 80.39883]),
    (12, 33.5, [81.70731, 79.2683, 80.48781, 80.79269, 80.39883]),
    (12, 33.5, [81.70731, 79.2683, 80.48781, 80.79269, 80.39883]),
    (10, 30.0, [73.17073, 70.7317, 71.95122, 72.2561, 71.88716]),
    (10, 30.0, [73.17073, 70.7317, 71.95122, 72.2561, 71.88716]),
    (10, 30.0, [73.17073, 70.7317, 71.95122, 72.2561, 71.88716]),
    (9, 28.0, [68.29269, 65.85366, 67.07317, 67.37805, 67.02335]),
    (8, 27.0, [65.85366, 63.41463, 64.63415, 64.93903, 64.59144]),
    (7, 26.0, [63.41463, 60.97561, 62.19512, 62.5, 62.15953]),
    (6, 25.0, [60.97561, 58.53659, 59.7561, 60.06097, 59.72763]),
    (5, 23.0, [56.09756, 53.65854, 54.87805, 55.18293, 54.86381]),
    (5, 23.0, [56.09756, 53.65854, 54.87805, 55.18293, 54.86381]),
    (5, 23.0, [56.09756, 53.65854, 54.87805, 55.18293, 54.86381]),
    (4, 21.0, [51.21951, 48.78049, 50.0, 50.30488, 50.0]),
    (3, 18.0, [43.90244, 41.46341, 42.68293, 42.9878, 42.70428]),
    (3, 18.0, [43.90244, 41.46341, 42.68293, 42.9878, 42.70428]),
    (3, 18.0, [43.90244, 41.46341, 42.68293, 42.9878, 42.70428]),
    (3, 18.0, [43.90244, 41.46341, 42.68293, 42.9878, 42.70428]),
    (3, 18.0, [43.90244, 41.46341, 42.68293, 42.9878, 42.70428]),
    (2, 13.5, [32.92683, 30.4878, 31.70732, 32.0122, 31.7607]),
    (2, 13.5, [32.92683, 30.4878, 31.70732, 32.0122, 31.7607]),
    (2, 13.5, [32.92683, 30.4878, 31.70732, 32.0122, 31.7607]),
    (2, 13.5, [32.92683, 30.4878, 31.70732, 32.0122, 31.7607]),
    (1, 8.0, [19.5122, 17.07317, 18.29268, 18.59756, 18.38521]),
    (1, 8.0, [19.5122, 17.07317, 18.29268, 18.59756, 18.38521]),
    (1, 8.0, [19.5122, 17.07317, 18.29268, 18.59756, 18.38521]),
    (1, 8.0, [19.5122, 17.07317, 18.29268, 18.59756, 18.38521]),
    (1, 8.0, [19.5122, 17.07317, 18.29268, 18.59756, 18.38521]),
    (1, 8.0, [19.5122, 17.07317, 18.29268, 18.59756, 18.38521]),
    (1, 8.0, [19.5122, 17.07317, 18.29268, 18.59756, 18.38521]),
    (0, 2.5, [0.0, 0.0, 0.0, 0.0, 0.0]),
    (0, 2.5, [0.0, 0.0, 0.0, 0.0, 0.0]),
    (0, 2.5, [0.0, 0.0, 0.0, 0.0, 0.0]),
    (0, 2.5, [0.0, 0.0, 0.0, 0.0, 0.0]),
];

/// Golden comparison tolerance: the table prints five decimals.
pub const GOLDEN_TOL: f64 = 5e-5;

pub fn key() -> GroupKey {
    GroupKey {
        field: "CHEM".into(),
        year: 2005,
        doctype: "Article".into(),
    }
}

/// The sample as a reference set; member `k` is row number `41 − k`.
pub fn sample_set() -> ReferenceSet {
    let members = SAMPLE
        .iter()
        .enumerate()
        .map(|(k, (c, _, _))| {
            CitationRecord::new(format!("no{}", 41 - k), *c, "CHEM", 2005, "Article")
        })
        .collect();
    ReferenceSet::new(key(), members).unwrap()
}

pub fn set_of(citations: &[u64]) -> ReferenceSet {
    ReferenceSet::from_citations(key(), citations).unwrap()
}

pub fn sample_csv() -> String {
    let mut text = String::from("id,citations,field,year,doctype\n");
    for (k, (c, _, _)) in SAMPLE.iter().enumerate() {
        text.push_str(&format!("no{},{c},CHEM,2005,Article\n", 41 - k));
    }
    text
}

/// Average rank by counting: (#strictly below) + (#equal + 1) / 2.
pub fn rank_oracle(values: &[u64], x: u64) -> f64 {
    let below = values.iter().filter(|&&v| v < x).count() as f64;
    let equal = values.iter().filter(|&&v| v == x).count() as f64;
    below + (equal + 1.0) / 2.0
}

/// Cumulative top-share route to fractional weights: the weight a member of
/// a group with `above` members ranked higher and size `g` carries into the
/// top `share` percent is clamp((n·share/100 − above) / g, 0, 1). Class
/// weights are differences of consecutive cumulative memberships.
pub fn fractional_oracle(values: &[u64], x: u64, bounds_low_first: &[(f64, f64)]) -> Vec<f64> {
    let n = values.len() as f64;
    let above = values.iter().filter(|&&v| v > x).count() as f64;
    let g = values.iter().filter(|&&v| v == x).count() as f64;
    let top = |share: f64| ((n * share / 100.0 - above) / g).clamp(0.0, 1.0);
    bounds_low_first
        .iter()
        .map(|&(lower, upper)| top(100.0 - lower) - top(100.0 - upper))
        .collect()
}

/// Exact binomial coefficient.
pub fn choose(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, j| acc * (n - j) as u128 / (j + 1) as u128)
}

/// Two-sided exact binomial p-value by enumerating every outcome.
pub fn binomial_enumeration(k: u64, n: u64, p: f64) -> f64 {
    let pmf: Vec<f64> = (0..=n)
        .map(|j| choose(n, j) as f64 * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32))
        .collect();
    let pk = pmf[k as usize];
    pmf.iter()
        .filter(|&&q| q <= pk * (1.0 + 1e-7))
        .sum::<f64>()
        .min(1.0)
}

/// Two-sided normal tail 2·(1 − Φ(|z|)) by composite Simpson integration of
/// the density over [0, |z|].
pub fn normal_two_sided_oracle(z: f64) -> f64 {
    let z = z.abs();
    let steps = 20_000;
    let h = z / steps as f64;
    let pdf = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = pdf(0.0) + pdf(z);
    for s in 1..steps {
        acc += pdf(s as f64 * h) * if s % 2 == 1 { 4.0 } else { 2.0 };
    }
    let half_mass = acc * h / 3.0;
    1.0 - 2.0 * half_mass
}
