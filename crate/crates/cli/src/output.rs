//! Rendering of results as comma-separated tables or a single JSON document.

use anyhow::Result;
use serde_json::{json, Value};

use prclass::rank_classes::{esi_membership, Assignment, FeasibilityReport};
use prclass::report::{AssignMode, GroupAnalysis, GroupReport};
use prclass::{GroupKey, PercentileScore};

use crate::config::{OutputFormat, RunConfig};

fn table(header: Vec<String>, rows: Vec<Vec<String>>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(&header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    Ok(String::from_utf8(writer.into_inner()?)?)
}

fn document(value: Value) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

fn assign_name(mode: AssignMode) -> &'static str {
    use prclass::BoundaryPolicy::*;
    match mode {
        AssignMode::Crisp(AssignUp) => "crisp-up",
        AssignMode::Crisp(AssignDown) => "crisp-down",
        AssignMode::Crisp(MissingOnAmbiguity) => "missing",
        AssignMode::Fractional => "fractional",
    }
}

pub fn percentiles(
    config: &RunConfig,
    groups: &[(GroupKey, Vec<PercentileScore>)],
) -> Result<String> {
    let method = config.pipeline.method.to_string();
    match config.output_format {
        OutputFormat::Delimited => {
            let header = [
                "id",
                "citations",
                "rank",
                "percentile",
                "inverted_percentile",
                "method",
            ];
            let rows = groups
                .iter()
                .flat_map(|(_, scores)| scores)
                .map(|s| {
                    vec![
                        s.id.clone(),
                        s.citations.to_string(),
                        s.rank.to_string(),
                        s.percentile.to_string(),
                        s.inverted.to_string(),
                        method.clone(),
                    ]
                })
                .collect();
            table(header.map(String::from).to_vec(), rows)
        }
        OutputFormat::Json => document(json!({
            "method": method,
            "tie_mode": config.pipeline.tie_mode,
            "tie_break": config.pipeline.chain,
            "groups": groups.iter().map(|(key, scores)| json!({
                "key": key,
                "n": scores.len(),
                "scores": scores,
            })).collect::<Vec<_>>(),
        })),
    }
}

pub fn classes(config: &RunConfig, groups: &[(GroupKey, GroupAnalysis)]) -> Result<String> {
    let scheme = &config.pipeline.scheme;
    let fractional = config.pipeline.assign == AssignMode::Fractional;
    match config.output_format {
        OutputFormat::Delimited => {
            let mut header = vec!["id".to_string(), "scheme".to_string()];
            if fractional {
                header.extend(scheme.labels().map(String::from));
            } else {
                header.push("class".into());
            }
            if scheme.nested {
                header.push("thresholds".into());
            }
            let mut rows = Vec::new();
            for (_, analysis) in groups {
                for (assignment, score) in analysis.assignments.iter().zip(&analysis.scores) {
                    let mut row = vec![assignment.id.clone(), scheme.kind.to_string()];
                    match &assignment.assignment {
                        Assignment::Crisp(label) => row.push(label.to_string()),
                        Assignment::Missing => row.push(String::new()),
                        Assignment::Fractional(weights) => {
                            row.extend(weights.iter().map(|(_, w)| w.to_string()))
                        }
                    }
                    if scheme.nested {
                        row.push(esi_membership(score).join(";"));
                    }
                    rows.push(row);
                }
            }
            table(header, rows)
        }
        OutputFormat::Json => document(json!({
            "scheme": scheme.kind,
            "assign": assign_name(config.pipeline.assign),
            "method": config.pipeline.method,
            "groups": groups.iter().map(|(key, analysis)| json!({
                "key": key,
                "n": analysis.ranked.n(),
                "assignments": analysis.assignments.iter().zip(&analysis.scores).map(|(a, s)| {
                    let mut entry = json!({
                        "id": a.id,
                        "percentile": s.percentile,
                    });
                    entry[if fractional { "weights" } else { "class" }] = serde_json::to_value(&a.assignment).unwrap_or(Value::Null);
                    if scheme.nested {
                        entry["thresholds"] = json!(esi_membership(s));
                    }
                    entry
                }).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })),
    }
}

pub fn validation(config: &RunConfig, reports: &[(GroupKey, FeasibilityReport)]) -> Result<String> {
    match config.output_format {
        OutputFormat::Delimited => {
            let header = [
                "field",
                "year",
                "doctype",
                "target",
                "n",
                "largest_tie_group",
                "max_equal_classes",
                "max_classes_by_size",
                "classes",
                "required_n",
                "ties_ok",
                "size_ok",
                "feasible",
                "reason",
            ];
            let rows = reports
                .iter()
                .map(|(key, r)| {
                    vec![
                        key.field.clone(),
                        key.year.to_string(),
                        key.doctype.clone(),
                        r.verdict.target.clone(),
                        r.n.to_string(),
                        r.largest_tie_group.to_string(),
                        r.max_equal_classes.to_string(),
                        r.max_classes_by_size.to_string(),
                        r.verdict.classes.to_string(),
                        r.verdict.required_n.to_string(),
                        r.verdict.ties_ok.to_string(),
                        r.verdict.size_ok.to_string(),
                        r.verdict.feasible.to_string(),
                        r.verdict.reason.clone(),
                    ]
                })
                .collect();
            table(header.map(String::from).to_vec(), rows)
        }
        OutputFormat::Json => document(json!({
            "groups": reports.iter().map(|(key, r)| json!({ "key": key, "report": r })).collect::<Vec<_>>(),
        })),
    }
}

pub fn report(config: &RunConfig, rows: &[(GroupReport, FeasibilityReport)]) -> Result<String> {
    let scheme = &config.pipeline.scheme;
    match config.output_format {
        OutputFormat::Delimited => {
            let mut header: Vec<String> = [
                "field", "year", "doctype", "n", "scheme", "assign", "method", "missing",
            ]
            .map(String::from)
            .to_vec();
            let labels: Vec<&str> = rows
                .first()
                .map(|(r, _)| r.shares.classes.iter().map(|c| c.label).collect())
                .unwrap_or_default();
            for label in &labels {
                for column in [
                    "mass",
                    "share",
                    "expected",
                    "deviation",
                    "z",
                    "p_normal",
                    "p_exact",
                ] {
                    header.push(format!("{label}:{column}"));
                }
            }
            header.extend(
                [
                    "summary",
                    "mean",
                    "sd",
                    "min",
                    "lower_adjacent",
                    "q1",
                    "median",
                    "q3",
                    "upper_adjacent",
                    "max",
                    "feasible",
                ]
                .map(String::from),
            );
            let body = rows
                .iter()
                .map(|(r, feasibility)| {
                    let mut row = vec![
                        r.key.field.clone(),
                        r.key.year.to_string(),
                        r.key.doctype.clone(),
                        r.n.to_string(),
                        scheme.kind.to_string(),
                        assign_name(config.pipeline.assign).to_string(),
                        r.method.to_string(),
                        r.shares.missing.to_string(),
                    ];
                    for c in &r.shares.classes {
                        row.extend([
                            c.mass.to_string(),
                            c.observed.to_string(),
                            c.expected.to_string(),
                            c.deviation.to_string(),
                            c.test.z.to_string(),
                            c.test.p_normal.to_string(),
                            c.test.p_exact.map(|p| p.to_string()).unwrap_or_default(),
                        ]);
                    }
                    let s = &r.summary;
                    row.push(
                        serde_json::to_value(r.summary_scale)?
                            .as_str()
                            .unwrap_or_default()
                            .to_string(),
                    );
                    row.extend(
                        [
                            s.mean,
                            s.sd,
                            s.min,
                            s.lower_adjacent,
                            s.q1,
                            s.median,
                            s.q3,
                            s.upper_adjacent,
                            s.max,
                        ]
                        .map(|v| v.to_string()),
                    );
                    row.push(feasibility.verdict.feasible.to_string());
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()?;
            table(header, body)
        }
        OutputFormat::Json => document(json!({
            "scheme": scheme.kind,
            "assign": assign_name(config.pipeline.assign),
            "method": config.pipeline.method,
            "groups": rows.iter().map(|(r, feasibility)| json!({
                "key": r.key,
                "n": r.n,
                "shares": r.shares,
                "summary_scale": r.summary_scale,
                "summary": r.summary,
                "feasibility": feasibility,
            })).collect::<Vec<_>>(),
        })),
    }
}
