//! Record parsing and reference-set construction.
//!
//! Two input dialects are accepted: a comma-separated table with a header
//! line, and JSON lines (one object per line). Both require the columns
//! `id`, `citations`, `field`, `year` and `doctype`; `pages` and
//! `journal_metric` are optional, and any other column is carried along in
//! [`CitationRecord::attributes`] without affecting computation.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

const REQUIRED: [&str; 5] = ["id", "citations", "field", "year", "doctype"];
const OPTIONAL: [&str; 2] = ["pages", "journal_metric"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("input is not valid UTF-8 (line {line})")]
    Encoding { line: u64 },
    #[error("missing required column `{0}`")]
    MissingColumn(&'static str),
    #[error("line {line}: field `{field}`: {message}")]
    Field {
        line: u64,
        field: &'static str,
        message: String,
    },
    #[error("line {line}: negative citations ({value})")]
    NegativeCitations { line: u64, value: String },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: u64, id: String },
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("no records")]
    Empty,
}

/// Supported input dialects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    Delimited,
    JsonLines,
}

impl InputFormat {
    /// Guess the dialect from a file name; anything that is not JSON lines
    /// is treated as a delimited table.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") | Some("json") => InputFormat::JsonLines,
            _ => InputFormat::Delimited,
        }
    }
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" | "delimited" => Ok(InputFormat::Delimited),
            "jsonl" | "json-lines" | "ndjson" => Ok(InputFormat::JsonLines),
            other => Err(format!(
                "unknown input format `{other}` (expected csv or jsonl)"
            )),
        }
    }
}

/// One publication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CitationRecord {
    pub id: String,
    pub citations: u64,
    pub field: String,
    pub year: i64,
    pub doctype: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pages: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub journal_metric: Option<f64>,
    /// Columns the pipeline does not interpret.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: BTreeMap<String, String>,
}

impl CitationRecord {
    pub fn new(
        id: impl Into<String>,
        citations: u64,
        field: impl Into<String>,
        year: i64,
        doctype: impl Into<String>,
    ) -> Self {
        CitationRecord {
            id: id.into(),
            citations,
            field: field.into(),
            year,
            doctype: doctype.into(),
            pages: None,
            journal_metric: None,
            attributes: BTreeMap::new(),
        }
    }

    pub fn with_pages(mut self, pages: u64) -> Self {
        self.pages = Some(pages);
        self
    }

    pub fn with_journal_metric(mut self, metric: f64) -> Self {
        self.journal_metric = Some(metric);
        self
    }

    pub fn key(&self) -> GroupKey {
        GroupKey {
            field: self.field.clone(),
            year: self.year,
            doctype: self.doctype.clone(),
        }
    }
}

/// (field, year, doctype) grouping key. Ordering is lexicographic over the
/// triple, which fixes the iteration order of reference sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GroupKey {
    pub field: String,
    pub year: i64,
    pub doctype: String,
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.field, self.year, self.doctype)
    }
}

/// All records sharing one [`GroupKey`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceSet {
    pub key: GroupKey,
    pub members: Vec<CitationRecord>,
}

impl ReferenceSet {
    /// Build a set from records that must all carry `key`. Returns `None`
    /// for an empty member list or a mismatched key.
    pub fn new(key: GroupKey, members: Vec<CitationRecord>) -> Option<Self> {
        if members.is_empty() || members.iter().any(|m| m.key() != key) {
            return None;
        }
        Some(ReferenceSet { key, members })
    }

    /// Convenience constructor for a single-key set from bare citation counts.
    pub fn from_citations(key: GroupKey, citations: &[u64]) -> Option<Self> {
        let members = citations
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                CitationRecord::new(
                    format!("p{}", i + 1),
                    c,
                    key.field.clone(),
                    key.year,
                    key.doctype.clone(),
                )
            })
            .collect();
        ReferenceSet::new(key, members)
    }

    pub fn n(&self) -> usize {
        self.members.len()
    }
}

/// Parse all records from `input`, in input order.
pub fn parse_records<R: Read>(
    input: R,
    format: InputFormat,
) -> Result<Vec<CitationRecord>, IngestError> {
    let records = match format {
        InputFormat::Delimited => parse_delimited(input)?,
        InputFormat::JsonLines => parse_json_lines(input)?,
    };
    Ok(records)
}

fn parse_delimited<R: Read>(input: R) -> Result<Vec<CitationRecord>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);

    let headers = reader.headers().map_err(|e| csv_error(e, 1))?.clone();
    if headers.iter().all(str::is_empty) {
        return Ok(Vec::new());
    }
    let column = |name: &'static str| headers.iter().position(|h| h.trim() == name);
    let mut required = [0usize; 5];
    for (slot, name) in required.iter_mut().zip(REQUIRED) {
        *slot = column(name).ok_or(IngestError::MissingColumn(name))?;
    }
    let [id_col, cit_col, field_col, year_col, doctype_col] = required;
    let pages_col = column("pages");
    let metric_col = column("journal_metric");
    let extra: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| !REQUIRED.contains(&h.trim()) && !OPTIONAL.contains(&h.trim()))
        .map(|(i, h)| (i, h.to_string()))
        .collect();

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(e, 0))?;
        let line = row.position().map_or(0, |p| p.line());
        let cell = |i: usize| row.get(i).unwrap_or("");

        let id = cell(id_col);
        if id.is_empty() {
            return Err(field_err(line, "id", "empty identifier"));
        }
        let citations = parse_citations(cell(cit_col).trim(), line)?;
        let year = cell(year_col).trim().parse::<i64>().map_err(|_| {
            field_err(
                line,
                "year",
                format!("`{}` is not an integer", cell(year_col)),
            )
        })?;
        let pages = match pages_col.map(|i| cell(i).trim()).filter(|s| !s.is_empty()) {
            Some(s) => Some(parse_pages(s, line)?),
            None => None,
        };
        let journal_metric = match metric_col.map(|i| cell(i).trim()).filter(|s| !s.is_empty()) {
            Some(s) => Some(parse_metric(s, line)?),
            None => None,
        };
        let attributes = extra
            .iter()
            .map(|(i, name)| (name.clone(), cell(*i).to_string()))
            .collect();

        if !seen.insert(id.to_string()) {
            return Err(IngestError::DuplicateId {
                line,
                id: id.to_string(),
            });
        }
        out.push(CitationRecord {
            id: id.to_string(),
            citations,
            field: cell(field_col).to_string(),
            year,
            doctype: cell(doctype_col).to_string(),
            pages,
            journal_metric,
            attributes,
        });
    }
    Ok(out)
}

fn csv_error(err: csv::Error, fallback_line: u64) -> IngestError {
    let line = err.position().map_or(fallback_line, |p| p.line());
    match err.kind() {
        csv::ErrorKind::Io(_) => match err.into_kind() {
            csv::ErrorKind::Io(io) => IngestError::Io(io),
            _ => unreachable!(),
        },
        csv::ErrorKind::Utf8 { .. } => IngestError::Encoding { line },
        _ => IngestError::Malformed {
            line,
            message: err.to_string(),
        },
    }
}

fn parse_json_lines<R: Read>(mut input: R) -> Result<Vec<CitationRecord>, IngestError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (idx, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let line = idx as u64 + 1;
        let text = std::str::from_utf8(raw).map_err(|_| IngestError::Encoding { line })?;
        let text = text.trim();
        if text.is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(text).map_err(|e| IngestError::Malformed {
            line,
            message: e.to_string(),
        })?;
        let Value::Object(map) = value else {
            return Err(IngestError::Malformed {
                line,
                message: "expected a JSON object".into(),
            });
        };
        let get = |name: &'static str| map.get(name).filter(|v| !v.is_null());
        for name in REQUIRED {
            if get(name).is_none() {
                return Err(field_err(line, name, "missing"));
            }
        }

        let id = json_string(get("id").unwrap(), line, "id")?;
        if id.is_empty() {
            return Err(field_err(line, "id", "empty identifier"));
        }
        let citations = match get("citations").unwrap() {
            Value::String(s) => parse_citations(s.trim(), line)?,
            Value::Number(n) => parse_citations(&n.to_string(), line)?,
            other => {
                return Err(field_err(
                    line,
                    "citations",
                    format!("`{other}` is not an integer"),
                ))
            }
        };
        let year = match get("year").unwrap() {
            Value::Number(n) if n.is_i64() => n.as_i64().unwrap(),
            Value::String(s) => s
                .trim()
                .parse()
                .map_err(|_| field_err(line, "year", format!("`{s}` is not an integer")))?,
            other => {
                return Err(field_err(
                    line,
                    "year",
                    format!("`{other}` is not an integer"),
                ))
            }
        };
        let pages = match get("pages") {
            None => None,
            Some(Value::String(s)) if s.trim().is_empty() => None,
            Some(Value::String(s)) => Some(parse_pages(s.trim(), line)?),
            Some(Value::Number(n)) => Some(parse_pages(&n.to_string(), line)?),
            Some(other) => {
                return Err(field_err(
                    line,
                    "pages",
                    format!("`{other}` is not an integer"),
                ))
            }
        };
        let journal_metric = match get("journal_metric") {
            None => None,
            Some(Value::String(s)) if s.trim().is_empty() => None,
            Some(Value::String(s)) => Some(parse_metric(s.trim(), line)?),
            Some(Value::Number(n)) => Some(parse_metric(&n.to_string(), line)?),
            Some(other) => {
                return Err(field_err(
                    line,
                    "journal_metric",
                    format!("`{other}` is not a number"),
                ))
            }
        };
        let attributes = map
            .iter()
            .filter(|(k, _)| !REQUIRED.contains(&k.as_str()) && !OPTIONAL.contains(&k.as_str()))
            .map(|(k, v)| {
                let text = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                (k.clone(), text)
            })
            .collect();

        if !seen.insert(id.clone()) {
            return Err(IngestError::DuplicateId { line, id });
        }
        out.push(CitationRecord {
            id,
            citations,
            field: json_string(get("field").unwrap(), line, "field")?,
            year,
            doctype: json_string(get("doctype").unwrap(), line, "doctype")?,
            pages,
            journal_metric,
            attributes,
        });
    }
    Ok(out)
}

fn json_string(value: &Value, line: u64, field: &'static str) -> Result<String, IngestError> {
    match value {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(field_err(line, field, format!("`{other}` is not a string"))),
    }
}

fn field_err(line: u64, field: &'static str, message: impl Into<String>) -> IngestError {
    IngestError::Field {
        line,
        field,
        message: message.into(),
    }
}

fn parse_citations(text: &str, line: u64) -> Result<u64, IngestError> {
    let digits = text.strip_prefix('+').unwrap_or(text);
    if let Some(rest) = text.strip_prefix('-') {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            if rest.bytes().all(|b| b == b'0') {
                return Ok(0);
            }
            return Err(IngestError::NegativeCitations {
                line,
                value: text.to_string(),
            });
        }
    }
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(field_err(
            line,
            "citations",
            format!("`{text}` is not a base-10 integer"),
        ));
    }
    digits
        .parse()
        .map_err(|_| field_err(line, "citations", format!("`{text}` is out of range")))
}

fn parse_pages(text: &str, line: u64) -> Result<u64, IngestError> {
    match text.parse::<u64>() {
        Ok(p) if p >= 1 => Ok(p),
        _ => Err(field_err(
            line,
            "pages",
            format!("`{text}` is not a positive integer"),
        )),
    }
}

fn parse_metric(text: &str, line: u64) -> Result<f64, IngestError> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(field_err(
            line,
            "journal_metric",
            format!("`{text}` is not a non-negative number"),
        )),
    }
}

/// Serialize records in the given dialect. Re-parsing the output yields the
/// same sequence of records.
pub fn write_records<W: Write>(
    records: &[CitationRecord],
    format: InputFormat,
    out: W,
) -> Result<(), IngestError> {
    match format {
        InputFormat::Delimited => write_delimited(records, out),
        InputFormat::JsonLines => write_json_lines(records, out),
    }
}

fn write_delimited<W: Write>(records: &[CitationRecord], out: W) -> Result<(), IngestError> {
    let extra: BTreeSet<&str> = records
        .iter()
        .flat_map(|r| r.attributes.keys().map(String::as_str))
        .collect();
    let mut writer = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = REQUIRED.to_vec();
    header.extend(OPTIONAL);
    header.extend(extra.iter().copied());
    writer.write_record(&header).map_err(csv_write_error)?;

    for r in records {
        let mut row = vec![
            r.id.clone(),
            r.citations.to_string(),
            r.field.clone(),
            r.year.to_string(),
            r.doctype.clone(),
            r.pages.map(|p| p.to_string()).unwrap_or_default(),
            r.journal_metric.map(|m| m.to_string()).unwrap_or_default(),
        ];
        row.extend(
            extra
                .iter()
                .map(|k| r.attributes.get(*k).cloned().unwrap_or_default()),
        );
        writer.write_record(&row).map_err(csv_write_error)?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_write_error(err: csv::Error) -> IngestError {
    match err.into_kind() {
        csv::ErrorKind::Io(io) => IngestError::Io(io),
        other => IngestError::Malformed {
            line: 0,
            message: format!("{other:?}"),
        },
    }
}

fn write_json_lines<W: Write>(records: &[CitationRecord], mut out: W) -> Result<(), IngestError> {
    for r in records {
        let mut map = serde_json::Map::new();
        for (k, v) in &r.attributes {
            map.insert(k.clone(), Value::String(v.clone()));
        }
        map.insert("id".into(), Value::String(r.id.clone()));
        map.insert("citations".into(), Value::from(r.citations));
        map.insert("field".into(), Value::String(r.field.clone()));
        map.insert("year".into(), Value::from(r.year));
        map.insert("doctype".into(), Value::String(r.doctype.clone()));
        if let Some(p) = r.pages {
            map.insert("pages".into(), Value::from(p));
        }
        if let Some(m) = r.journal_metric {
            map.insert("journal_metric".into(), Value::from(m));
        }
        serde_json::to_writer(&mut out, &Value::Object(map)).map_err(|e| {
            IngestError::Malformed {
                line: 0,
                message: e.to_string(),
            }
        })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Partition records into reference sets. Keys iterate in lexicographic
/// order; members keep their input order.
pub fn build_reference_sets(
    records: &[CitationRecord],
) -> Result<BTreeMap<GroupKey, ReferenceSet>, IngestError> {
    if records.is_empty() {
        return Err(IngestError::Empty);
    }
    let mut groups: BTreeMap<GroupKey, Vec<CitationRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.key()).or_default().push(r.clone());
    }
    Ok(groups
        .into_iter()
        .map(|(key, members)| (key.clone(), ReferenceSet { key, members }))
        .collect())
}
