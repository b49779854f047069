//! Run configuration: optional TOML file, overridden by flags.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

use prclass::report::{AssignMode, Pipeline, SummaryScale};
use prclass::{InputFormat, PercentileMethod, RankClassScheme, SchemeKind, TieBreakChain, TieMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Delimited,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "delimited" | "csv" => Ok(OutputFormat::Delimited),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!(
                "unknown output format `{other}` (expected delimited or json)"
            )),
        }
    }
}

/// Keys accepted in a config file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub format: Option<String>,
    pub method: Option<String>,
    pub tie_mode: Option<String>,
    pub tie_break: Option<String>,
    pub scheme: Option<String>,
    pub assign: Option<String>,
    pub summary: Option<String>,
    pub output_format: Option<String>,
    pub output: Option<PathBuf>,
    pub force: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Raw selectors as given on the command line.
#[derive(Debug, Default, Clone)]
pub struct Selectors {
    pub format: Option<String>,
    pub method: Option<String>,
    pub tie_mode: Option<String>,
    pub tie_break: Option<String>,
    pub scheme: Option<String>,
    pub assign: Option<String>,
    pub summary: Option<String>,
    pub output_format: Option<String>,
    pub output: Option<PathBuf>,
    pub force: bool,
}

/// Fully resolved configuration for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub format: Option<InputFormat>,
    pub pipeline: Pipeline,
    pub output_format: OutputFormat,
    pub output: Option<PathBuf>,
    pub force: bool,
}

fn pick<T: std::str::FromStr<Err = String>>(
    name: &str,
    flag: Option<String>,
    file: Option<String>,
    default: T,
) -> anyhow::Result<T> {
    match flag.or(file) {
        Some(text) => text
            .parse()
            .map_err(|e: String| anyhow::anyhow!("--{name}: {e}")),
        None => Ok(default),
    }
}

impl RunConfig {
    pub fn resolve(
        inputs: Vec<PathBuf>,
        flags: Selectors,
        file: FileConfig,
    ) -> anyhow::Result<Self> {
        let format = match flags.format.or(file.format) {
            Some(text) => Some(
                text.parse()
                    .map_err(|e: String| anyhow::anyhow!("--format: {e}"))?,
            ),
            None => None,
        };
        let scheme: SchemeKind = pick("scheme", flags.scheme, file.scheme, SchemeKind::Pr2_10)?;
        let method: PercentileMethod =
            pick("method", flags.method, file.method, PercentileMethod::Hazen)?;
        let tie_mode: TieMode = pick(
            "tie-mode",
            flags.tie_mode,
            file.tie_mode,
            TieMode::RankAverage,
        )?;
        let chain: TieBreakChain = pick(
            "tie-break",
            flags.tie_break,
            file.tie_break,
            TieBreakChain::none(),
        )?;
        let assign: AssignMode = pick("assign", flags.assign, file.assign, AssignMode::Fractional)?;
        let summary: SummaryScale = pick(
            "summary",
            flags.summary,
            file.summary,
            SummaryScale::Inverted,
        )?;
        let output_format = pick(
            "output-format",
            flags.output_format,
            file.output_format,
            OutputFormat::Delimited,
        )?;

        Ok(RunConfig {
            inputs,
            format,
            pipeline: Pipeline {
                method,
                tie_mode,
                chain,
                scheme: RankClassScheme::new(scheme),
                assign,
                summary,
            },
            output_format,
            output: flags.output.or(file.output),
            force: flags.force || file.force.unwrap_or(false),
        })
    }
}
