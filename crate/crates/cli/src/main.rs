//! `prclass`: citation percentiles and percentile rank classes from the
//! command line.
//!
//! Exit codes: 0 success, 1 input or validation failure, 2 configuration
//! error (including an undersized set for the chosen scheme), 3 when
//! `validate` finds the scheme infeasible.

mod config;
mod output;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use prclass::{
    build_reference_sets, parse_records, validate_equal_classes, validate_feasibility,
    CitationRecord, GroupKey, InputFormat, ReferenceSet,
};

use config::{FileConfig, RunConfig, Selectors};

#[derive(Debug, Parser)]
#[command(
    name = "prclass",
    version,
    about = "Tie-aware citation percentiles and percentile rank classes"
)]
struct Cli {
    /// TOML file with default selectors; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rank each reference set and emit percentiles.
    Percentiles(Common),
    /// Assign publications to percentile rank classes.
    Classes {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        classes: ClassArgs,
        /// Classify even when the set is too small for the scheme.
        #[arg(long)]
        force: bool,
    },
    /// Check whether a scheme (or a number of equal classes) is supportable.
    Validate {
        #[command(flatten)]
        common: Common,
        /// pr2-10 | pr2-50 | pr6 | esi
        #[arg(long)]
        scheme: Option<String>,
        /// Check K equal-size classes instead of a named scheme.
        #[arg(long, value_name = "K", conflicts_with = "scheme")]
        equal_classes: Option<usize>,
    },
    /// Per-group class shares, expected values, tests and distribution summary.
    Report {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        classes: ClassArgs,
        /// Distribution summary over plain or inverted percentiles.
        #[arg(long)]
        summary: Option<String>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Input files (comma-separated table or JSON lines).
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// csv | jsonl; inferred from the file extension when omitted.
    #[arg(long)]
    format: Option<String>,
    /// a | b | c | d | e | general:a=<value>
    #[arg(long)]
    method: Option<String>,
    /// rank-average | percentile-average
    #[arg(long)]
    tie_mode: Option<String>,
    /// Comma-separated chain of citations-per-page, journal-metric.
    #[arg(long)]
    tie_break: Option<String>,
    /// delimited | json
    #[arg(long, env = "PRCLASS_OUTPUT_FORMAT")]
    output_format: Option<String>,
    /// Write to this file instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClassArgs {
    /// pr2-10 | pr2-50 | pr6 | esi
    #[arg(long)]
    scheme: Option<String>,
    /// crisp-up | crisp-down | missing | fractional
    #[arg(long)]
    assign: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Input(anyhow::Error),
    Config(anyhow::Error),
    Infeasible,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Config(_) => 2,
            Failure::Infeasible => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Input(e) | Failure::Config(e) => eprintln!("error: {e:#}"),
                Failure::Infeasible => {}
            }
            ExitCode::from(failure.code())
        }
    }
}

fn selectors(common: &Common) -> Selectors {
    Selectors {
        format: common.format.clone(),
        method: common.method.clone(),
        tie_mode: common.tie_mode.clone(),
        tie_break: common.tie_break.clone(),
        output_format: common.output_format.clone(),
        output: common.output.clone(),
        ..Selectors::default()
    }
}

fn resolve(
    cli_config: Option<&Path>,
    common: &Common,
    flags: Selectors,
) -> Result<RunConfig, Failure> {
    let file = match cli_config {
        Some(path) => FileConfig::load(path).map_err(Failure::Config)?,
        None => FileConfig::default(),
    };
    RunConfig::resolve(common.inputs.clone(), flags, file).map_err(Failure::Config)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config_path = cli.config.as_deref();
    match cli.command {
        Command::Percentiles(common) => {
            let config = resolve(config_path, &common, selectors(&common))?;
            let sets = load(&config)?;
            let mut groups = Vec::new();
            for set in sets.values() {
                let ranked = config
                    .pipeline
                    .rank(set)
                    .map_err(|e| Failure::Input(e.into()))?;
                let scores = config
                    .pipeline
                    .score(&ranked)
                    .map_err(|e| Failure::Input(e.into()))?;
                groups.push((set.key.clone(), scores));
            }
            emit(&config, output::percentiles(&config, &groups))
        }
        Command::Classes {
            common,
            classes,
            force,
        } => {
            let flags = Selectors {
                scheme: classes.scheme,
                assign: classes.assign,
                force,
                ..selectors(&common)
            };
            let config = resolve(config_path, &common, flags)?;
            let sets = load(&config)?;
            check_size(&config, &sets)?;
            let mut groups = Vec::new();
            for set in sets.values() {
                let analysis = config
                    .pipeline
                    .analyze(set)
                    .map_err(|e| Failure::Input(e.into()))?;
                groups.push((set.key.clone(), analysis));
            }
            emit(&config, output::classes(&config, &groups))
        }
        Command::Validate {
            common,
            scheme,
            equal_classes,
        } => {
            let flags = Selectors {
                scheme,
                ..selectors(&common)
            };
            let config = resolve(config_path, &common, flags)?;
            if equal_classes == Some(0) {
                return Err(Failure::Config(anyhow::anyhow!(
                    "--equal-classes must be at least 1"
                )));
            }
            let sets = load(&config)?;
            let mut reports = Vec::new();
            for set in sets.values() {
                let ranked = config
                    .pipeline
                    .rank(set)
                    .map_err(|e| Failure::Input(e.into()))?;
                let report = match equal_classes {
                    Some(k) => validate_equal_classes(&ranked, k),
                    None => validate_feasibility(&ranked, &config.pipeline.scheme),
                };
                eprintln!(
                    "{}: n = {}, largest tie group = {}, max equal-size classes: {}, classes permitted by size: {}; {} {}: {}",
                    set.key,
                    report.n,
                    report.largest_tie_group,
                    report.max_equal_classes,
                    report.max_classes_by_size,
                    report.verdict.target,
                    if report.verdict.feasible { "feasible" } else { "infeasible" },
                    report.verdict.reason
                );
                reports.push((set.key.clone(), report));
            }
            emit(&config, output::validation(&config, &reports))?;
            if reports.iter().all(|(_, r)| r.verdict.feasible) {
                Ok(())
            } else {
                Err(Failure::Infeasible)
            }
        }
        Command::Report {
            common,
            classes,
            summary,
        } => {
            let flags = Selectors {
                scheme: classes.scheme,
                assign: classes.assign,
                summary,
                ..selectors(&common)
            };
            let config = resolve(config_path, &common, flags)?;
            let sets = load(&config)?;
            let mut rows = Vec::new();
            for set in sets.values() {
                let report = config
                    .pipeline
                    .report(set)
                    .map_err(|e| Failure::Input(e.into()))?;
                let ranked = config
                    .pipeline
                    .rank(set)
                    .map_err(|e| Failure::Input(e.into()))?;
                let feasibility = validate_feasibility(&ranked, &config.pipeline.scheme);
                rows.push((report, feasibility));
            }
            emit(&config, output::report(&config, &rows))
        }
    }
}

fn load(config: &RunConfig) -> Result<BTreeMap<GroupKey, ReferenceSet>, Failure> {
    let mut records: Vec<CitationRecord> = Vec::new();
    for path in &config.inputs {
        let format = config
            .format
            .unwrap_or_else(|| InputFormat::from_path(path));
        let file = std::fs::File::open(path)
            .with_context(|| format!("opening {}", path.display()))
            .map_err(Failure::Input)?;
        let parsed = parse_records(std::io::BufReader::new(file), format)
            .with_context(|| path.display().to_string())
            .map_err(Failure::Input)?;
        records.extend(parsed);
    }
    build_reference_sets(&records).map_err(|e| Failure::Input(e.into()))
}

/// Refuse sets too small for the scheme's smallest class unless forced.
fn check_size(config: &RunConfig, sets: &BTreeMap<GroupKey, ReferenceSet>) -> Result<(), Failure> {
    if config.force {
        return Ok(());
    }
    for set in sets.values() {
        let ranked = config
            .pipeline
            .rank(set)
            .map_err(|e| Failure::Input(e.into()))?;
        let report = validate_feasibility(&ranked, &config.pipeline.scheme);
        if !report.verdict.size_ok {
            return Err(Failure::Config(anyhow::anyhow!(
                "{}: {} needs at least {} publications, group has {}: {} (pass --force to classify anyway)",
                set.key,
                report.verdict.target,
                report.verdict.required_n,
                report.n,
                report.verdict.reason
            )));
        }
    }
    Ok(())
}

/// Write the rendered document to the output file or standard output. Files
/// are written through a temporary sibling and renamed into place.
fn emit(config: &RunConfig, rendered: anyhow::Result<String>) -> Result<(), Failure> {
    let text = rendered.map_err(Failure::Input)?;
    match &config.output {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .context("writing standard output")
                .map_err(Failure::Input)
        }
        Some(path) => {
            let dir = path
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir)
                .with_context(|| format!("creating temporary file in {}", dir.display()))
                .map_err(Failure::Input)?;
            tmp.write_all(text.as_bytes())
                .context("writing output")
                .map_err(Failure::Input)?;
            tmp.persist(path)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(Failure::Input)?;
            Ok(())
        }
    }
}
