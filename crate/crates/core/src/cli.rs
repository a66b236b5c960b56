//! Command-line front end.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::gateway::{SystemClock, DEFAULT_PAGE_SIZE};
use crate::network::ExportFormat;
use crate::pipeline::{
    self, BackendKind, ExtractOptions, KeywordsConfig, RunConfig, DEFAULT_MAX_LABELS,
    DEFAULT_TOP_KEYWORDS,
};
use crate::strength::{Measure, Variant};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_BACKEND: i32 = 4;

/// Default daily query allowance.
const DEFAULT_DAILY_LIMIT: u64 = 100;

#[derive(Debug, Parser)]
#[command(
    name = "snippetnet",
    version,
    about = "Extract social networks from search-engine hit counts and snippets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect relations, measure their strength, label them and export the network.
    Extract(ExtractArgs),
    /// Extract ranked keywords per actor from singleton snippets.
    Keywords(KeywordsArgs),
    /// Inspect or clear the query cache.
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
        #[arg(long)]
        cache: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CacheAction {
    Stats,
    Clear,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BackendArg {
    Fixture,
    Live,
}

impl From<BackendArg> for BackendKind {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Fixture => BackendKind::Fixture,
            BackendArg::Live => BackendKind::Live,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MeasureArg {
    Jaccard,
    Dice,
    Overlap,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Jaccard => Measure::Jaccard,
            MeasureArg::Dice => Measure::Dice,
            MeasureArg::Overlap => Measure::Overlap,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Sr,
    Srwk,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Sr => Variant::Sr,
            VariantArg::Srwk => Variant::Srwk,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Dot,
    Graphml,
    Json,
}

impl From<FormatArg> for ExportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Dot => ExportFormat::Dot,
            FormatArg::Graphml => ExportFormat::GraphMl,
            FormatArg::Json => ExportFormat::Json,
        }
    }
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Actor names, one per line.
    #[arg(long)]
    pub actors: PathBuf,
    #[arg(long, value_enum, default_value = "fixture")]
    pub backend: BackendArg,
    /// JSON Lines corpus for the fixture backend.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_DAILY_LIMIT)]
    pub daily_limit: u64,
    #[arg(long, default_value_t = DEFAULT_PAGE_SIZE)]
    pub page_size: usize,
    #[arg(long)]
    pub cache: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value = "jaccard")]
    pub measure: MeasureArg,
    #[arg(long, value_enum, default_value = "sr")]
    pub variant: VariantArg,
    /// Minimum strength for an edge; there is no default.
    #[arg(long)]
    pub threshold: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Defaults to the extension of --out, or json.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// JSON map of actor id to keywords, overriding auto-extraction.
    #[arg(long)]
    pub keywords: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_LABELS)]
    pub max_labels: usize,
    #[arg(long, default_value_t = 1)]
    pub parallelism: usize,
    /// Write per-pair evidence as JSON Lines.
    #[arg(long)]
    pub dump_evidence: Option<PathBuf>,
    /// Run report path; defaults to <out>.report.json.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Extra tokens (one per line) never used as edge labels.
    #[arg(long)]
    pub generic_tokens: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KeywordsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOP_KEYWORDS)]
    pub top_k: usize,
}

fn format_from_extension(path: &Path) -> ExportFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("dot" | "gv") => ExportFormat::Dot,
        Some("graphml") => ExportFormat::GraphMl,
        _ => ExportFormat::Json,
    }
}

impl ExtractArgs {
    pub fn into_config(self) -> Result<RunConfig, Error> {
        if self.max_labels == 0 {
            return Err(Error::Config("max-labels must be positive".into()));
        }
        if self.parallelism == 0 {
            return Err(Error::Config("parallelism must be positive".into()));
        }
        let format = self
            .format
            .map(ExportFormat::from)
            .unwrap_or_else(|| format_from_extension(&self.out));
        let mut options =
            ExtractOptions::new(self.measure.into(), self.variant.into(), self.threshold);
        options.max_labels = self.max_labels;
        options.parallelism = self.parallelism;
        Ok(RunConfig {
            actors_file: self.source.actors,
            backend: self.source.backend.into(),
            corpus_file: self.source.corpus,
            daily_limit: self.source.daily_limit,
            page_size: self.source.page_size,
            cache_path: self.source.cache,
            output: self.out,
            format,
            keywords_file: self.keywords,
            generic_tokens_file: self.generic_tokens,
            dump_evidence: self.dump_evidence,
            report_path: self.report,
            options,
        })
    }
}

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BudgetExhausted { .. } => EXIT_BUDGET,
        Error::Backend(_) => EXIT_BACKEND,
        Error::Config(_)
        | Error::Io { .. }
        | Error::Json { .. }
        | Error::InvalidCorpus { .. }
        | Error::InvalidActor(_)
        | Error::DuplicateActor(_)
        | Error::TooFewActors(_)
        | Error::MissingKeyword(_)
        | Error::EmptyKeyword
        | Error::EmptyPhrase => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

pub fn run(cli: Cli) -> Result<(), Error> {
    let clock = Arc::new(SystemClock);
    match cli.command {
        Command::Extract(args) => {
            let config = args.into_config()?;
            let outcome = pipeline::run_extract(&config, clock)?;
            let r = &outcome.report;
            println!(
                "{} actors, {} pairs, {} detected, {} edges; {} backend calls ({} singleton, {} doubleton, {} keyword), {} cache hits",
                r.actors,
                r.pairs,
                r.detected.unwrap_or(0),
                r.edges.unwrap_or(0),
                r.backend_calls,
                r.singleton_queries,
                r.doubleton_queries,
                r.keyword_queries,
                r.cache_hits
            );
        }
        Command::Keywords(args) => {
            let config = KeywordsConfig {
                actors_file: args.source.actors,
                backend: args.source.backend.into(),
                corpus_file: args.source.corpus,
                daily_limit: args.source.daily_limit,
                page_size: args.source.page_size,
                cache_path: args.source.cache,
                output: args.out,
                top_k: args.top_k,
            };
            let sets = pipeline::run_keywords(&config, clock)?;
            for (id, set) in &sets {
                let top: Vec<&str> = set
                    .keywords
                    .iter()
                    .take(3)
                    .map(|k| k.term.as_str())
                    .collect();
                println!("{id}: {}", top.join(", "));
            }
        }
        Command::Cache { action, cache } => match action {
            CacheAction::Stats => {
                let stats = pipeline::cache_stats(&cache)?;
                println!("entries: {}", stats.entries);
                match stats.ledger {
                    Some(l) => println!(
                        "ledger: day {} used {}/{} total issued {}",
                        l.day_key, l.used_today, l.daily_limit, l.total_issued
                    ),
                    None => println!("ledger: none"),
                }
            }
            CacheAction::Clear => {
                pipeline::cache_clear(&cache)?;
                println!("cleared {}", cache.display());
            }
        },
    }
    Ok(())
}

/// Parses arguments, runs the command and returns the exit status.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
