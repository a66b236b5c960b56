//! End-to-end runs: relation detection, optional keyword stage, strength
//! measurement, URL labeling, network assembly and the run report.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::disambiguation::{
    extract_keywords, fetch_actor_context, ActorContext, KeywordOverrides, KeywordSet,
};
use crate::gateway::live::{LiveBackend, LiveConfig};
use crate::gateway::{
    write_atomic, BudgetLedger, Clock, CorpusStats, FixtureCorpus, Gateway, QueryCache, QueryStats,
    SearchBackend,
};
use crate::labels::UrlLabeler;
use crate::network::{
    build_network, export, pair_key, ExportFormat, PairSignals, Provenance, SocialNetwork,
};
use crate::relation::{detect_all, parse_actors, Actor, RelationEvidence};
use crate::strength::{sr, sr_with_keywords, Measure, Variant};
use crate::{text, Error, Result};

pub const DEFAULT_MAX_LABELS: usize = 5;
pub const DEFAULT_TOP_KEYWORDS: usize = 10;

/// Options that shape the network independently of where evidence comes from.
#[derive(Debug, Clone)]
pub struct ExtractOptions {
    pub measure: Measure,
    pub variant: Variant,
    pub threshold: f64,
    pub max_labels: usize,
    pub parallelism: usize,
    pub keywords: KeywordOverrides,
    pub labeler: UrlLabeler,
}

impl ExtractOptions {
    pub fn new(measure: Measure, variant: Variant, threshold: f64) -> Self {
        Self {
            measure,
            variant,
            threshold,
            max_labels: DEFAULT_MAX_LABELS,
            parallelism: 1,
            keywords: KeywordOverrides::default(),
            labeler: UrlLabeler::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub evidence: Vec<RelationEvidence>,
    pub network: SocialNetwork,
}

/// Runs every stage against `gateway`. Queries already answered stay cached
/// in the gateway even when a later stage fails.
pub fn extract<B: SearchBackend>(
    actors: &[Actor],
    gateway: &Gateway<B>,
    opts: &ExtractOptions,
) -> Result<Extraction> {
    let evidence = detect_all(actors, gateway, opts.parallelism)?;
    let detected: Vec<&RelationEvidence> = evidence.iter().filter(|e| e.detected).collect();

    // Singleton context q(a) for every actor in a detected pair, once each.
    let involved: BTreeSet<&Actor> = detected.iter().flat_map(|e| [&e.a, &e.b]).collect();
    let mut contexts: BTreeMap<&str, ActorContext> = BTreeMap::new();
    for actor in &involved {
        contexts.insert(&actor.id, fetch_actor_context(actor, gateway)?);
    }

    let keywords = match opts.variant {
        Variant::Sr => BTreeMap::new(),
        Variant::Srwk => choose_keywords(&involved, &contexts, gateway, opts)?,
    };

    let mut signals = PairSignals::default();
    for ev in &detected {
        let key = pair_key(&ev.a.id, &ev.b.id);
        let score = match opts.variant {
            Variant::Sr => sr(ev, gateway, opts.measure)?,
            Variant::Srwk => sr_with_keywords(
                &ev.a,
                &keywords[ev.a.id.as_str()],
                &ev.b,
                &keywords[ev.b.id.as_str()],
                gateway,
                opts.measure,
            )?,
        };
        let usr = opts.labeler.usr(
            &contexts[ev.a.id.as_str()].snippets,
            &contexts[ev.b.id.as_str()].snippets,
        );
        let labels = opts.labeler.label_edge(&ev.l_ab, opts.max_labels);
        signals.scores.insert(key.clone(), score);
        signals.usr.insert(key.clone(), usr);
        signals.labels.insert(key, labels);
    }

    let provenance = Provenance {
        backend: gateway.backend().name(),
        measure: opts.measure,
        variant: opts.variant,
        threshold: opts.threshold,
        page_size: gateway.page_size(),
        generated_at: None,
    };
    let network = build_network(actors, &evidence, &signals, opts.threshold, provenance)?;
    Ok(Extraction { evidence, network })
}

fn choose_keywords<B: SearchBackend>(
    involved: &BTreeSet<&Actor>,
    contexts: &BTreeMap<&str, ActorContext>,
    gateway: &Gateway<B>,
    opts: &ExtractOptions,
) -> Result<BTreeMap<String, String>> {
    let mut stats: Option<Option<CorpusStats>> = None;
    let mut chosen = BTreeMap::new();
    for actor in involved {
        let kw = match opts.keywords.first(&actor.id) {
            Some(kw) => kw.to_string(),
            None => {
                let stats = stats.get_or_insert_with(|| gateway.backend().corpus_stats());
                let ctx = &contexts[actor.id.as_str()];
                let set = extract_keywords(
                    &actor.id,
                    &ctx.snippets,
                    ctx.hit_count,
                    stats.as_ref(),
                    DEFAULT_TOP_KEYWORDS,
                );
                set.top_keyword(actor)
                    .map(str::to_string)
                    .ok_or_else(|| Error::MissingKeyword(actor.id.clone()))?
            }
        };
        chosen.insert(actor.id.clone(), kw);
    }
    Ok(chosen)
}

/// Keyword sets for every actor, from its singleton snippets.
pub fn keywords_for<B: SearchBackend>(
    actors: &[Actor],
    gateway: &Gateway<B>,
    top_k: usize,
) -> Result<BTreeMap<String, KeywordSet>> {
    let stats = gateway.backend().corpus_stats();
    let mut out = BTreeMap::new();
    for actor in actors {
        let ctx = fetch_actor_context(actor, gateway)?;
        let set = extract_keywords(
            &actor.id,
            &ctx.snippets,
            ctx.hit_count,
            stats.as_ref(),
            top_k,
        );
        out.insert(actor.id.clone(), set);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Fixture,
    Live,
}

/// Where a run reads inputs and writes its artifacts.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub actors_file: PathBuf,
    pub backend: BackendKind,
    pub corpus_file: Option<PathBuf>,
    pub daily_limit: u64,
    pub page_size: usize,
    pub cache_path: PathBuf,
    pub output: PathBuf,
    pub format: ExportFormat,
    pub keywords_file: Option<PathBuf>,
    pub generic_tokens_file: Option<PathBuf>,
    pub dump_evidence: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
    pub options: ExtractOptions,
}

impl RunConfig {
    pub fn report_path(&self) -> PathBuf {
        self.report_path
            .clone()
            .unwrap_or_else(|| append_to_path(&self.output, ".report.json"))
    }
}

/// Ledger file kept next to the cache file.
pub fn ledger_path(cache_path: &Path) -> PathBuf {
    append_to_path(cache_path, ".ledger.json")
}

fn append_to_path(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryBound {
    pub total_queries: u64,
    /// `3 n^2`: the cost of querying both singletons and the doubleton for every ordered pair.
    pub naive_bound: u64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub status: String,
    pub actors: usize,
    pub pairs: usize,
    pub detected: Option<usize>,
    pub edges: Option<usize>,
    pub singleton_queries: u64,
    pub doubleton_queries: u64,
    pub keyword_queries: u64,
    pub backend_calls: u64,
    pub cache_hits: u64,
    pub ledger: BudgetLedger,
    pub query_bound: QueryBound,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
}

impl RunReport {
    fn new(
        status: &str,
        actors: usize,
        extraction: Option<&Extraction>,
        stats: QueryStats,
        ledger: BudgetLedger,
        started_at: DateTime<Utc>,
        finished_at: DateTime<Utc>,
    ) -> Self {
        let n = actors as u64;
        let naive_bound = 3 * n * n;
        Self {
            status: status.to_string(),
            actors,
            pairs: actors * actors.saturating_sub(1) / 2,
            detected: extraction.map(|x| x.evidence.iter().filter(|e| e.detected).count()),
            edges: extraction.map(|x| x.network.edges.len()),
            singleton_queries: stats.singleton_queries,
            doubleton_queries: stats.doubleton_queries,
            keyword_queries: stats.keyword_queries,
            backend_calls: stats.backend_calls,
            cache_hits: stats.cache_hits,
            ledger,
            query_bound: QueryBound {
                total_queries: stats.backend_calls,
                naive_bound,
                holds: stats.backend_calls < naive_bound,
            },
            started_at,
            finished_at,
        }
    }
}

fn read_actors(path: &Path) -> Result<Vec<Actor>> {
    let contents = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let actors = parse_actors(&contents)?;
    if actors.len() < 2 {
        return Err(Error::TooFewActors(actors.len()));
    }
    Ok(actors)
}

/// Gateway over the configured backend, with cache and ledger loaded from disk.
pub fn open_gateway(
    backend: BackendKind,
    corpus_file: Option<&Path>,
    cache_path: &Path,
    daily_limit: u64,
    page_size: usize,
    clock: Arc<dyn Clock>,
) -> Result<Gateway<Box<dyn SearchBackend>>> {
    if page_size == 0 {
        return Err(Error::Config("page size must be positive".into()));
    }
    let backend: Box<dyn SearchBackend> = match backend {
        BackendKind::Fixture => {
            let path = corpus_file.ok_or_else(|| {
                Error::Config("the fixture backend requires a corpus file".into())
            })?;
            Box::new(FixtureCorpus::load(path)?)
        }
        BackendKind::Live => Box::new(LiveBackend::new(LiveConfig::from_env()?)?),
    };
    let cache = QueryCache::load(cache_path)?;
    let ledger = BudgetLedger::load(ledger_path(cache_path), daily_limit, clock.today())?;
    Ok(Gateway::new(backend, cache, ledger)
        .with_page_size(page_size)
        .with_clock(clock))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    write_atomic(path, bytes)
}

fn write_report(path: &Path, report: &RunReport) -> Result<()> {
    let mut bytes =
        serde_json::to_vec_pretty(report).map_err(|e| Error::json("serializing report", e))?;
    bytes.push(b'\n');
    write_file(path, &bytes)
}

pub fn evidence_jsonl(evidence: &[RelationEvidence]) -> Vec<u8> {
    let mut out = Vec::new();
    for ev in evidence {
        serde_json::to_writer(&mut out, ev).expect("evidence serializes to JSON");
        out.push(b'\n');
    }
    out
}

/// Artifacts of a completed `extract` run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub extraction: Extraction,
    pub report: RunReport,
}

/// Full `extract` command: always persists cache, ledger and report, even
/// when the run stops on an exhausted budget or a backend failure.
pub fn run_extract(config: &RunConfig, clock: Arc<dyn Clock>) -> Result<RunOutcome> {
    let started_at = clock.now();
    let actors = read_actors(&config.actors_file)?;
    let mut opts = config.options.clone();
    if !(0.0..=1.0).contains(&opts.threshold) {
        return Err(Error::Config(format!(
            "threshold must be within [0, 1], got {}",
            opts.threshold
        )));
    }
    if let Some(path) = &config.keywords_file {
        opts.keywords = KeywordOverrides::load(path)?;
    }
    if let Some(path) = &config.generic_tokens_file {
        let contents = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        opts.labeler = opts
            .labeler
            .with_generic_tokens(text::parse_token_list(&contents));
    }
    let gateway = open_gateway(
        config.backend,
        config.corpus_file.as_deref(),
        &config.cache_path,
        config.daily_limit,
        config.page_size,
        clock.clone(),
    )?;

    let result = extract(&actors, &gateway, &opts);
    gateway.persist(&config.cache_path, ledger_path(&config.cache_path))?;
    let status = match &result {
        Ok(_) => "ok",
        Err(Error::BudgetExhausted { .. }) => "budget_exhausted",
        Err(Error::Backend(_)) => "backend_error",
        Err(_) => "failed",
    };
    let mut report = RunReport::new(
        status,
        actors.len(),
        result.as_ref().ok(),
        gateway.stats(),
        gateway.ledger(),
        started_at,
        clock.now(),
    );
    let mut extraction = match result {
        Ok(x) => x,
        Err(e) => {
            write_report(&config.report_path(), &report)?;
            return Err(e);
        }
    };

    extraction.network.provenance.generated_at = Some(started_at);
    write_file(&config.output, &export(&extraction.network, config.format))?;
    if let Some(path) = &config.dump_evidence {
        write_file(path, &evidence_jsonl(&extraction.evidence))?;
    }
    report.finished_at = clock.now();
    write_report(&config.report_path(), &report)?;
    Ok(RunOutcome { extraction, report })
}

#[derive(Debug, Clone)]
pub struct KeywordsConfig {
    pub actors_file: PathBuf,
    pub backend: BackendKind,
    pub corpus_file: Option<PathBuf>,
    pub daily_limit: u64,
    pub page_size: usize,
    pub cache_path: PathBuf,
    pub output: PathBuf,
    pub top_k: usize,
}

/// Full `keywords` command: writes a JSON map from actor id to keyword set.
pub fn run_keywords(
    config: &KeywordsConfig,
    clock: Arc<dyn Clock>,
) -> Result<BTreeMap<String, KeywordSet>> {
    let contents = std::fs::read_to_string(&config.actors_file)
        .map_err(|e| Error::io(&config.actors_file, e))?;
    let actors = parse_actors(&contents)?;
    if config.top_k == 0 {
        return Err(Error::Config("top-k must be positive".into()));
    }
    let gateway = open_gateway(
        config.backend,
        config.corpus_file.as_deref(),
        &config.cache_path,
        config.daily_limit,
        config.page_size,
        clock,
    )?;
    let result = keywords_for(&actors, &gateway, config.top_k);
    gateway.persist(&config.cache_path, ledger_path(&config.cache_path))?;
    let sets = result?;
    let mut bytes =
        serde_json::to_vec_pretty(&sets).map_err(|e| Error::json("serializing keywords", e))?;
    bytes.push(b'\n');
    write_file(&config.output, &bytes)?;
    Ok(sets)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CacheStats {
    pub entries: usize,
    pub ledger: Option<BudgetLedger>,
}

pub fn cache_stats(cache_path: &Path) -> Result<CacheStats> {
    let cache = QueryCache::load(cache_path)?;
    Ok(CacheStats {
        entries: cache.len(),
        ledger: BudgetLedger::read(ledger_path(cache_path))?,
    })
}

/// Empties the cache file. The ledger is kept: clearing results does not
/// refund spent queries.
pub fn cache_clear(cache_path: &Path) -> Result<()> {
    if cache_path.is_dir() {
        return Err(Error::io(
            cache_path,
            std::io::Error::new(std::io::ErrorKind::InvalidInput, "is a directory"),
        ));
    }
    QueryCache::new().save(cache_path)
}
