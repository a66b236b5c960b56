//! Per-actor keyword extraction used to disambiguate names in SRwK queries.
//!
//! Keywords are ranked by tf·idf over the actor's singleton snippets:
//! `tf` counts occurrences across titles and abstracts, and
//! `idf = ln(N / (1 + df))` uses the backend's document frequencies when it
//! can supply them. Without them, ranking falls back to `tf` alone.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::gateway::{CorpusStats, Gateway, Query, QueryKind, SearchBackend};
use crate::relation::Actor;
use crate::snippet::Snippet;
use crate::{text, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Stable,
    Flexible,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeTag {
    pub term: String,
    pub kind: AttributeKind,
}

/// Email addresses are stable attributes; every other term is flexible.
pub fn classify_attribute(term: &str) -> AttributeTag {
    let kind = if is_email(term) {
        AttributeKind::Stable
    } else {
        AttributeKind::Flexible
    };
    AttributeTag {
        term: term.to_string(),
        kind,
    }
}

fn is_email(term: &str) -> bool {
    let Some((local, domain)) = term.split_once('@') else {
        return false;
    };
    !local.is_empty()
        && !domain.is_empty()
        && !domain.contains('@')
        && !term.chars().any(char::is_whitespace)
}

/// Email-like strings appearing in the snippets' titles and abstracts, in
/// first-seen order.
pub fn find_stable_attributes(snippets: &[Snippet]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut found = Vec::new();
    for s in snippets {
        for word in s
            .title
            .split_whitespace()
            .chain(s.abstract_text.split_whitespace())
        {
            let word = word.trim_matches(|c: char| !c.is_alphanumeric());
            if is_email(word) && seen.insert(word.to_lowercase()) {
                found.push(word.to_lowercase());
            }
        }
    }
    found
}

/// Singleton evidence for one actor: `L_a` and `H_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActorContext {
    pub snippets: Vec<Snippet>,
    pub hit_count: u64,
}

/// Issues `q(a)` (cache first) and parses the returned snippets.
pub fn fetch_actor_context<B: SearchBackend>(
    actor: &Actor,
    gateway: &Gateway<B>,
) -> Result<ActorContext> {
    let q = Query::new([&actor.name])?;
    let result = gateway.execute(&q, QueryKind::Singleton)?;
    Ok(ActorContext {
        snippets: result
            .snippets
            .iter()
            .filter_map(|r| Snippet::parse(r).ok())
            .collect(),
        hit_count: result.hit_count,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keyword {
    pub term: String,
    pub score: f64,
    pub kind: AttributeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordSet {
    pub actor: String,
    pub keywords: Vec<Keyword>,
    #[serde(default)]
    pub stable_attributes: Vec<String>,
    pub singleton_count: u64,
    #[serde(skip)]
    pub source_snippets: Vec<Snippet>,
}

impl KeywordSet {
    /// Highest-ranked keyword that is not part of the actor's own name.
    pub fn top_keyword(&self, actor: &Actor) -> Option<&str> {
        let own: HashSet<String> = text::words(&actor.name).collect();
        self.keywords
            .iter()
            .map(|k| k.term.as_str())
            .find(|t| !own.contains(*t))
    }
}

/// Ranks the tokens of `snippets` by tf·idf and keeps the top `k`.
pub fn extract_keywords(
    actor: &str,
    snippets: &[Snippet],
    singleton_count: u64,
    stats: Option<&CorpusStats>,
    k: usize,
) -> KeywordSet {
    let mut tf: BTreeMap<String, u64> = BTreeMap::new();
    for s in snippets {
        for token in text::tokenize(&s.title)
            .into_iter()
            .chain(text::tokenize(&s.abstract_text))
        {
            *tf.entry(token).or_insert(0) += 1;
        }
    }

    let mut keywords: Vec<Keyword> = tf
        .into_iter()
        .map(|(term, count)| {
            let score = match stats {
                Some(st) => {
                    let df = st.doc_freq.get(&term).copied().unwrap_or(0);
                    count as f64 * idf(st.universe_size, df)
                }
                None => count as f64,
            };
            let kind = classify_attribute(&term).kind;
            Keyword { term, score, kind }
        })
        .collect();
    keywords.sort_by(|x, y| {
        y.score
            .total_cmp(&x.score)
            .then_with(|| x.term.cmp(&y.term))
    });
    keywords.truncate(k.max(1));

    KeywordSet {
        actor: actor.to_string(),
        keywords,
        stable_attributes: find_stable_attributes(snippets),
        singleton_count,
        source_snippets: snippets.to_vec(),
    }
}

/// `ln(N / (1 + df))`, floored at zero so terms present in nearly every
/// document score nothing rather than negatively.
pub fn idf(universe_size: u64, doc_freq: u64) -> f64 {
    if universe_size == 0 {
        return 0.0;
    }
    (universe_size as f64 / (1 + doc_freq) as f64).ln().max(0.0)
}

/// Keyword file contents: actor id to keywords in preference order.
///
/// Accepts either a plain list of strings per actor, or the records written
/// by the `keywords` command.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeywordOverrides(pub HashMap<String, Vec<String>>);

#[derive(Deserialize)]
#[serde(untagged)]
enum OverrideEntry {
    Terms(Vec<String>),
    Record { keywords: Vec<OverrideKeyword> },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OverrideKeyword {
    Term(String),
    Scored { term: String },
}

impl KeywordOverrides {
    pub fn parse(json: &str) -> Result<Self> {
        let raw: HashMap<String, OverrideEntry> =
            serde_json::from_str(json).map_err(|e| Error::json("keyword file", e))?;
        let map = raw
            .into_iter()
            .map(|(id, entry)| {
                let terms = match entry {
                    OverrideEntry::Terms(t) => t,
                    OverrideEntry::Record { keywords } => keywords
                        .into_iter()
                        .map(|k| match k {
                            OverrideKeyword::Term(t) | OverrideKeyword::Scored { term: t } => t,
                        })
                        .collect(),
                };
                let terms = terms
                    .into_iter()
                    .map(|t| t.trim().to_string())
                    .filter(|t| !t.is_empty())
                    .collect();
                (id, terms)
            })
            .collect();
        Ok(Self(map))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let contents = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&contents)
    }

    pub fn first(&self, actor_id: &str) -> Option<&str> {
        self.0
            .get(actor_id)
            .and_then(|v| v.first())
            .map(String::as_str)
    }
}
