//! Shared fixtures and an exhaustive-scan oracle written independently of
//! the library's search path.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use chrono::{TimeZone, Utc};
use num_rational::Ratio;
use snippetnet::gateway::{
    BudgetLedger, Clock, Document, FixedClock, FixtureCorpus, Gateway, QueryCache,
};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub fn corpus20() -> FixtureCorpus {
    FixtureCorpus::load(fixture_path("corpus20.jsonl")).unwrap()
}

pub fn actors6_names() -> Vec<&'static str> {
    vec![
        "Alice Tan",
        "Bob Lim",
        "Carol Wu",
        "Dedi Nasution",
        "Eka Putri",
        "Farid Noah",
    ]
}

pub fn fixed_clock() -> Arc<dyn Clock> {
    Arc::new(FixedClock(
        Utc.with_ymd_and_hms(2026, 10, 16, 9, 0, 0).unwrap(),
    ))
}

pub fn gateway(corpus: FixtureCorpus, daily_limit: u64) -> Gateway<FixtureCorpus> {
    let clock = fixed_clock();
    let ledger = BudgetLedger::new(daily_limit, clock.today()).unwrap();
    Gateway::new(corpus, QueryCache::new(), ledger).with_clock(clock)
}

pub fn doc(id: u64, url: &str, title: &str, body: &str) -> Document {
    Document {
        id,
        url: url.into(),
        title: title.into(),
        body: body.into(),
    }
}

/// Ids of documents mentioning `phrase` (case-insensitive) in the title,
/// the body or the url, found by checking each field separately.
pub fn oracle_docs(docs: &[Document], phrase: &str) -> BTreeSet<u64> {
    let p = phrase.to_lowercase();
    docs.iter()
        .filter(|d| {
            d.title.to_lowercase().contains(&p)
                || d.body.to_lowercase().contains(&p)
                || d.url.to_lowercase().contains(&p)
        })
        .map(|d| d.id)
        .collect()
}

/// Ids matching every phrase, by intersecting per-phrase sets.
pub fn oracle_conjunction(docs: &[Document], phrases: &[&str]) -> BTreeSet<u64> {
    let mut sets = phrases.iter().map(|p| oracle_docs(docs, p));
    let first = sets.next().unwrap_or_default();
    sets.fold(first, |acc, s| acc.intersection(&s).copied().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMeasure {
    Jaccard,
    Dice,
    Overlap,
}

/// Similarity of two document sets as an exact fraction; zero on empty denominators.
pub fn oracle_similarity(a: &BTreeSet<u64>, b: &BTreeSet<u64>, m: OracleMeasure) -> Ratio<u128> {
    let inter = a.intersection(b).count() as u128;
    let union = a.union(b).count() as u128;
    let (num, den) = match m {
        OracleMeasure::Jaccard => (inter, union),
        OracleMeasure::Dice => (2 * inter, (a.len() + b.len()) as u128),
        OracleMeasure::Overlap => (inter, a.len().min(b.len()) as u128),
    };
    if den == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(num, den)
    }
}

/// Rule-1 verdict by direct scan: some document among the first
/// `page_size` co-occurrence matches mentions both names in its title or
/// in the first 200 characters of its body.
pub fn oracle_detected(docs: &[Document], a: &str, b: &str, page_size: usize) -> bool {
    let both = oracle_conjunction(docs, &[a, b]);
    let (la, lb) = (a.to_lowercase(), b.to_lowercase());
    docs.iter()
        .filter(|d| both.contains(&d.id))
        .take(page_size)
        .any(|d| {
            let window: String = d.body.chars().take(200).collect();
            let title = d.title.to_lowercase();
            let window = window.to_lowercase();
            (title.contains(&la) || window.contains(&la))
                && (title.contains(&lb) || window.contains(&lb))
        })
}
