mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use snippetnet::disambiguation::extract_keywords;
use snippetnet::gateway::{Document, FixtureCorpus, Query, RawSnippet};
use snippetnet::labels::{label_edge, usr};
use snippetnet::network::{build_network, pair_key, to_matrix, PairSignals, Provenance};
use snippetnet::relation::{Actor, RelationEvidence};
use snippetnet::snippet::{Snippet, UrlTokens};
use snippetnet::strength::{HitCountTriple, Measure, StrengthScore, Variant};

const WORDS: &[&str] = &[
    "alice", "bob", "carol", "graph", "mining", "web", "ukm", "usu",
];

fn arb_docs() -> impl Strategy<Value = Vec<Document>> {
    prop::collection::vec(
        (
            prop::collection::vec(prop::sample::select(WORDS), 0..4),
            prop::collection::vec(prop::sample::select(WORDS), 0..6),
        ),
        1..12,
    )
    .prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (title, body))| Document {
                id: i as u64 + 1,
                url: format!("http://host{i}.example.org/p"),
                title: title.join(" "),
                body: body.join(" "),
            })
            .collect()
    })
}

fn label() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9]{0,7}"
}

fn arb_url() -> impl Strategy<Value = (String, String, Vec<String>, Vec<String>)> {
    (
        prop::sample::select(vec!["http", "https", "ftp"]),
        prop::collection::vec(label(), 1..5),
        prop::collection::vec("[A-Za-z0-9_.~-]{1,8}", 0..4),
    )
        .prop_map(|(scheme, host, paths)| {
            let mut url = format!("{scheme}://{}", host.join("."));
            for p in &paths {
                url.push('/');
                url.push_str(p);
            }
            (url, scheme.to_string(), host, paths)
        })
}

fn snippet(url: &str, title: &str) -> Snippet {
    Snippet::parse(&RawSnippet {
        url: url.into(),
        title: title.into(),
        abstract_text: String::new(),
    })
    .unwrap()
}

proptest! {
    #[test]
    fn conjunction_never_increases_hits(docs in arb_docs(), terms in prop::collection::vec(prop::sample::select(WORDS), 1..4), extra in prop::sample::select(WORDS)) {
        let corpus = FixtureCorpus::new("p", docs).unwrap();
        let base = corpus.search(&Query::new(&terms).unwrap(), 10).hit_count;
        let mut more = terms.clone();
        more.push(extra);
        let narrowed = corpus.search(&Query::new(&more).unwrap(), 10).hit_count;
        prop_assert!(narrowed <= base);
    }

    #[test]
    fn fixture_search_is_deterministic_and_matches_oracle(docs in arb_docs(), terms in prop::collection::vec(prop::sample::select(WORDS), 1..3), page in 1usize..5) {
        let corpus = FixtureCorpus::new("p", docs.clone()).unwrap();
        let q = Query::new(&terms).unwrap();
        let r1 = corpus.search(&q, page);
        let r2 = corpus.search(&q, page);
        prop_assert_eq!(&r1, &r2);
        let expected = oracle_conjunction(&docs, &terms);
        prop_assert_eq!(r1.hit_count as usize, expected.len());
        prop_assert!(r1.snippets.len() <= page.min(expected.len()));
    }

    #[test]
    fn url_render_round_trip((url, scheme, host, paths) in arb_url()) {
        let parsed = UrlTokens::parse(&url).unwrap();
        prop_assert_eq!(&parsed.scheme, &scheme);
        let expected_domains: Vec<String> = host.iter().rev().cloned().collect();
        prop_assert_eq!(&parsed.domains, &expected_domains);
        prop_assert_eq!(&parsed.paths, &paths);
        prop_assert_eq!(parsed.to_string(), url.clone());
        prop_assert_eq!(UrlTokens::parse(&parsed.to_string()).unwrap(), parsed);
    }

    #[test]
    fn contains_term_ignores_case(title in "[A-Za-z ]{0,20}", term in "[A-Za-z]{1,5}") {
        let s = snippet("http://x.org", &title);
        let lower = s.contains_term(&term.to_lowercase());
        prop_assert_eq!(s.contains_term(&term), lower);
        prop_assert_eq!(s.contains_term(&term.to_uppercase()), lower);
    }

    #[test]
    fn snippet_reparse_is_idempotent((url, _, _, _) in arb_url(), title in "[ -~]{0,20}", abs in "[ -~]{0,40}") {
        let s = Snippet::parse(&RawSnippet { url, title, abstract_text: abs }).unwrap();
        prop_assert_eq!(Snippet::parse(&s.to_raw()).unwrap(), s);
    }

    #[test]
    fn measures_in_range_symmetric_and_ordered(a in 0u64..1_000_000, b in 0u64..1_000_000, x in 0u64..1_000_000) {
        let t = HitCountTriple::clamp(a, b, x);
        for m in Measure::ALL {
            let v = t.score(m);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert_eq!(v, t.swapped().score(m));
        }
        let (o, d, j) = (t.score(Measure::Overlap), t.score(Measure::Dice), t.score(Measure::Jaccard));
        prop_assert!(o >= d && d >= j);
    }

    #[test]
    fn usr_symmetric_and_bounded(a in prop::collection::vec(arb_url(), 0..6), b in prop::collection::vec(arb_url(), 0..6)) {
        let la: Vec<Snippet> = a.iter().map(|u| snippet(&u.0, "")).collect();
        let lb: Vec<Snippet> = b.iter().map(|u| snippet(&u.0, "")).collect();
        let ab = usr(&la, &lb);
        let ba = usr(&lb, &la);
        prop_assert!((0.0..=1.0).contains(&ab.value));
        prop_assert_eq!(&ab, &ba);
        prop_assert_eq!(ab.value == 0.0, ab.shared_domains.is_empty());
        if !la.is_empty() {
            prop_assert_eq!(usr(&la, &la).value, 1.0);
        }
    }

    #[test]
    fn usr_shared_domain_snippet_never_lowers_score(a in prop::collection::vec(arb_url(), 1..5), b in prop::collection::vec(arb_url(), 1..5), pick in 0usize..5) {
        let mut la: Vec<Snippet> = a.iter().map(|u| snippet(&u.0, "")).collect();
        let mut lb: Vec<Snippet> = b.iter().map(|u| snippet(&u.0, "")).collect();
        // Force one shared domain, then add another snippet from it.
        lb.push(la[pick % la.len()].clone());
        let before = usr(&la, &lb).value;
        let shared = la[pick % la.len()].clone();
        la.push(shared.clone());
        lb.push(shared);
        prop_assert!(usr(&la, &lb).value >= before);
    }

    #[test]
    fn generic_snippets_do_not_change_labels(urls in prop::collection::vec(arb_url(), 0..6), max in 1usize..6) {
        let l_ab: Vec<Snippet> = urls.iter().map(|u| snippet(&u.0, "graph mining")).collect();
        let before = label_edge(&l_ab, max);
        let mut more = l_ab.clone();
        more.push(snippet("https://www.example.com/index.html", "The of and"));
        prop_assert_eq!(label_edge(&more, max), before.clone());
        prop_assert_eq!(label_edge(&l_ab, max), before);
    }

    #[test]
    fn keyword_truncation_is_a_prefix(words in prop::collection::vec(prop::sample::select(WORDS), 0..20), k in 1usize..8) {
        let s = snippet("http://x.org", &words.join(" "));
        let full = extract_keywords("x", std::slice::from_ref(&s), 1, None, 100);
        let part = extract_keywords("x", &[s], 1, None, k);
        prop_assert!(part.keywords.len() <= k);
        prop_assert_eq!(&part.keywords[..], &full.keywords[..part.keywords.len()]);
        for kw in &full.keywords {
            prop_assert!(words.contains(&kw.term.as_str()));
        }
    }

    #[test]
    fn threshold_monotone(scores in prop::collection::vec(0u64..=10, 6), t1 in 0.0f64..=1.0, t2 in 0.0f64..=1.0) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let (actors, evidence, signals) = small_network(&scores);
        let prov = provenance();
        let low = build_network(&actors, &evidence, &signals, lo, prov.clone()).unwrap();
        let high = build_network(&actors, &evidence, &signals, hi, prov).unwrap();
        let low_edges: BTreeSet<(String, String)> = low.edges.iter().map(|e| (e.a.clone(), e.b.clone())).collect();
        for e in &high.edges {
            prop_assert!(low_edges.contains(&(e.a.clone(), e.b.clone())));
        }
        prop_assert_eq!(low.nodes, high.nodes);
    }
}

pub fn provenance() -> Provenance {
    Provenance {
        backend: "prop".into(),
        measure: Measure::Jaccard,
        variant: Variant::Sr,
        threshold: 0.0,
        page_size: 10,
        generated_at: None,
    }
}

/// Four actors, six pairs; pair i has jaccard score `scores[i] / 10` and is
/// detected when the score is positive.
pub fn small_network(scores: &[u64]) -> (Vec<Actor>, Vec<RelationEvidence>, PairSignals) {
    let actors: Vec<Actor> = ["p", "q", "r", "s"]
        .iter()
        .map(|n| Actor::new(n).unwrap())
        .collect();
    let mut evidence = Vec::new();
    let mut signals = PairSignals::default();
    let mut i = 0;
    for x in 0..actors.len() {
        for y in x + 1..actors.len() {
            let s = scores[i];
            i += 1;
            evidence.push(RelationEvidence {
                a: actors[x].clone(),
                b: actors[y].clone(),
                doubleton_count: s,
                l_ab: vec![],
                detected: s > 0,
            });
            signals.scores.insert(
                pair_key(&actors[x].id, &actors[y].id),
                StrengthScore::from_counts(HitCountTriple::clamp(s, 10, s), Measure::Jaccard),
            );
        }
    }
    (actors, evidence, signals)
}

#[test]
fn matrix_consistency_on_small_network() {
    let (actors, evidence, signals) = small_network(&[3, 0, 10, 5, 0, 1]);
    let net = build_network(&actors, &evidence, &signals, 0.2, provenance()).unwrap();
    let m = to_matrix(&net);
    assert_eq!(net.edges.len(), 3);
    assert_eq!(m.ones(), 6);
}
