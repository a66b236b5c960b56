//! URL-hierarchy relation signals: domain overlap between two actors'
//! snippets, and edge labels drawn from URL and title tokens.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::snippet::{Snippet, UrlTokens};
use crate::text;

/// Second-level suffixes under which registrations happen one label deeper.
const MULTI_PART_SUFFIXES: &[&str] = &[
    "ac.id", "co.id", "go.id", "or.id", "sch.id", "web.id", "ac.uk", "co.uk", "gov.uk", "org.uk",
    "ac.jp", "co.jp", "or.jp", "ac.in", "co.in", "edu.au", "com.au", "gov.au", "org.au", "edu.my",
    "com.my", "gov.my", "org.my", "edu.sg", "com.sg", "ac.nz", "co.nz", "ac.za", "co.za", "com.br",
    "edu.cn", "com.cn", "ac.kr", "co.kr", "ac.th", "ac.il",
];

const GENERIC_TOKENS: &[&str] = &[
    // schemes
    "http", "https", "ftp", "ftps", "file", "mailto",
    // host boilerplate and generic top-level domains
    "www", "com", "org", "net", "edu", "gov", "mil", "int", "info", "biz", "name", "pro", "aero",
    "coop", "museum", "mobi", // path boilerplate
    "html", "htm", "shtml", "php", "asp", "aspx", "jsp", "cgi", "index", "default", "home",
];

/// Jaccard overlap of two actors' registrable-domain sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsrScore {
    pub value: f64,
    pub shared_domains: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelSource {
    UrlDomain,
    UrlPath,
    Title,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Label {
    pub token: String,
    pub weight: f64,
    pub source: LabelSource,
}

/// Ranked labels for one edge: heaviest first, ties in token order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeLabels {
    pub labels: Vec<Label>,
}

impl EdgeLabels {
    pub fn top(&self) -> Option<&Label> {
        self.labels.first()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Token filters and public-suffix knowledge for URL-based signals.
#[derive(Debug, Clone)]
pub struct UrlLabeler {
    generic: HashSet<String>,
    suffixes: HashSet<String>,
}

impl Default for UrlLabeler {
    fn default() -> Self {
        Self {
            generic: GENERIC_TOKENS.iter().map(|s| s.to_string()).collect(),
            suffixes: MULTI_PART_SUFFIXES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl UrlLabeler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds tokens that must never become labels.
    pub fn with_generic_tokens<I: IntoIterator<Item = String>>(mut self, tokens: I) -> Self {
        self.generic
            .extend(tokens.into_iter().map(|t| t.to_lowercase()));
        self
    }

    /// Adds multi-part public suffixes such as `"ac.id"`.
    pub fn with_suffixes<I: IntoIterator<Item = String>>(mut self, suffixes: I) -> Self {
        self.suffixes
            .extend(suffixes.into_iter().map(|s| s.to_lowercase()));
        self
    }

    pub fn is_generic(&self, token: &str) -> bool {
        self.generic.contains(token) || text::stopwords().contains(token)
    }

    /// The two rightmost labels, or three when those two form a known
    /// multi-part suffix.
    pub fn registrable_domain(&self, url: &UrlTokens) -> String {
        let d = &url.domains;
        let mut take = d.len().min(2);
        if d.len() >= 3 && self.suffixes.contains(&format!("{}.{}", d[1], d[0])) {
            take = 3;
        }
        d[..take]
            .iter()
            .rev()
            .map(String::as_str)
            .collect::<Vec<_>>()
            .join(".")
    }

    pub fn domain_set(&self, snippets: &[Snippet]) -> BTreeSet<String> {
        snippets
            .iter()
            .map(|s| self.registrable_domain(&s.url))
            .collect()
    }

    /// `|D_a ∩ D_b| / |D_a ∪ D_b|` over registrable domains; 0 when both are empty.
    pub fn usr(&self, l_a: &[Snippet], l_b: &[Snippet]) -> UsrScore {
        let da = self.domain_set(l_a);
        let db = self.domain_set(l_b);
        let shared: BTreeSet<String> = da.intersection(&db).cloned().collect();
        let union = da.union(&db).count();
        let value = if union == 0 {
            0.0
        } else {
            shared.len() as f64 / union as f64
        };
        UsrScore {
            value,
            shared_domains: shared,
        }
    }

    /// Counts non-generic tokens from subdomain labels, path segments and
    /// titles across `l_ab`, keeping the `max_labels` most frequent.
    pub fn label_edge(&self, l_ab: &[Snippet], max_labels: usize) -> EdgeLabels {
        // token -> occurrences per source (domain, path, title)
        let mut counts: BTreeMap<String, [u64; 3]> = BTreeMap::new();
        let mut add = |token: String, source: usize| {
            if !self.is_generic(&token) {
                counts.entry(token).or_insert([0; 3])[source] += 1;
            }
        };
        for s in l_ab {
            let d = &s.url.domains;
            for label in d.iter().skip(2).filter(|l| l.as_str() != "www") {
                text::tokenize(label).into_iter().for_each(|t| add(t, 0));
            }
            for seg in &s.url.paths {
                text::tokenize(seg).into_iter().for_each(|t| add(t, 1));
            }
            text::tokenize(&s.title).into_iter().for_each(|t| add(t, 2));
        }

        let mut labels: Vec<Label> = counts
            .into_iter()
            .map(|(token, per_source)| {
                let total: u64 = per_source.iter().sum();
                // Dominant source; earlier sources win ties.
                let (idx, _) = per_source.iter().enumerate().fold((0, 0), |best, (i, &c)| {
                    if c > best.1 {
                        (i, c)
                    } else {
                        best
                    }
                });
                let source = [
                    LabelSource::UrlDomain,
                    LabelSource::UrlPath,
                    LabelSource::Title,
                ][idx];
                Label {
                    token,
                    weight: total as f64,
                    source,
                }
            })
            .collect();
        labels.sort_by(|x, y| {
            y.weight
                .total_cmp(&x.weight)
                .then_with(|| x.token.cmp(&y.token))
        });
        labels.truncate(max_labels.max(1));
        EdgeLabels { labels }
    }
}

/// [`UrlLabeler::usr`] with the built-in filters.
pub fn usr(l_a: &[Snippet], l_b: &[Snippet]) -> UsrScore {
    UrlLabeler::default().usr(l_a, l_b)
}

/// [`UrlLabeler::label_edge`] with the built-in filters.
pub fn label_edge(l_ab: &[Snippet], max_labels: usize) -> EdgeLabels {
    UrlLabeler::default().label_edge(l_ab, max_labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::RawSnippet;

    fn snip(url: &str, title: &str) -> Snippet {
        Snippet::parse(&RawSnippet {
            url: url.into(),
            title: title.into(),
            abstract_text: String::new(),
        })
        .unwrap()
    }

    #[test]
    fn registrable_domains() {
        let l = UrlLabeler::default();
        let rd = |u: &str| l.registrable_domain(&UrlTokens::parse(u).unwrap());
        assert_eq!(rd("http://www.example.com/x"), "example.com");
        assert_eq!(rd("http://cs.usu.ac.id"), "usu.ac.id");
        assert_eq!(rd("http://ac.id"), "ac.id");
        assert_eq!(rd("http://localhost"), "localhost");
        let custom = UrlLabeler::default().with_suffixes(["ed.jp".to_string()]);
        assert_eq!(
            custom.registrable_domain(&UrlTokens::parse("http://a.b.ed.jp").unwrap()),
            "b.ed.jp"
        );
    }

    #[test]
    fn usr_half_overlap() {
        let la = [
            snip("http://www.example.com/a", ""),
            snip("http://usu.ac.id/b", ""),
        ];
        let lb = [snip("http://conf.example.com/c", "")];
        let s = usr(&la, &lb);
        assert_eq!(s.value, 0.5);
        assert_eq!(
            s.shared_domains.into_iter().collect::<Vec<_>>(),
            ["example.com"]
        );
    }

    #[test]
    fn usr_edge_cases() {
        let la = [snip("http://a.org", "")];
        let lb = [snip("http://b.org", "")];
        assert_eq!(usr(&la, &lb).value, 0.0);
        assert!(usr(&la, &lb).shared_domains.is_empty());
        assert_eq!(usr(&la, &la).value, 1.0);
        assert_eq!(usr(&[], &[]).value, 0.0);
    }

    #[test]
    fn papers_is_top_label() {
        let l_ab = [
            snip("http://conf.example.com/papers/graph-mining", ""),
            snip("http://www.example.com/papers/2010", ""),
        ];
        let labels = label_edge(&l_ab, 3);
        let top = labels.top().unwrap();
        assert_eq!(top.token, "papers");
        assert_eq!(top.weight, 2.0);
        assert_eq!(top.source, LabelSource::UrlPath);
        let tokens: Vec<&str> = labels.labels.iter().map(|l| l.token.as_str()).collect();
        assert_eq!(tokens, ["papers", "2010", "conf"]);
    }

    #[test]
    fn generic_only_evidence_has_no_labels() {
        let l_ab = [
            snip("http://www.com", ""),
            snip("https://www.example.com/index.html", ""),
        ];
        assert!(label_edge(&l_ab, 5).is_empty());
        assert!(label_edge(&[], 5).is_empty());
    }

    #[test]
    fn custom_generic_tokens() {
        let l = UrlLabeler::default().with_generic_tokens(["Papers".to_string()]);
        let labels = l.label_edge(&[snip("http://x.org/papers/mining", "")], 5);
        assert_eq!(labels.labels.len(), 1);
        assert_eq!(labels.labels[0].token, "mining");
    }

    #[test]
    fn title_tokens_count() {
        let labels = label_edge(&[snip("http://x.org", "Workshop on Graph Mining")], 5);
        assert_eq!(labels.labels.len(), 3);
        assert!(labels.labels.iter().all(|l| l.source == LabelSource::Title));
    }
}
