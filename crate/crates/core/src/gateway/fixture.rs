//! Local document corpus answering queries by exhaustive scan.

use std::collections::{BTreeSet, HashMap};
use std::io::BufRead;
use std::path::Path;

use serde::Deserialize;

use super::{CorpusStats, Query, RawSnippet, SearchBackend, SearchResult};
use crate::snippet::Snippet;
use crate::{text, BackendError, Error, Result};

/// Number of body characters copied into a snippet abstract.
pub const ABSTRACT_CHARS: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Document {
    pub id: u64,
    pub url: String,
    pub title: String,
    pub body: String,
}

impl Document {
    pub fn abstract_text(&self) -> String {
        self.body.chars().take(ABSTRACT_CHARS).collect()
    }

    pub fn to_raw_snippet(&self) -> RawSnippet {
        RawSnippet {
            url: self.url.clone(),
            title: self.title.clone(),
            abstract_text: self.abstract_text(),
        }
    }
}

/// In-memory corpus: the event space that singleton and doubleton counts
/// are measured over.
#[derive(Debug, Clone)]
pub struct FixtureCorpus {
    name: String,
    documents: Vec<Document>,
    // Lowercased `title \n body \n url` per document, same order as `documents`.
    haystacks: Vec<String>,
}

impl FixtureCorpus {
    /// Builds a corpus; ids must be unique and strictly ascending.
    pub fn new(name: impl Into<String>, documents: Vec<Document>) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::InvalidCorpus {
                line: 0,
                reason: "corpus is empty".into(),
            });
        }
        for (i, pair) in documents.windows(2).enumerate() {
            if pair[1].id <= pair[0].id {
                let reason = if pair[1].id == pair[0].id {
                    format!("duplicate id {}", pair[1].id)
                } else {
                    format!("id {} follows {}", pair[1].id, pair[0].id)
                };
                return Err(Error::InvalidCorpus {
                    line: i + 2,
                    reason,
                });
            }
        }
        let haystacks = documents
            .iter()
            .map(|d| format!("{}\n{}\n{}", d.title, d.body, d.url).to_lowercase())
            .collect();
        Ok(Self {
            name: name.into(),
            documents,
            haystacks,
        })
    }

    /// Reads a JSON Lines corpus, one `{"id","url","title","body"}` object per line.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut documents = Vec::new();
        for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let doc: Document = serde_json::from_str(&line).map_err(|e| Error::InvalidCorpus {
                line: i + 1,
                reason: e.to_string(),
            })?;
            documents.push(doc);
        }
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "fixture".into());
        Self::new(format!("fixture:{name}"), documents)
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn universe_size(&self) -> u64 {
        self.documents.len() as u64
    }

    pub fn document(&self, id: u64) -> Option<&Document> {
        self.documents
            .binary_search_by_key(&id, |d| d.id)
            .ok()
            .map(|i| &self.documents[i])
    }

    /// Snippet view of one document, carrying its id as provenance.
    pub fn snippet(&self, id: u64) -> Option<Snippet> {
        let doc = self.document(id)?;
        let mut s = Snippet::parse(&doc.to_raw_snippet()).ok()?;
        s.source_doc = Some(id);
        Some(s)
    }

    /// Ids of every document matching all phrases, ascending.
    pub fn matching_ids(&self, phrases: &[String]) -> Vec<u64> {
        let needles: Vec<String> = phrases.iter().map(|p| p.to_lowercase()).collect();
        self.documents
            .iter()
            .zip(&self.haystacks)
            .filter(|(_, hay)| needles.iter().all(|n| hay.contains(n.as_str())))
            .map(|(d, _)| d.id)
            .collect()
    }

    /// Exact hit count and the first `page_size` matching documents as snippets.
    pub fn search(&self, query: &Query, page_size: usize) -> SearchResult {
        let ids = self.matching_ids(query.terms());
        let snippets = ids
            .iter()
            .take(page_size)
            .filter_map(|id| self.document(*id))
            .map(Document::to_raw_snippet)
            .collect();
        SearchResult {
            hit_count: ids.len() as u64,
            snippets,
        }
    }

    /// Number of documents whose title or body contains each token.
    pub fn doc_freq(&self) -> HashMap<String, u64> {
        let mut freq = HashMap::new();
        for doc in &self.documents {
            let tokens: BTreeSet<String> = text::tokenize(&doc.title)
                .into_iter()
                .chain(text::tokenize(&doc.body))
                .collect();
            for t in tokens {
                *freq.entry(t).or_insert(0) += 1;
            }
        }
        freq
    }
}

impl SearchBackend for FixtureCorpus {
    fn search(&self, query: &Query, page_size: usize) -> Result<SearchResult, BackendError> {
        Ok(FixtureCorpus::search(self, query, page_size))
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn corpus_stats(&self) -> Option<CorpusStats> {
        Some(CorpusStats {
            universe_size: self.universe_size(),
            doc_freq: self.doc_freq(),
        })
    }
}
