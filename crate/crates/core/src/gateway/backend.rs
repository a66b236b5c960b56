use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Query;
use crate::BackendError;

/// One search result as returned by a backend, before URL parsing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSnippet {
    pub url: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub hit_count: u64,
    pub snippets: Vec<RawSnippet>,
}

/// Document-frequency table over the backend's universe, when one is known.
#[derive(Debug, Clone, Default)]
pub struct CorpusStats {
    pub universe_size: u64,
    pub doc_freq: HashMap<String, u64>,
}

/// Port through which the gateway reaches a search engine.
pub trait SearchBackend: Send + Sync {
    fn search(&self, query: &Query, page_size: usize) -> Result<SearchResult, BackendError>;

    /// Short identifier recorded in run provenance.
    fn name(&self) -> String;

    /// Term document frequencies, if the backend can supply them without
    /// spending queries. Live engines return `None`.
    fn corpus_stats(&self) -> Option<CorpusStats> {
        None
    }
}

impl<B: SearchBackend + ?Sized> SearchBackend for Box<B> {
    fn search(&self, query: &Query, page_size: usize) -> Result<SearchResult, BackendError> {
        (**self).search(query, page_size)
    }

    fn name(&self) -> String {
        (**self).name()
    }

    fn corpus_stats(&self) -> Option<CorpusStats> {
        (**self).corpus_stats()
    }
}
