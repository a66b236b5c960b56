use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{Query, RawSnippet, SearchResult};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub hit_count: u64,
    pub snippets: Vec<RawSnippet>,
    pub fetched_at: DateTime<Utc>,
}

impl CacheEntry {
    pub fn result(&self) -> SearchResult {
        SearchResult {
            hit_count: self.hit_count,
            snippets: self.snippets.clone(),
        }
    }
}

/// Search results keyed by rendered query string.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QueryCache {
    entries: BTreeMap<String, CacheEntry>,
}

impl QueryCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, query: &Query) -> Option<SearchResult> {
        self.entries.get(query.rendered()).map(CacheEntry::result)
    }

    pub fn store(&mut self, query: &Query, result: SearchResult, fetched_at: DateTime<Utc>) {
        self.entries.insert(
            query.rendered().to_string(),
            CacheEntry {
                hit_count: result.hit_count,
                snippets: result.snippets,
                fetched_at,
            },
        );
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &CacheEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Loads a cache file; a missing file yields an empty cache.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        match std::fs::read(path) {
            Ok(bytes) if bytes.iter().all(u8::is_ascii_whitespace) => Ok(Self::new()),
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map_err(|e| Error::json(path.display().to_string(), e)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::new()),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let bytes =
            serde_json::to_vec_pretty(self).map_err(|e| Error::json("serializing cache", e))?;
        write_atomic(path.as_ref(), &bytes)
    }
}

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp_name = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}
