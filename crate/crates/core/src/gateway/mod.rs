//! Query construction, search backends, result cache and query budget.
//!
//! All queries go through [`Gateway::execute`]: a cached result is returned
//! without touching the budget; otherwise one unit of today's allowance is
//! reserved before the backend is called, and the result is cached.

mod backend;
mod budget;
mod cache;
mod fixture;
pub mod live;
mod query;

use std::sync::{Arc, Mutex, MutexGuard};

use serde::{Deserialize, Serialize};

pub use backend::{CorpusStats, RawSnippet, SearchBackend, SearchResult};
pub use budget::{BudgetLedger, Clock, FixedClock, SystemClock};
pub use cache::{write_atomic, CacheEntry, QueryCache};
pub use fixture::{Document, FixtureCorpus, ABSTRACT_CHARS};
pub use query::{Query, QueryKind};

use crate::{Error, Result};

pub const DEFAULT_PAGE_SIZE: usize = 10;

/// Backend calls and cache hits observed by a gateway.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryStats {
    pub singleton_queries: u64,
    pub doubleton_queries: u64,
    pub keyword_queries: u64,
    pub backend_calls: u64,
    pub cache_hits: u64,
}

struct State {
    cache: QueryCache,
    ledger: BudgetLedger,
    stats: QueryStats,
}

/// Single coordinator for the cache and the budget ledger in front of a backend.
pub struct Gateway<B> {
    backend: B,
    page_size: usize,
    clock: Arc<dyn Clock>,
    state: Mutex<State>,
}

impl<B: SearchBackend> Gateway<B> {
    pub fn new(backend: B, cache: QueryCache, ledger: BudgetLedger) -> Self {
        Self {
            backend,
            page_size: DEFAULT_PAGE_SIZE,
            clock: Arc::new(SystemClock),
            state: Mutex::new(State {
                cache,
                ledger,
                stats: QueryStats::default(),
            }),
        }
    }

    pub fn with_page_size(mut self, page_size: usize) -> Self {
        self.page_size = page_size.max(1);
        self
    }

    pub fn with_clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    pub fn page_size(&self) -> usize {
        self.page_size
    }

    pub fn clock(&self) -> &dyn Clock {
        self.clock.as_ref()
    }

    fn state(&self) -> MutexGuard<'_, State> {
        // A panic while holding the lock leaves cache and ledger consistent:
        // each mutation is a single insert or increment.
        self.state.lock().unwrap_or_else(|p| p.into_inner())
    }

    /// Answers `query` from the cache, or spends one query of budget on the backend.
    pub fn execute(&self, query: &Query, kind: QueryKind) -> Result<SearchResult> {
        {
            let mut st = self.state();
            if let Some(hit) = st.cache.lookup(query) {
                st.stats.cache_hits += 1;
                return Ok(hit);
            }
            let today = self.clock.today();
            st.ledger.reserve(today)?;
            st.stats.backend_calls += 1;
            match kind {
                QueryKind::Singleton => st.stats.singleton_queries += 1,
                QueryKind::Doubleton => st.stats.doubleton_queries += 1,
                QueryKind::Keyword => st.stats.keyword_queries += 1,
            }
        }
        let result = self
            .backend
            .search(query, self.page_size)
            .map_err(Error::from)?;
        let mut st = self.state();
        st.cache.store(query, result.clone(), self.clock.now());
        Ok(result)
    }

    pub fn stats(&self) -> QueryStats {
        self.state().stats
    }

    pub fn ledger(&self) -> BudgetLedger {
        self.state().ledger.clone()
    }

    pub fn cache(&self) -> QueryCache {
        self.state().cache.clone()
    }

    pub fn cache_len(&self) -> usize {
        self.state().cache.len()
    }

    /// Writes cache and ledger to disk.
    pub fn persist(
        &self,
        cache_path: impl AsRef<std::path::Path>,
        ledger_path: impl AsRef<std::path::Path>,
    ) -> Result<()> {
        let st = self.state();
        st.cache.save(cache_path)?;
        st.ledger.save(ledger_path)
    }

    pub fn into_parts(self) -> (B, QueryCache, BudgetLedger) {
        let st = self.state.into_inner().unwrap_or_else(|p| p.into_inner());
        (self.backend, st.cache, st.ledger)
    }
}
