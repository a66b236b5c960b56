//! Social network extraction from search-engine evidence.
//!
//! Given a list of actor names, the crate issues quoted-phrase queries
//! against a search backend, detects co-occurrence relations from the
//! returned hit counts and snippets, scores them with set-similarity
//! measures over singleton/doubleton counts, labels edges from URL and
//! title tokens, and exports the resulting undirected network.
//!
//! Every query passes through a [`gateway::Gateway`], which owns the
//! persistent result cache and the per-day query budget. The
//! [`gateway::FixtureCorpus`] backend answers queries by exhaustive scan
//! over a local document set and is the reference used by the tests.

pub mod cli;
pub mod disambiguation;
pub mod error;
pub mod gateway;
pub mod labels;
pub mod network;
pub mod pipeline;
pub mod relation;
pub mod snippet;
pub mod strength;
pub mod text;

pub use error::{BackendError, Error, Result};
