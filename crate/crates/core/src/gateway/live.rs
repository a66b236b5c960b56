//! Adapter for a live web search engine (Google Programmable Search JSON API).
//!
//! Hit counts from live engines are estimates, so results from this backend
//! are best-effort and never used as a test oracle.

use std::time::Duration;

use serde::Deserialize;

use super::{Query, RawSnippet, SearchBackend, SearchResult};
use crate::{BackendError, Error, Result};

pub const API_KEY_ENV: &str = "SNIPPETNET_API_KEY";
pub const ENGINE_ID_ENV: &str = "SNIPPETNET_ENGINE_ID";
pub const ENDPOINT_ENV: &str = "SNIPPETNET_ENDPOINT";
pub const DEFAULT_ENDPOINT: &str = "https://www.googleapis.com/customsearch/v1";

/// The API returns at most this many results per request.
const MAX_PAGE: usize = 10;

#[derive(Debug, Clone)]
pub struct LiveConfig {
    pub api_key: String,
    pub engine_id: String,
    pub endpoint: String,
    pub timeout: Duration,
}

impl LiveConfig {
    /// Reads credentials from `SNIPPETNET_API_KEY` and `SNIPPETNET_ENGINE_ID`.
    pub fn from_env() -> Result<Self> {
        let var = |name: &str| std::env::var(name).ok().filter(|v| !v.trim().is_empty());
        let api_key =
            var(API_KEY_ENV).ok_or_else(|| Error::Config(format!("{API_KEY_ENV} is not set")))?;
        let engine_id = var(ENGINE_ID_ENV)
            .ok_or_else(|| Error::Config(format!("{ENGINE_ID_ENV} is not set")))?;
        Ok(Self {
            api_key,
            engine_id,
            endpoint: var(ENDPOINT_ENV).unwrap_or_else(|| DEFAULT_ENDPOINT.to_string()),
            timeout: Duration::from_secs(20),
        })
    }
}

pub struct LiveBackend {
    config: LiveConfig,
    http: reqwest::blocking::Client,
}

impl LiveBackend {
    pub fn new(config: LiveConfig) -> Result<Self> {
        let http = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| Error::Config(format!("http client: {e}")))?;
        Ok(Self { config, http })
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
struct SearchInformation {
    #[serde(default)]
    total_results: Option<String>,
}

#[derive(Debug, Deserialize)]
struct Item {
    #[serde(default)]
    link: String,
    #[serde(default)]
    title: String,
    #[serde(default)]
    snippet: String,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ApiResponse {
    #[serde(default)]
    search_information: Option<SearchInformation>,
    #[serde(default)]
    items: Vec<Item>,
}

/// Converts an API response body into a [`SearchResult`].
pub fn parse_response(body: &str, page_size: usize) -> Result<SearchResult, BackendError> {
    let resp: ApiResponse = serde_json::from_str(body)
        .map_err(|e| BackendError::new(format!("unparseable response: {e}"), false))?;
    let snippets: Vec<RawSnippet> = resp
        .items
        .into_iter()
        .filter(|i| !i.link.is_empty())
        .take(page_size)
        .map(|i| RawSnippet {
            url: i.link,
            title: i.title,
            abstract_text: i.snippet,
        })
        .collect();
    let reported = resp
        .search_information
        .and_then(|s| s.total_results)
        .and_then(|t| t.replace(',', "").parse::<u64>().ok())
        .unwrap_or(0);
    // Estimated totals can undercount the page actually returned.
    let hit_count = reported.max(snippets.len() as u64);
    Ok(SearchResult {
        hit_count,
        snippets,
    })
}

fn error_chain(e: &dyn std::error::Error) -> String {
    let mut msg = e.to_string();
    let mut source = e.source();
    while let Some(s) = source {
        msg.push_str(": ");
        msg.push_str(&s.to_string());
        source = s.source();
    }
    msg
}

fn status_error(status: reqwest::StatusCode) -> BackendError {
    let retryable = status == reqwest::StatusCode::TOO_MANY_REQUESTS || status.is_server_error();
    BackendError::new(format!("http status {status}"), retryable)
}

impl SearchBackend for LiveBackend {
    fn search(&self, query: &Query, page_size: usize) -> Result<SearchResult, BackendError> {
        let num = page_size.clamp(1, MAX_PAGE).to_string();
        let resp = self
            .http
            .get(&self.config.endpoint)
            .query(&[
                ("key", self.config.api_key.as_str()),
                ("cx", self.config.engine_id.as_str()),
                ("q", query.rendered()),
                ("num", num.as_str()),
            ])
            .send()
            .map_err(|e| {
                BackendError::new(
                    format!("request failed: {}", error_chain(&e)),
                    e.is_timeout() || e.is_connect(),
                )
            })?;
        let status = resp.status();
        if !status.is_success() {
            return Err(status_error(status));
        }
        let body = resp
            .text()
            .map_err(|e| BackendError::new(format!("reading body: {e}"), true))?;
        parse_response(&body, page_size)
    }

    fn name(&self) -> String {
        format!("live:{}", self.config.endpoint)
    }
}
