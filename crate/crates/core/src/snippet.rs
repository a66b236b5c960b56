//! Structured view of a search snippet: URL tokens, title and abstract.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gateway::RawSnippet;
use crate::{Error, Result};

/// URL decomposed as `scheme://d_m.….d_2.d_1/p_1/…/p_k`.
///
/// `domains[0]` is the rightmost (top-level) label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UrlTokens {
    pub scheme: String,
    pub domains: Vec<String>,
    pub paths: Vec<String>,
}

impl UrlTokens {
    /// Parses `raw`. Query strings, fragments, userinfo and ports are
    /// discarded; the scheme and host are lowercased; empty path segments
    /// and empty host labels are dropped.
    pub fn parse(raw: &str) -> Result<Self> {
        let malformed = || Error::MalformedUrl(raw.to_string());
        let raw_trimmed = raw.trim();
        let (scheme, rest) = raw_trimmed.split_once("://").ok_or_else(malformed)?;
        let scheme_ok = scheme
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic())
            && scheme
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
        if !scheme_ok {
            return Err(malformed());
        }

        let rest = rest.split(['?', '#']).next().unwrap_or("");
        let (authority, path) = match rest.find('/') {
            Some(i) => (&rest[..i], &rest[i + 1..]),
            None => (rest, ""),
        };
        let host = authority.rsplit_once('@').map_or(authority, |(_, h)| h);
        let host = strip_port(host);

        let domains: Vec<String> = host
            .split('.')
            .filter(|l| !l.is_empty())
            .rev()
            .map(str::to_lowercase)
            .collect();
        if domains.is_empty() {
            return Err(malformed());
        }
        let paths = path
            .split('/')
            .filter(|p| !p.is_empty())
            .map(str::to_string)
            .collect();
        Ok(Self {
            scheme: scheme.to_ascii_lowercase(),
            domains,
            paths,
        })
    }

    /// Host labels in reading order, e.g. `www.example.com`.
    pub fn host(&self) -> String {
        self.domains
            .iter()
            .rev()
            .map(String::as_str)
            .collect::<Vec<_>>()
            .join(".")
    }
}

fn strip_port(host: &str) -> &str {
    match host.rsplit_once(':') {
        Some((h, port)) if port.chars().all(|c| c.is_ascii_digit()) => h,
        _ => host,
    }
}

impl fmt::Display for UrlTokens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}://{}", self.scheme, self.host())?;
        for p in &self.paths {
            write!(f, "/{p}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for UrlTokens {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// One search result: URL tokens, title and abstract.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snippet {
    pub url: UrlTokens,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_doc: Option<u64>,
}

impl Snippet {
    pub fn parse(raw: &RawSnippet) -> Result<Self> {
        Ok(Self {
            url: UrlTokens::parse(&raw.url)?,
            title: raw.title.trim().to_string(),
            abstract_text: raw.abstract_text.trim().to_string(),
            source_doc: None,
        })
    }

    pub fn to_raw(&self) -> RawSnippet {
        RawSnippet {
            url: self.url.to_string(),
            title: self.title.clone(),
            abstract_text: self.abstract_text.clone(),
        }
    }

    /// Case-insensitive substring test over the title and the abstract.
    pub fn contains_term(&self, term: &str) -> bool {
        let needle = term.to_lowercase();
        if needle.is_empty() {
            return false;
        }
        self.title.to_lowercase().contains(&needle)
            || self.abstract_text.to_lowercase().contains(&needle)
    }
}
