use std::fmt;

use crate::{Error, Result};

/// A search query made of quoted phrases.
///
/// The rendered form wraps each phrase in double quotes and joins them with
/// single spaces; it is the cache key for the query.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    terms: Vec<String>,
    rendered: String,
}

impl Query {
    /// Builds a query from phrases, trimming each one.
    pub fn new<I, S>(phrases: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let terms = phrases
            .into_iter()
            .map(|p| {
                let t = p.as_ref().trim();
                if t.is_empty() {
                    Err(Error::EmptyPhrase)
                } else {
                    Ok(t.to_string())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if terms.is_empty() {
            return Err(Error::EmptyPhrase);
        }
        let rendered = terms
            .iter()
            .map(|t| format!("\"{t}\""))
            .collect::<Vec<_>>()
            .join(" ");
        Ok(Self { terms, rendered })
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn rendered(&self) -> &str {
        &self.rendered
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.rendered)
    }
}

/// What a query asks for, used for accounting in run reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    /// `q(a)`: one actor name.
    Singleton,
    /// `q(a, b)`: two actor names.
    Doubleton,
    /// Any query augmented with disambiguation keywords.
    Keyword,
}
