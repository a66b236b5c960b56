//! Co-occurrence relation detection between actor pairs.
//!
//! A pair is a relation candidate when the doubleton query for the two
//! quoted names has a positive hit count and at least one retrieved snippet
//! mentions both names in its title or abstract. Those snippets form the
//! pair's evidence list.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::gateway::{Gateway, Query, QueryKind, SearchBackend};
use crate::snippet::Snippet;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Actor {
    pub id: String,
    pub name: String,
}

impl Actor {
    /// Creates an actor whose id is a lowercase slug of `name`.
    pub fn new(name: &str) -> Result<Self> {
        let name = name.trim();
        let id = slug(name);
        if id.is_empty() {
            return Err(Error::InvalidActor(name.to_string()));
        }
        Ok(Self {
            id,
            name: name.to_string(),
        })
    }
}

/// `"Mahyuddin K. M. Nasution"` becomes `"mahyuddin-k-m-nasution"`.
pub fn slug(name: &str) -> String {
    name.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join("-")
}

/// Parses an actors file: one name per line; blank lines and lines starting
/// with `#` are skipped.
pub fn parse_actors(contents: &str) -> Result<Vec<Actor>> {
    let actors = contents
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(Actor::new)
        .collect::<Result<Vec<_>>>()?;
    check_unique(&actors)?;
    Ok(actors)
}

pub fn check_unique(actors: &[Actor]) -> Result<()> {
    let mut seen = HashSet::new();
    for a in actors {
        if !seen.insert(a.id.as_str()) {
            return Err(Error::DuplicateActor(a.id.clone()));
        }
    }
    Ok(())
}

/// Rule-1 outcome for one unordered pair. `a.id < b.id` always.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationEvidence {
    pub a: Actor,
    pub b: Actor,
    pub doubleton_count: u64,
    pub l_ab: Vec<Snippet>,
    pub detected: bool,
}

impl RelationEvidence {
    pub fn pair(&self) -> (&str, &str) {
        (&self.a.id, &self.b.id)
    }
}

fn ordered<'a>(a: &'a Actor, b: &'a Actor) -> (&'a Actor, &'a Actor) {
    if a.id <= b.id {
        (a, b)
    } else {
        (b, a)
    }
}

/// Issues the doubleton query `q(a, b)` and applies Rule 1 to the first page.
pub fn detect_relation<B: SearchBackend>(
    a: &Actor,
    b: &Actor,
    gateway: &Gateway<B>,
) -> Result<RelationEvidence> {
    if a.id == b.id {
        return Err(Error::SelfPair(a.id.clone()));
    }
    let (a, b) = ordered(a, b);
    let query = Query::new([&a.name, &b.name])?;
    let result = gateway.execute(&query, QueryKind::Doubleton)?;
    let l_ab: Vec<Snippet> = result
        .snippets
        .iter()
        // Results whose URL cannot be tokenized carry no usable evidence.
        .filter_map(|raw| Snippet::parse(raw).ok())
        .filter(|s| s.contains_term(&a.name) && s.contains_term(&b.name))
        .collect();
    let detected = result.hit_count > 0 && !l_ab.is_empty();
    Ok(RelationEvidence {
        a: a.clone(),
        b: b.clone(),
        doubleton_count: result.hit_count,
        l_ab,
        detected,
    })
}

/// All unordered pairs in lexicographic `(id_min, id_max)` order.
pub fn actor_pairs(actors: &[Actor]) -> Vec<(&Actor, &Actor)> {
    let mut sorted: Vec<&Actor> = actors.iter().collect();
    sorted.sort_by(|x, y| x.id.cmp(&y.id));
    let mut pairs = Vec::with_capacity(sorted.len() * sorted.len().saturating_sub(1) / 2);
    for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            pairs.push((*a, *b));
        }
    }
    pairs
}

/// Runs [`detect_relation`] over all `n(n-1)/2` pairs, with up to
/// `parallelism` queries in flight. Results come back in pair order; on any
/// failure the first error in pair order is returned and completed queries
/// remain in the gateway cache.
pub fn detect_all<B: SearchBackend>(
    actors: &[Actor],
    gateway: &Gateway<B>,
    parallelism: usize,
) -> Result<Vec<RelationEvidence>> {
    if actors.len() < 2 {
        return Err(Error::TooFewActors(actors.len()));
    }
    check_unique(actors)?;
    let pairs = actor_pairs(actors);
    let workers = parallelism.clamp(1, pairs.len());

    if workers == 1 {
        return pairs
            .iter()
            .map(|(a, b)| detect_relation(a, b, gateway))
            .collect();
    }

    let next = AtomicUsize::new(0);
    let failed = AtomicBool::new(false);
    let slots: Mutex<Vec<Option<Result<RelationEvidence>>>> =
        Mutex::new((0..pairs.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if failed.load(Ordering::SeqCst) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some((a, b)) = pairs.get(i) else { break };
                let outcome = detect_relation(a, b, gateway);
                if outcome.is_err() {
                    failed.store(true, Ordering::SeqCst);
                }
                slots.lock().unwrap_or_else(|p| p.into_inner())[i] = Some(outcome);
            });
        }
    });

    let slots = slots.into_inner().unwrap_or_else(|p| p.into_inner());
    let mut out = Vec::with_capacity(slots.len());
    let mut first_err = None;
    for slot in slots {
        match slot {
            Some(Ok(ev)) => out.push(ev),
            Some(Err(e)) => {
                first_err.get_or_insert(e);
            }
            None => {}
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}
