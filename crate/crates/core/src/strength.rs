//! Strength of a relation from singleton and doubleton hit counts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::gateway::{Gateway, Query, QueryKind, SearchBackend};
use crate::relation::{Actor, RelationEvidence};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Jaccard,
    Dice,
    Overlap,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Jaccard, Measure::Dice, Measure::Overlap];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Jaccard => "jaccard",
            Measure::Dice => "dice",
            Measure::Overlap => "overlap",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown measure {s:?}")))
    }
}

/// Plain strength relation or the keyword-augmented one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Sr,
    Srwk,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Sr => "sr",
            Variant::Srwk => "srwk",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sr" => Ok(Variant::Sr),
            "srwk" => Ok(Variant::Srwk),
            _ => Err(Error::Config(format!("unknown variant {s:?}"))),
        }
    }
}

/// Singleton counts `|a|`, `|b|` and the doubleton `|a ∩ b|`.
///
/// Constructed through [`HitCountTriple::clamp`], so the doubleton never
/// exceeds either singleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HitCountTriple {
    pub singleton_a: u64,
    pub singleton_b: u64,
    pub doubleton: u64,
}

impl HitCountTriple {
    /// Lowers the doubleton to `min(doubleton, |a|, |b|)`. Live engines
    /// estimate counts independently and can violate the subset conditions.
    pub fn clamp(singleton_a: u64, singleton_b: u64, doubleton: u64) -> Self {
        Self {
            singleton_a,
            singleton_b,
            doubleton: doubleton.min(singleton_a).min(singleton_b),
        }
    }

    pub fn swapped(self) -> Self {
        Self {
            singleton_a: self.singleton_b,
            singleton_b: self.singleton_a,
            doubleton: self.doubleton,
        }
    }

    /// The measure as an exact fraction `(numerator, denominator)`;
    /// `(0, 1)` when the denominator would be zero.
    pub fn fraction(self, measure: Measure) -> (u128, u128) {
        let a = self.singleton_a as u128;
        let b = self.singleton_b as u128;
        let x = self.doubleton as u128;
        let (num, den) = match measure {
            Measure::Jaccard => (x, a + b - x),
            Measure::Dice => (2 * x, a + b),
            Measure::Overlap => (x, a.min(b)),
        };
        if den == 0 {
            (0, 1)
        } else {
            (num, den)
        }
    }

    pub fn score(self, measure: Measure) -> f64 {
        let (num, den) = self.fraction(measure);
        num as f64 / den as f64
    }
}

/// `|a∩b| / (|a| + |b| - |a∩b|)`, zero when both singletons are zero.
pub fn jaccard(h: HitCountTriple) -> f64 {
    h.score(Measure::Jaccard)
}

/// `2|a∩b| / (|a| + |b|)`.
pub fn dice(h: HitCountTriple) -> f64 {
    h.score(Measure::Dice)
}

/// `|a∩b| / min(|a|, |b|)`.
pub fn overlap(h: HitCountTriple) -> f64 {
    h.score(Measure::Overlap)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthScore {
    pub value: f64,
    pub measure: Measure,
    pub variant: Variant,
    pub counts: HitCountTriple,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keywords_used: Option<(String, String)>,
}

impl StrengthScore {
    pub fn from_counts(counts: HitCountTriple, measure: Measure) -> Self {
        Self {
            value: counts.score(measure),
            measure,
            variant: Variant::Sr,
            counts,
            keywords_used: None,
        }
    }
}

/// Singleton hit count `|a|` from `q(a)`.
pub fn singleton_count<B: SearchBackend>(actor: &Actor, gateway: &Gateway<B>) -> Result<u64> {
    let q = Query::new([&actor.name])?;
    Ok(gateway.execute(&q, QueryKind::Singleton)?.hit_count)
}

/// Strength of a detected pair: singletons from `q(a)` and `q(b)`, the
/// doubleton reused from the detection evidence.
pub fn sr<B: SearchBackend>(
    evidence: &RelationEvidence,
    gateway: &Gateway<B>,
    measure: Measure,
) -> Result<StrengthScore> {
    if !evidence.detected {
        return Err(Error::NotDetected(
            evidence.a.id.clone(),
            evidence.b.id.clone(),
        ));
    }
    let a = singleton_count(&evidence.a, gateway)?;
    let b = singleton_count(&evidence.b, gateway)?;
    let counts = HitCountTriple::clamp(a, b, evidence.doubleton_count);
    Ok(StrengthScore::from_counts(counts, measure))
}

/// Strength over keyword-augmented queries `q(a,kw_a)`, `q(b,kw_b)` and
/// `q(a,kw_a,b,kw_b)`.
pub fn sr_with_keywords<B: SearchBackend>(
    a: &Actor,
    kw_a: &str,
    b: &Actor,
    kw_b: &str,
    gateway: &Gateway<B>,
    measure: Measure,
) -> Result<StrengthScore> {
    let (kw_a, kw_b) = (kw_a.trim(), kw_b.trim());
    if kw_a.is_empty() || kw_b.is_empty() {
        return Err(Error::EmptyKeyword);
    }
    if a.id == b.id {
        return Err(Error::SelfPair(a.id.clone()));
    }
    // Canonical order keeps the joint query's cache key symmetric.
    let ((first, kw_first), (second, kw_second)) = if a.id <= b.id {
        ((a, kw_a), (b, kw_b))
    } else {
        ((b, kw_b), (a, kw_a))
    };
    let qa = Query::new([first.name.as_str(), kw_first])?;
    let qb = Query::new([second.name.as_str(), kw_second])?;
    let qab = Query::new([
        first.name.as_str(),
        kw_first,
        second.name.as_str(),
        kw_second,
    ])?;
    let ha = gateway.execute(&qa, QueryKind::Keyword)?.hit_count;
    let hb = gateway.execute(&qb, QueryKind::Keyword)?.hit_count;
    let hab = gateway.execute(&qab, QueryKind::Keyword)?.hit_count;
    let counts = HitCountTriple::clamp(ha, hb, hab);
    Ok(StrengthScore {
        value: counts.score(measure),
        measure,
        variant: Variant::Srwk,
        counts,
        keywords_used: Some((kw_first.to_string(), kw_second.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::{BudgetLedger, Document, FixtureCorpus, QueryCache};
    use crate::relation::detect_relation;

    fn t(a: u64, b: u64, x: u64) -> HitCountTriple {
        HitCountTriple::clamp(a, b, x)
    }

    #[test]
    fn jaccard_values() {
        assert_eq!(jaccard(t(100, 100, 100)), 1.0);
        assert_eq!(jaccard(t(100, 50, 0)), 0.0);
        assert_eq!(t(100, 50, 10).fraction(Measure::Jaccard), (10, 140));
        assert!((jaccard(t(100, 50, 10)) - 0.071429).abs() < 1e-6);
        assert_eq!(jaccard(t(0, 0, 0)), 0.0);
    }

    #[test]
    fn dice_and_overlap_values() {
        assert_eq!(t(100, 50, 10).fraction(Measure::Dice), (20, 150));
        assert!((dice(t(100, 50, 10)) - 0.13333).abs() < 1e-5);
        assert_eq!(overlap(t(100, 50, 50)), 1.0);
        assert_eq!(overlap(t(0, 0, 0)), 0.0);
        assert_eq!(overlap(t(0, 7, 3)), 0.0);
    }

    #[test]
    fn clamp_cases() {
        assert_eq!(
            t(10, 10, 10),
            HitCountTriple {
                singleton_a: 10,
                singleton_b: 10,
                doubleton: 10
            }
        );
        assert_eq!(
            t(5, 8, 9),
            HitCountTriple {
                singleton_a: 5,
                singleton_b: 8,
                doubleton: 5
            }
        );
    }

    #[test]
    fn measure_and_variant_parse() {
        assert_eq!("Dice".parse::<Measure>().unwrap(), Measure::Dice);
        assert!("pmi".parse::<Measure>().is_err());
        assert_eq!("srwk".parse::<Variant>().unwrap(), Variant::Srwk);
    }

    fn fixture() -> Gateway<FixtureCorpus> {
        // alice: 1,2,3,4; bob: 3,4,5; both: 3,4. "graph": 2,3,4,5.
        let docs = [
            (1, "alice solo", "bio"),
            (2, "alice graph", "talk"),
            (3, "alice and bob", "graph mining"),
            (4, "bob, alice", "graph theory"),
            (5, "bob graph", "notes"),
            (6, "carol", "nothing"),
        ]
        .into_iter()
        .map(|(id, title, body)| Document {
            id,
            url: format!("http://ex.org/{id}"),
            title: title.into(),
            body: body.into(),
        })
        .collect();
        let corpus = FixtureCorpus::new("t", docs).unwrap();
        let ledger = BudgetLedger::new(100, chrono::Utc::now().date_naive()).unwrap();
        Gateway::new(corpus, QueryCache::new(), ledger)
    }

    #[test]
    fn sr_on_fixture() {
        let gw = fixture();
        let (a, b) = (Actor::new("alice").unwrap(), Actor::new("bob").unwrap());
        let ev = detect_relation(&a, &b, &gw).unwrap();
        let s = sr(&ev, &gw, Measure::Jaccard).unwrap();
        assert_eq!(s.counts, t(4, 3, 2));
        assert_eq!(s.value, 0.4);
        assert_eq!(gw.stats().singleton_queries, 2);
        let again = sr(&ev, &gw, Measure::Jaccard).unwrap();
        assert_eq!(again, s);
        assert_eq!(gw.stats().backend_calls, 3);
    }

    #[test]
    fn sr_requires_detection() {
        let gw = fixture();
        let ev = detect_relation(
            &Actor::new("alice").unwrap(),
            &Actor::new("carol").unwrap(),
            &gw,
        )
        .unwrap();
        assert!(matches!(
            sr(&ev, &gw, Measure::Jaccard),
            Err(Error::NotDetected(..))
        ));
    }

    #[test]
    fn srwk_on_fixture() {
        let gw = fixture();
        let (a, b) = (Actor::new("alice").unwrap(), Actor::new("bob").unwrap());
        // alice+graph: 2,3,4; bob+graph: 3,4,5; all four: 3,4.
        let s = sr_with_keywords(&a, "graph", &b, "graph", &gw, Measure::Jaccard).unwrap();
        assert_eq!(s.counts, t(3, 3, 2));
        assert_eq!(s.value, 0.5);
        assert_eq!(s.variant, Variant::Srwk);
        assert_eq!(s.keywords_used, Some(("graph".into(), "graph".into())));
        assert_eq!(gw.stats().keyword_queries, 3);
        let swapped = sr_with_keywords(&b, "graph", &a, "graph", &gw, Measure::Jaccard).unwrap();
        assert_eq!(swapped, s);
        assert_eq!(gw.stats().keyword_queries, 3);
    }

    #[test]
    fn srwk_rejects_empty_keywords() {
        let gw = fixture();
        let (a, b) = (Actor::new("alice").unwrap(), Actor::new("bob").unwrap());
        assert!(matches!(
            sr_with_keywords(&a, "", &b, "", &gw, Measure::Jaccard),
            Err(Error::EmptyKeyword)
        ));
        assert!(matches!(
            sr_with_keywords(&a, "graph", &b, " ", &gw, Measure::Jaccard),
            Err(Error::EmptyKeyword)
        ));
    }
}
