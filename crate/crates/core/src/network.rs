//! Network assembly: actors become nodes, detected pairs above the
//! threshold become weighted, labeled edges.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::labels::{EdgeLabels, UsrScore};
use crate::relation::{check_unique, Actor, RelationEvidence};
use crate::strength::{Measure, StrengthScore, Variant};
use crate::{Error, Result};

/// Unordered actor pair as `(smaller id, larger id)`.
pub type PairKey = (String, String);

pub fn pair_key(a: &str, b: &str) -> PairKey {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub backend: String,
    pub measure: Measure,
    pub variant: Variant,
    pub threshold: f64,
    pub page_size: usize,
    /// The only wall-clock field; everything else is reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: String,
    pub b: String,
    pub weight: StrengthScore,
    pub usr: UsrScore,
    pub labels: EdgeLabels,
    pub evidence_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocialNetwork {
    pub provenance: Provenance,
    pub nodes: Vec<Actor>,
    pub edges: Vec<Edge>,
}

/// Per-pair signals computed for Rule-1-detected pairs.
#[derive(Debug, Clone, Default)]
pub struct PairSignals {
    pub scores: BTreeMap<PairKey, StrengthScore>,
    pub usr: BTreeMap<PairKey, UsrScore>,
    pub labels: BTreeMap<PairKey, EdgeLabels>,
}

/// Keeps every actor as a node and every detected pair whose score reaches
/// `threshold` as an edge, in lexicographic pair order.
pub fn build_network(
    actors: &[Actor],
    evidence: &[RelationEvidence],
    signals: &PairSignals,
    threshold: f64,
    provenance: Provenance,
) -> Result<SocialNetwork> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::Config(format!(
            "threshold must be within [0, 1], got {threshold}"
        )));
    }
    check_unique(actors)?;
    let mut nodes = actors.to_vec();
    nodes.sort_by(|x, y| x.id.cmp(&y.id));

    let mut detected: Vec<&RelationEvidence> = evidence.iter().filter(|e| e.detected).collect();
    detected.sort_by(|x, y| x.pair().cmp(&y.pair()));
    detected.dedup_by(|x, y| x.pair() == y.pair());

    let mut edges = Vec::new();
    for ev in detected {
        let key = pair_key(&ev.a.id, &ev.b.id);
        let score = signals
            .scores
            .get(&key)
            .ok_or_else(|| Error::MissingScore(key.0.clone(), key.1.clone()))?;
        if score.value < threshold || ev.a.id == ev.b.id {
            continue;
        }
        let usr = signals.usr.get(&key).cloned().unwrap_or(UsrScore {
            value: 0.0,
            shared_domains: Default::default(),
        });
        edges.push(Edge {
            a: key.0.clone(),
            b: key.1.clone(),
            weight: score.clone(),
            usr,
            labels: signals.labels.get(&key).cloned().unwrap_or_default(),
            evidence_size: ev.l_ab.len(),
        });
    }

    let provenance = Provenance {
        threshold,
        ..provenance
    };
    Ok(SocialNetwork {
        provenance,
        nodes,
        edges,
    })
}

/// Binary adjacency matrix with rows and columns in node-id order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyMatrix {
    pub order: Vec<String>,
    pub cells: Vec<Vec<u8>>,
}

impl AdjacencyMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<u8> {
        let i = self.order.iter().position(|x| x == a)?;
        let j = self.order.iter().position(|x| x == b)?;
        Some(self.cells[i][j])
    }

    pub fn ones(&self) -> usize {
        self.cells.iter().flatten().filter(|&&c| c == 1).count()
    }
}

pub fn to_matrix(net: &SocialNetwork) -> AdjacencyMatrix {
    let mut order: Vec<String> = net.nodes.iter().map(|n| n.id.clone()).collect();
    order.sort();
    let index: BTreeMap<&str, usize> = order
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let n = order.len();
    let mut cells = vec![vec![0u8; n]; n];
    for e in &net.edges {
        if let (Some(&i), Some(&j)) = (index.get(e.a.as_str()), index.get(e.b.as_str())) {
            if i != j {
                cells[i][j] = 1;
                cells[j][i] = 1;
            }
        }
    }
    AdjacencyMatrix { order, cells }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    GraphMl,
    Json,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(Self::Dot),
            "graphml" => Ok(Self::GraphMl),
            "json" => Ok(Self::Json),
            _ => Err(Error::Config(format!("unknown export format {s:?}"))),
        }
    }
}

pub fn export(net: &SocialNetwork, format: ExportFormat) -> Vec<u8> {
    match format {
        ExportFormat::Dot => to_dot(net).into_bytes(),
        ExportFormat::GraphMl => to_graphml(net).into_bytes(),
        ExportFormat::Json => to_json(net).into_bytes(),
    }
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn to_dot(net: &SocialNetwork) -> String {
    let mut out = String::from("graph social_network {\n");
    for n in &net.nodes {
        let _ = writeln!(
            out,
            "  {} [label={}];",
            dot_quote(&n.id),
            dot_quote(&n.name)
        );
    }
    for e in &net.edges {
        let _ = write!(
            out,
            "  {} -- {} [weight={}",
            dot_quote(&e.a),
            dot_quote(&e.b),
            e.weight.value
        );
        if let Some(top) = e.labels.top() {
            let _ = write!(out, ", label={}", dot_quote(&top.token));
        }
        out.push_str("];\n");
    }
    out.push_str("}\n");
    out
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub fn to_graphml(net: &SocialNetwork) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n");
    out.push_str("  <key id=\"name\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    out.push_str("  <key id=\"usr\" for=\"edge\" attr.name=\"usr\" attr.type=\"double\"/>\n");
    out.push_str("  <key id=\"labels\" for=\"edge\" attr.name=\"labels\" attr.type=\"string\"/>\n");
    out.push_str("  <graph id=\"social_network\" edgedefault=\"undirected\">\n");
    for n in &net.nodes {
        let _ = writeln!(
            out,
            "    <node id=\"{}\">\n      <data key=\"name\">{}</data>\n    </node>",
            xml_escape(&n.id),
            xml_escape(&n.name)
        );
    }
    for (i, e) in net.edges.iter().enumerate() {
        let labels = e
            .labels
            .labels
            .iter()
            .map(|l| l.token.as_str())
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            out,
            "    <edge id=\"e{i}\" source=\"{}\" target=\"{}\">\n      <data key=\"weight\">{}</data>\n      <data key=\"usr\">{}</data>\n      <data key=\"labels\">{}</data>\n    </edge>",
            xml_escape(&e.a),
            xml_escape(&e.b),
            e.weight.value,
            e.usr.value,
            xml_escape(&labels)
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

pub fn to_json(net: &SocialNetwork) -> String {
    let mut s = serde_json::to_string_pretty(net).expect("network serializes to JSON");
    s.push('\n');
    s
}

pub fn from_json(json: &str) -> Result<SocialNetwork> {
    serde_json::from_str(json).map_err(|e| Error::json("network json", e))
}
