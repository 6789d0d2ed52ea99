//! The graph file format and canonical serialization.
//!
//! A graph file is a JSON object with the keys
//!
//! ```text
//! {"halfedges":[ids], "vertices":[[ids]], "edges":[[id,id]],
//!  "externals":[id], "cut_edges":[[id,id]]?, "vertex_splits":[[[ids],...]]?,
//!  "edge_masses":{"id,id": symbol}?}
//! ```
//!
//! Half-edge identifiers are opaque: any JSON string or integer is accepted
//! and mapped to a dense internal index.  The order of `externals` defines
//! the external leg labels `1..n`.  Serialization is deterministic: indices
//! are emitted in the graph's normalized order with a fixed key order.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::cut::{PreCutGraph, Split};
use crate::error::{FeynError, Result};
use crate::graph::{EdgeIx, EdgeSet, Graph, HalfEdge};

/// A parsed graph file: the pre-cut graph (core when no cuts or splits are
/// present) plus optional mass symbols per internal edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub precut: PreCutGraph,
    pub masses: BTreeMap<EdgeIx, String>,
}

impl GraphFile {
    /// The underlying base graph.
    pub fn graph(&self) -> &Graph {
        &self.precut.base
    }

    /// Indices of edges carrying a nonzero mass symbol.
    pub fn massive_edges(&self) -> EdgeSet {
        self.masses.keys().copied().collect()
    }
}

fn invalid(msg: impl Into<String>) -> FeynError {
    FeynError::Invalid(msg.into())
}

/// Renders an opaque JSON identifier (integer or string) as a map key.
fn id_of(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(invalid(format!(
            "half-edge identifiers must be strings or integers, got {other}"
        ))),
    }
}

struct Ids {
    map: BTreeMap<String, HalfEdge>,
    explicit: bool,
}

impl Ids {
    fn resolve(&mut self, v: &Value) -> Result<HalfEdge> {
        let key = id_of(v)?;
        if let Some(&h) = self.map.get(&key) {
            return Ok(h);
        }
        if self.explicit {
            return Err(invalid(format!(
                "half-edge {key} is not listed in \"halfedges\""
            )));
        }
        let h = self.map.len();
        self.map.insert(key, h);
        Ok(h)
    }
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a [Value]> {
    v.as_array()
        .map(Vec::as_slice)
        .ok_or_else(|| invalid(format!("{what} must be an array")))
}

fn edge_pair(v: &Value, ids: &mut Ids, what: &str) -> Result<(HalfEdge, HalfEdge)> {
    let pair = as_array(v, what)?;
    if pair.len() != 2 {
        return Err(invalid(format!("{what} entries must be pairs [id,id]")));
    }
    Ok((ids.resolve(&pair[0])?, ids.resolve(&pair[1])?))
}

/// Finds the internal edge index matching an unordered half-edge pair.
fn edge_index(g: &Graph, pair: (HalfEdge, HalfEdge)) -> Result<EdgeIx> {
    let norm = if pair.0 <= pair.1 { pair } else { (pair.1, pair.0) };
    g.edges
        .iter()
        .position(|&e| e == norm)
        .ok_or_else(|| invalid(format!("no internal edge ({}, {})", pair.0, pair.1)))
}

/// Parses a graph file from its JSON text.
pub fn parse(text: &str) -> Result<GraphFile> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| invalid(format!("malformed JSON: {e}")))?;
    parse_value(&v)
}

/// Parses a graph file from a JSON value.
pub fn parse_value(v: &Value) -> Result<GraphFile> {
    let obj = v
        .as_object()
        .ok_or_else(|| invalid("graph file must be a JSON object"))?;
    for key in obj.keys() {
        if !matches!(
            key.as_str(),
            "halfedges" | "vertices" | "edges" | "externals" | "cut_edges"
                | "vertex_splits" | "edge_masses"
        ) {
            return Err(invalid(format!("unknown key {key:?}")));
        }
    }
    let mut ids = Ids { map: BTreeMap::new(), explicit: false };
    if let Some(hs) = obj.get("halfedges") {
        for h in as_array(hs, "halfedges")? {
            let key = id_of(h)?;
            let next = ids.map.len();
            if ids.map.insert(key.clone(), next).is_some() {
                return Err(invalid(format!("duplicate half-edge {key}")));
            }
        }
        ids.explicit = true;
    }

    let mut vertices: Vec<Vec<HalfEdge>> = Vec::new();
    for part in as_array(
        obj.get("vertices").ok_or_else(|| invalid("missing \"vertices\""))?,
        "vertices",
    )? {
        let mut corolla = Vec::new();
        for h in as_array(part, "vertex part")? {
            corolla.push(ids.resolve(h)?);
        }
        vertices.push(corolla);
    }

    let mut edges: Vec<(HalfEdge, HalfEdge)> = Vec::new();
    if let Some(es) = obj.get("edges") {
        for e in as_array(es, "edges")? {
            edges.push(edge_pair(e, &mut ids, "edges")?);
        }
    }

    let mut externals: Vec<HalfEdge> = Vec::new();
    if let Some(xs) = obj.get("externals") {
        for h in as_array(xs, "externals")? {
            externals.push(ids.resolve(h)?);
        }
    }

    let graph = Graph::validate(vertices, edges, externals)?;

    let mut cuts = EdgeSet::new();
    if let Some(cs) = obj.get("cut_edges") {
        for c in as_array(cs, "cut_edges")? {
            cuts.insert(edge_index(&graph, edge_pair(c, &mut ids, "cut_edges")?)?);
        }
    }

    let mut splits: BTreeMap<usize, Split> = BTreeMap::new();
    if let Some(ss) = obj.get("vertex_splits") {
        for split in as_array(ss, "vertex_splits")? {
            let mut parts: Split = Vec::new();
            for part in as_array(split, "vertex split")? {
                let mut p = Vec::new();
                for h in as_array(part, "split part")? {
                    p.push(ids.resolve(h)?);
                }
                parts.push(p);
            }
            let union: std::collections::BTreeSet<HalfEdge> =
                parts.iter().flatten().copied().collect();
            let vix = graph
                .vertices
                .iter()
                .position(|c| {
                    c.iter().copied().collect::<std::collections::BTreeSet<_>>()
                        == union
                })
                .ok_or_else(|| invalid("vertex split matches no corolla"))?;
            if splits.insert(vix, parts).is_some() {
                return Err(invalid(format!("two splits for vertex {vix}")));
            }
        }
    }

    let mut masses: BTreeMap<EdgeIx, String> = BTreeMap::new();
    if let Some(ms) = obj.get("edge_masses") {
        let mobj = ms
            .as_object()
            .ok_or_else(|| invalid("edge_masses must be an object"))?;
        for (key, sym) in mobj {
            let (a, b) = key
                .split_once(',')
                .ok_or_else(|| invalid(format!("edge_masses key {key:?} is not \"id,id\"")))?;
            let ha = ids.resolve(&Value::String(a.trim().to_string()))?;
            let hb = ids.resolve(&Value::String(b.trim().to_string()))?;
            let sym = sym
                .as_str()
                .ok_or_else(|| invalid("mass symbols must be strings"))?;
            masses.insert(edge_index(&graph, (ha, hb))?, sym.to_string());
        }
    }

    let precut = PreCutGraph::new(graph, cuts, splits)?;
    Ok(GraphFile { precut, masses })
}

/// Serializes a graph file deterministically: internal half-edge indices,
/// vertices and edges in normalized order, a fixed key order, and optional
/// keys omitted when empty.
pub fn to_value(f: &GraphFile) -> Value {
    let g = &f.precut.base;
    let mut halfedges: Vec<HalfEdge> = g
        .vertices
        .iter()
        .flatten()
        .copied()
        .collect();
    halfedges.sort_unstable();
    let mut obj = Map::new();
    obj.insert("halfedges".into(), json!(halfedges));
    obj.insert("vertices".into(), json!(g.vertices));
    obj.insert(
        "edges".into(),
        json!(g.edges.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>()),
    );
    obj.insert("externals".into(), json!(g.externals));
    if !f.precut.cuts.is_empty() {
        obj.insert(
            "cut_edges".into(),
            json!(f
                .precut
                .cuts
                .iter()
                .map(|&c| vec![g.edges[c].0, g.edges[c].1])
                .collect::<Vec<_>>()),
        );
    }
    if !f.precut.splits.is_empty() {
        obj.insert(
            "vertex_splits".into(),
            json!(f.precut.splits.values().collect::<Vec<_>>()),
        );
    }
    if !f.masses.is_empty() {
        let mut m = Map::new();
        for (&e, sym) in &f.masses {
            m.insert(
                format!("{},{}", g.edges[e].0, g.edges[e].1),
                json!(sym),
            );
        }
        obj.insert("edge_masses".into(), Value::Object(m));
    }
    Value::Object(obj)
}

/// Serializes a graph file to its JSON text.
pub fn to_json(f: &GraphFile) -> String {
    serde_json::to_string_pretty(&to_value(f)).expect("serialization succeeds")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn round_trip_triangle() {
        let g = examples::triangle();
        let f = GraphFile {
            precut: PreCutGraph::core(g),
            masses: BTreeMap::new(),
        };
        let back = parse(&to_json(&f)).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn parses_opaque_string_ids() {
        let text = r#"{
            "vertices": [["a","b","c"],["d","e","f"]],
            "edges": [["a","d"],["c","f"]],
            "externals": ["b","e"],
            "cut_edges": [["a","d"]],
            "edge_masses": {"c,f": "m1"}
        }"#;
        let f = parse(text).unwrap();
        assert_eq!(f.precut.base.v(), 2);
        assert_eq!(f.precut.base.e(), 2);
        assert_eq!(f.precut.cuts.len(), 1);
        assert_eq!(f.masses.len(), 1);
        let back = parse(&to_json(&f)).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_small_corolla() {
        let text = r#"{
            "vertices": [[0, 1]],
            "edges": [[0, 1]],
            "externals": []
        }"#;
        match parse(text) {
            Err(FeynError::SmallCorolla(2)) => {}
            other => panic!("expected SmallCorolla, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_key() {
        assert!(parse(r#"{"vertices": [], "bogus": 1}"#).is_err());
    }
}
