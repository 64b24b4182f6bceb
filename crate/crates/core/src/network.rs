//! Multi-source multi-sink acyclic networks.
//!
//! [`NetworkSpec`] is the on-disk JSON shape. [`NetworkSpec::validate`] turns
//! it into an index-based [`Network`], and [`Network::augment`] attaches one
//! virtual source per real source with `r_i` parallel unit-capacity edges,
//! producing the [`AugmentedNetwork`] everything downstream works on.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;
pub type EdgeId = usize;

/// Names starting with this character are reserved for virtual nodes/edges.
pub const RESERVED_PREFIX: char = '*';

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: String,
    pub tail: String,
    pub head: String,
}

/// Network file contents. Demands map a sink name to 1-based source indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeSpec>,
    pub sources: Vec<String>,
    pub sinks: Vec<String>,
    pub demands: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateNode(String),
    ReservedName {
        field: String,
        name: String,
    },
    DuplicateEdgeId(String),
    UnknownNode {
        field: String,
        node: String,
    },
    DuplicateSource(String),
    DuplicateSink(String),
    SourceIsSink(String),
    NoSinks,
    MissingDemand {
        sink: String,
    },
    DemandForNonSink {
        node: String,
    },
    EmptyDemand {
        sink: String,
    },
    DemandOutOfRange {
        sink: String,
        index: usize,
        sources: usize,
    },
    /// Edge ids along a directed cycle, in traversal order.
    Cycle {
        witness: Vec<String>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNode(n) => write!(f, "nodes: duplicate node {n:?}"),
            Violation::ReservedName { field, name } => write!(
                f,
                "{field}: name {name:?} starts with reserved character '{RESERVED_PREFIX}'"
            ),
            Violation::DuplicateEdgeId(id) => write!(f, "edges: duplicate edge id {id:?}"),
            Violation::UnknownNode { field, node } => write!(f, "{field}: unknown node {node:?}"),
            Violation::DuplicateSource(n) => write!(f, "sources: {n:?} listed twice"),
            Violation::DuplicateSink(n) => write!(f, "sinks: {n:?} listed twice"),
            Violation::SourceIsSink(n) => write!(f, "sinks: {n:?} is also a source"),
            Violation::NoSinks => write!(f, "sinks: at least one sink is required"),
            Violation::MissingDemand { sink } => write!(f, "demands: no entry for sink {sink:?}"),
            Violation::DemandForNonSink { node } => {
                write!(f, "demands.{node}: {node:?} is not a declared sink")
            }
            Violation::EmptyDemand { sink } => write!(f, "demands.{sink}: demand set is empty"),
            Violation::DemandOutOfRange {
                sink,
                index,
                sources,
            } => write!(
                f,
                "demands.{sink}: source index {index} outside 1..={sources}"
            ),
            Violation::Cycle { witness } => {
                write!(f, "edges: directed cycle through {}", witness.join(" -> "))
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ValidationError(pub Vec<Violation>);

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RateError {
    #[error("rate vector has {found} entries but the network has {expected} sources")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cannot parse rate {0:?}: expected comma-separated naturals")]
    Syntax(String),
}

impl NetworkSpec {
    pub fn from_json(text: &str) -> Result<NetworkSpec, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Checks every structural requirement and reports all violations found.
    pub fn validate(&self) -> Result<Network, ValidationError> {
        let mut violations = Vec::new();

        let mut index: HashMap<&str, NodeId> = HashMap::new();
        for n in &self.nodes {
            if n.starts_with(RESERVED_PREFIX) {
                violations.push(Violation::ReservedName {
                    field: "nodes".into(),
                    name: n.clone(),
                });
            }
            if index.insert(n.as_str(), index.len()).is_some() {
                violations.push(Violation::DuplicateNode(n.clone()));
            }
        }
        // duplicates collapse onto one index; renumber densely by first occurrence
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<&str, NodeId> = HashMap::new();
        for n in &self.nodes {
            if !index.contains_key(n.as_str()) {
                index.insert(n.as_str(), names.len());
                names.push(n.clone());
            }
        }

        let resolve = |field: String, name: &str, violations: &mut Vec<Violation>| {
            let found = index.get(name).copied();
            if found.is_none() {
                violations.push(Violation::UnknownNode {
                    field,
                    node: name.to_string(),
                });
            }
            found
        };

        let mut seen_ids = HashSet::new();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            if e.id.starts_with(RESERVED_PREFIX) {
                violations.push(Violation::ReservedName {
                    field: format!("edges[{k}].id"),
                    name: e.id.clone(),
                });
            }
            if !seen_ids.insert(e.id.as_str()) {
                violations.push(Violation::DuplicateEdgeId(e.id.clone()));
            }
            let tail = resolve(format!("edges[{k}].tail"), &e.tail, &mut violations);
            let head = resolve(format!("edges[{k}].head"), &e.head, &mut violations);
            if let (Some(tail), Some(head)) = (tail, head) {
                edges.push(Edge {
                    id: e.id.clone(),
                    tail,
                    head,
                });
            }
        }

        let mut sources = Vec::new();
        for (k, s) in self.sources.iter().enumerate() {
            if let Some(id) = resolve(format!("sources[{k}]"), s, &mut violations) {
                if sources.contains(&id) {
                    violations.push(Violation::DuplicateSource(s.clone()));
                } else {
                    sources.push(id);
                }
            }
        }
        let m = self.sources.len();

        if self.sinks.is_empty() {
            violations.push(Violation::NoSinks);
        }
        let mut sinks = Vec::new();
        let mut demands = Vec::new();
        for (k, t) in self.sinks.iter().enumerate() {
            let Some(id) = resolve(format!("sinks[{k}]"), t, &mut violations) else {
                continue;
            };
            if sinks.contains(&id) {
                violations.push(Violation::DuplicateSink(t.clone()));
                continue;
            }
            if sources.contains(&id) {
                violations.push(Violation::SourceIsSink(t.clone()));
            }
            let mut dem: Vec<usize> = Vec::new();
            match self.demands.get(t) {
                None => violations.push(Violation::MissingDemand { sink: t.clone() }),
                Some(list) if list.is_empty() => {
                    violations.push(Violation::EmptyDemand { sink: t.clone() })
                }
                Some(list) => {
                    for &i in list {
                        if i == 0 || i > m {
                            violations.push(Violation::DemandOutOfRange {
                                sink: t.clone(),
                                index: i,
                                sources: m,
                            });
                        } else if !dem.contains(&(i - 1)) {
                            dem.push(i - 1);
                        }
                    }
                }
            }
            dem.sort_unstable();
            sinks.push(id);
            demands.push(dem);
        }
        for node in self.demands.keys() {
            if !self.sinks.contains(node) {
                violations.push(Violation::DemandForNonSink { node: node.clone() });
            }
        }

        if let Some(witness) = find_cycle(names.len(), &edges) {
            violations.push(Violation::Cycle {
                witness: witness.into_iter().map(|e| edges[e].id.clone()).collect(),
            });
        }

        if !violations.is_empty() {
            return Err(ValidationError(violations));
        }
        Ok(Network {
            name: self.name.clone().unwrap_or_else(|| "network".to_string()),
            nodes: names,
            edges,
            sources,
            sinks,
            demands,
        })
    }
}

/// Returns the edge indices of some directed cycle, if one exists.
fn find_cycle(node_count: usize, edges: &[Edge]) -> Option<Vec<EdgeId>> {
    let mut indeg = vec![0usize; node_count];
    let mut out: Vec<Vec<EdgeId>> = vec![Vec::new(); node_count];
    let mut inc: Vec<Vec<EdgeId>> = vec![Vec::new(); node_count];
    for (k, e) in edges.iter().enumerate() {
        indeg[e.head] += 1;
        out[e.tail].push(k);
        inc[e.head].push(k);
    }
    let mut stack: Vec<NodeId> = (0..node_count).filter(|&v| indeg[v] == 0).collect();
    let mut removed = vec![false; node_count];
    while let Some(v) = stack.pop() {
        removed[v] = true;
        for &k in &out[v] {
            let h = edges[k].head;
            indeg[h] -= 1;
            if indeg[h] == 0 {
                stack.push(h);
            }
        }
    }
    // every leftover node has an in-edge from another leftover node; walk
    // backwards until a node repeats
    let start = (0..node_count).find(|&v| !removed[v])?;
    let mut position: HashMap<NodeId, usize> = HashMap::new();
    let mut walked: Vec<EdgeId> = Vec::new();
    let mut v = start;
    loop {
        if let Some(&p) = position.get(&v) {
            let mut cycle = walked[p..].to_vec();
            cycle.reverse();
            return Some(cycle);
        }
        position.insert(v, walked.len());
        let k = *inc[v]
            .iter()
            .find(|&&k| !removed[edges[k].tail])
            .expect("leftover node has a leftover predecessor");
        walked.push(k);
        v = edges[k].tail;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: NodeId,
    pub head: NodeId,
}

/// A validated network with dense node and edge indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    name: String,
    nodes: Vec<String>,
    edges: Vec<Edge>,
    sources: Vec<NodeId>,
    sinks: Vec<NodeId>,
    demands: Vec<Vec<usize>>,
}

impl Network {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn sources(&self) -> &[NodeId] {
        &self.sources
    }

    pub fn sinks(&self) -> &[NodeId] {
        &self.sinks
    }

    pub fn source_count(&self) -> usize {
        self.sources.len()
    }

    /// 0-based demanded source indices of the `k`-th sink.
    pub fn demand(&self, sink_pos: usize) -> &[usize] {
        &self.demands[sink_pos]
    }

    pub fn node_name(&self, v: NodeId) -> &str {
        &self.nodes[v]
    }

    pub fn to_spec(&self) -> NetworkSpec {
        let name = |v: NodeId| self.nodes[v].clone();
        NetworkSpec {
            name: Some(self.name.clone()),
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    id: e.id.clone(),
                    tail: name(e.tail),
                    head: name(e.head),
                })
                .collect(),
            sources: self.sources.iter().map(|&v| name(v)).collect(),
            sinks: self.sinks.iter().map(|&v| name(v)).collect(),
            demands: self
                .sinks
                .iter()
                .zip(&self.demands)
                .map(|(&t, d)| (name(t), d.iter().map(|i| i + 1).collect()))
                .collect(),
        }
    }

    pub fn augment(&self, rate: &RateVector) -> Result<AugmentedNetwork, RateError> {
        AugmentedNetwork::new(self.clone(), rate.clone())
    }
}

/// Symbols injected per source per time unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RateVector(pub Vec<u32>);

impl RateVector {
    pub fn zeros(m: usize) -> Self {
        RateVector(vec![0; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&r| r as usize).sum()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &RateVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for RateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FromStr for RateVector {
    type Err = RateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|x| x.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map(RateVector)
            .map_err(|_| RateError::Syntax(s.to_string()))
    }
}

impl From<Vec<u32>> for RateVector {
    fn from(v: Vec<u32>) -> Self {
        RateVector(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// `index`-th (0-based) parallel edge from the virtual source of `source`.
    Virtual { source: usize, index: usize },
    /// Edge `k` of the base network.
    Base(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugEdge {
    pub id: String,
    pub tail: NodeId,
    pub head: NodeId,
    pub kind: EdgeKind,
}

impl AugEdge {
    pub fn is_virtual(&self) -> bool {
        matches!(self.kind, EdgeKind::Virtual { .. })
    }
}

/// Base network plus virtual sources. Node `n + i` is the virtual source of
/// source `i`; edges `0..r` are the virtual edges (grouped by source, in tag
/// order) and edge `r + k` is base edge `k`.
#[derive(Debug, Clone)]
pub struct AugmentedNetwork {
    base: Network,
    rate: RateVector,
    node_names: Vec<String>,
    edges: Vec<AugEdge>,
    in_edges: Vec<Vec<EdgeId>>,
    out_edges: Vec<Vec<EdgeId>>,
    offsets: Vec<usize>,
    dimension: usize,
    topo_edges: Vec<EdgeId>,
}

impl AugmentedNetwork {
    fn new(base: Network, rate: RateVector) -> Result<Self, RateError> {
        let m = base.source_count();
        if rate.len() != m {
            return Err(RateError::LengthMismatch {
                expected: m,
                found: rate.len(),
            });
        }
        let n = base.nodes.len();
        let mut node_names = base.nodes.clone();
        node_names.extend(
            base.sources
                .iter()
                .map(|&s| format!("{RESERVED_PREFIX}{}", base.nodes[s])),
        );

        let mut edges = Vec::with_capacity(rate.total() + base.edges.len());
        let mut offsets = Vec::with_capacity(m);
        for (i, &s) in base.sources.iter().enumerate() {
            offsets.push(edges.len());
            for j in 0..rate.get(i) as usize {
                edges.push(AugEdge {
                    id: format!("{RESERVED_PREFIX}{}.{}", base.nodes[s], j + 1),
                    tail: n + i,
                    head: s,
                    kind: EdgeKind::Virtual {
                        source: i,
                        index: j,
                    },
                });
            }
        }
        let dimension = edges.len();
        edges.extend(base.edges.iter().enumerate().map(|(k, e)| AugEdge {
            id: e.id.clone(),
            tail: e.tail,
            head: e.head,
            kind: EdgeKind::Base(k),
        }));

        let total_nodes = n + m;
        let mut in_edges = vec![Vec::new(); total_nodes];
        let mut out_edges = vec![Vec::new(); total_nodes];
        for (k, e) in edges.iter().enumerate() {
            in_edges[e.head].push(k);
            out_edges[e.tail].push(k);
        }

        let mut aug = AugmentedNetwork {
            base,
            rate,
            node_names,
            edges,
            in_edges,
            out_edges,
            offsets,
            dimension,
            topo_edges: Vec::new(),
        };
        aug.topo_edges = aug.compute_topo_edge_order();
        Ok(aug)
    }

    /// Kahn's algorithm, virtual sources first, then lowest node index; each
    /// node's out-edges are emitted in edge-index order.
    fn compute_topo_edge_order(&self) -> Vec<EdgeId> {
        let n = self.base.nodes.len();
        let total = self.node_names.len();
        let priority = |v: NodeId| if v >= n { (0, v) } else { (1, v) };
        let mut indeg: Vec<usize> = self.in_edges.iter().map(Vec::len).collect();
        let mut heap: BinaryHeap<Reverse<(u8, NodeId)>> = (0..total)
            .filter(|&v| indeg[v] == 0)
            .map(|v| Reverse(priority(v)))
            .collect();
        let mut order = Vec::with_capacity(self.edges.len());
        while let Some(Reverse((_, v))) = heap.pop() {
            for &k in &self.out_edges[v] {
                order.push(k);
                let h = self.edges[k].head;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    heap.push(Reverse(priority(h)));
                }
            }
        }
        debug_assert_eq!(
            order.len(),
            self.edges.len(),
            "validated networks are acyclic"
        );
        order
    }

    pub fn base(&self) -> &Network {
        &self.base
    }

    /// Drops the virtual sources, recovering the base network.
    pub fn strip(&self) -> Network {
        self.base.clone()
    }

    pub fn rate(&self) -> &RateVector {
        &self.rate
    }

    /// Global coding dimension r = sum of r_i.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn node_name(&self, v: NodeId) -> &str {
        &self.node_names[v]
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.node_names.iter().position(|n| n == name)
    }

    pub fn edges(&self) -> &[AugEdge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &AugEdge {
        &self.edges[e]
    }

    pub fn edge_by_id(&self, id: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    pub fn source_count(&self) -> usize {
        self.base.source_count()
    }

    pub fn source_node(&self, i: usize) -> NodeId {
        self.base.sources[i]
    }

    pub fn virtual_source(&self, i: usize) -> NodeId {
        self.base.nodes.len() + i
    }

    pub fn virtual_sources(&self) -> Vec<NodeId> {
        (0..self.source_count())
            .map(|i| self.virtual_source(i))
            .collect()
    }

    pub fn is_virtual_node(&self, v: NodeId) -> bool {
        v >= self.base.nodes.len()
    }

    pub fn sinks(&self) -> &[NodeId] {
        &self.base.sinks
    }

    pub fn sink_position(&self, v: NodeId) -> Option<usize> {
        self.base.sinks.iter().position(|&t| t == v)
    }

    pub fn demand(&self, sink_pos: usize) -> &[usize] {
        self.base.demand(sink_pos)
    }

    /// Coordinate of the basis vector b_{i,j} (0-based i and j).
    pub fn coordinate(&self, source: usize, index: usize) -> usize {
        self.offsets[source] + index
    }

    /// All coordinates belonging to source `i`.
    pub fn source_coordinates(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i] + self.rate.get(i) as usize
    }

    /// Edges in an order where every edge follows all in-edges of its tail.
    pub fn topo_edge_order(&self) -> &[EdgeId] {
        &self.topo_edges
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn spec(
        edges: &[(&str, &str, &str)],
        sources: &[&str],
        sinks: &[&str],
        dem: &[(&str, &[usize])],
    ) -> NetworkSpec {
        let mut nodes: Vec<String> = Vec::new();
        for (_, t, h) in edges {
            for n in [t, h] {
                if !nodes.iter().any(|x| x == n) {
                    nodes.push(n.to_string());
                }
            }
        }
        NetworkSpec {
            name: None,
            nodes,
            edges: edges
                .iter()
                .map(|(id, t, h)| EdgeSpec {
                    id: id.to_string(),
                    tail: t.to_string(),
                    head: h.to_string(),
                })
                .collect(),
            sources: sources.iter().map(|s| s.to_string()).collect(),
            sinks: sinks.iter().map(|s| s.to_string()).collect(),
            demands: dem
                .iter()
                .map(|(t, d)| (t.to_string(), d.to_vec()))
                .collect(),
        }
    }

    #[test]
    fn single_edge_is_valid() {
        let net = spec(&[("e", "s", "t")], &["s"], &["t"], &[("t", &[1])])
            .validate()
            .unwrap();
        assert_eq!(net.edges().len(), 1);
        assert_eq!(net.demand(0), &[0]);
    }

    #[test]
    fn two_cycle_reported_with_witness() {
        let err = spec(
            &[("ab", "a", "b"), ("ba", "b", "a"), ("bt", "b", "t")],
            &["a"],
            &["t"],
            &[("t", &[1])],
        )
        .validate()
        .unwrap_err();
        let witness = err
            .0
            .iter()
            .find_map(|v| match v {
                Violation::Cycle { witness } => Some(witness.clone()),
                _ => None,
            })
            .unwrap();
        let mut sorted = witness.clone();
        sorted.sort();
        assert_eq!(sorted, vec!["ab", "ba"]);
        // consecutive witness edges chain head -> tail
        let s = spec(&[("ab", "a", "b"), ("ba", "b", "a")], &[], &[], &[]);
        let e = |id: &str| s.edges.iter().find(|e| e.id == id).unwrap().clone();
        for w in 0..witness.len() {
            let next = &witness[(w + 1) % witness.len()];
            assert_eq!(e(&witness[w]).head, e(next).tail);
        }
    }

    #[test]
    fn self_loop_is_cycle() {
        let err = spec(
            &[("aa", "a", "a"), ("at", "a", "t")],
            &["a"],
            &["t"],
            &[("t", &[1])],
        )
        .validate()
        .unwrap_err();
        assert!(err.0.contains(&Violation::Cycle {
            witness: vec!["aa".into()]
        }));
    }

    #[test]
    fn demand_range_checked() {
        let err = spec(
            &[("a", "s1", "t"), ("b", "s2", "t")],
            &["s1", "s2"],
            &["t"],
            &[("t", &[3])],
        )
        .validate()
        .unwrap_err();
        assert_eq!(
            err.0,
            vec![Violation::DemandOutOfRange {
                sink: "t".into(),
                index: 3,
                sources: 2
            }]
        );
    }

    #[test]
    fn violations_are_collected() {
        let mut s = spec(
            &[("e", "s", "t"), ("e", "s", "x")],
            &["s"],
            &["t", "s"],
            &[("t", &[])],
        );
        s.nodes.retain(|n| n != "x");
        s.nodes.push("*v".into());
        let err = s.validate().unwrap_err();
        let text = err.to_string();
        assert!(err.0.contains(&Violation::DuplicateEdgeId("e".into())));
        assert!(err.0.contains(&Violation::EmptyDemand { sink: "t".into() }));
        assert!(err.0.contains(&Violation::SourceIsSink("s".into())));
        assert!(err
            .0
            .contains(&Violation::MissingDemand { sink: "s".into() }));
        assert!(err
            .0
            .iter()
            .any(|v| matches!(v, Violation::ReservedName { .. })));
        assert!(text.contains("edges[1].head: unknown node \"x\""), "{text}");
        let no_sinks = spec(&[("e", "s", "t")], &["s"], &[], &[])
            .validate()
            .unwrap_err();
        assert_eq!(no_sinks.0, vec![Violation::NoSinks]);
    }

    #[test]
    fn parse_errors_carry_location() {
        let err =
            NetworkSpec::from_json("{\n  \"nodes\": [\"a\"],\n  \"edges\": 7\n}").unwrap_err();
        assert_eq!(err.line, 3);
        let err = NetworkSpec::from_json("{\"nodes\": [], \"bogus\": 1}").unwrap_err();
        assert!(err.message.contains("bogus"));
    }

    #[test]
    fn augmentation_tags() {
        let net = fixtures::crossing();
        let aug = net.augment(&RateVector(vec![2, 1])).unwrap();
        let tags: Vec<_> = aug
            .edges()
            .iter()
            .filter_map(|e| match e.kind {
                EdgeKind::Virtual { source, index } => Some((source + 1, index + 1)),
                _ => None,
            })
            .collect();
        assert_eq!(tags, vec![(1, 1), (1, 2), (2, 1)]);
        assert_eq!(aug.dimension(), 3);
        assert_eq!(aug.coordinate(1, 0), 2);
        assert_eq!(aug.strip(), net);

        let zero = net.augment(&RateVector(vec![0, 0])).unwrap();
        assert_eq!(zero.dimension(), 0);
        assert!(zero.edges().iter().all(|e| !e.is_virtual()));

        assert_eq!(
            net.augment(&RateVector(vec![1])).unwrap_err(),
            RateError::LengthMismatch {
                expected: 2,
                found: 1
            }
        );
    }

    fn assert_prefix_closed(aug: &AugmentedNetwork) {
        let order = aug.topo_edge_order();
        assert_eq!(order.len(), aug.edges().len());
        let mut placed = vec![false; aug.edges().len()];
        for &e in order {
            for &pred in aug.in_edges(aug.edge(e).tail) {
                assert!(
                    placed[pred],
                    "{} before {}",
                    aug.edge(pred).id,
                    aug.edge(e).id
                );
            }
            placed[e] = true;
        }
        let first_base = order
            .iter()
            .position(|&e| !aug.edge(e).is_virtual())
            .unwrap_or(order.len());
        assert!(order[first_base..]
            .iter()
            .all(|&e| !aug.edge(e).is_virtual()));
    }

    #[test]
    fn topo_order_path() {
        let net = spec(
            &[("bc", "b", "c"), ("ab", "a", "b")],
            &["a"],
            &["c"],
            &[("c", &[1])],
        )
        .validate()
        .unwrap();
        let aug = net.augment(&RateVector(vec![1])).unwrap();
        let ids: Vec<_> = aug
            .topo_edge_order()
            .iter()
            .map(|&e| aug.edge(e).id.as_str())
            .collect();
        assert_eq!(ids, vec!["*a.1", "ab", "bc"]);
    }

    #[test]
    fn topo_order_fixtures_prefix_closed() {
        for (net, rate) in fixtures::all_with_rates() {
            assert_prefix_closed(&net.augment(&rate).unwrap());
        }
    }

    #[test]
    fn rate_syntax() {
        assert_eq!(
            "2, 1".parse::<RateVector>().unwrap(),
            RateVector(vec![2, 1])
        );
        assert_eq!(RateVector(vec![2, 1]).to_string(), "2,1");
        assert!("2,-1".parse::<RateVector>().is_err());
        assert!("".parse::<RateVector>().is_err());
    }

    #[test]
    fn spec_round_trip() {
        for (net, _) in fixtures::all_with_rates() {
            let back = NetworkSpec::from_json(&net.to_spec().to_json())
                .unwrap()
                .validate()
                .unwrap();
            assert_eq!(back, net);
        }
    }

    proptest::proptest! {
        #[test]
        fn random_networks_prefix_closed(seed in 0u64..500) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (net, rate) = crate::random::random_instance(&mut rng, &crate::random::InstanceParams::default());
            let aug = net.augment(&rate).unwrap();
            assert_prefix_closed(&aug);
            proptest::prop_assert_eq!(aug.strip(), net);
        }
    }
}
