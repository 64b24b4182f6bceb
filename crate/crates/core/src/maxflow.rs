//! Edge-disjoint paths from a node set to a sink, with a matching minimum cut.
//!
//! Every edge has unit capacity. A temporary super-source feeds each node of
//! the source set; it never appears in the reported paths or cut. The
//! algorithm is Dinic's (BFS level graph plus blocking flow), scanning
//! adjacency in edge-index order so results are reproducible.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::network::{AugmentedNetwork, EdgeId, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("sink {0} is in the source set")]
    SinkInSourceSet(NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowResult {
    pub sources: BTreeSet<NodeId>,
    pub sink: NodeId,
    pub value: usize,
    /// Edge-disjoint paths, each a sequence of edge indices.
    pub paths: Vec<Vec<EdgeId>>,
    /// Edges crossing from the source side to the sink side of a minimum cut.
    pub mincut: BTreeSet<EdgeId>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowViolation {
    #[error("path {0} is empty")]
    EmptyPath(usize),
    #[error("path {path} references unknown edge {edge}")]
    UnknownEdge { path: usize, edge: EdgeId },
    #[error("path {0} does not start in the source set")]
    BadStart(usize),
    #[error("path {0} does not end at the sink")]
    BadEnd(usize),
    #[error("path {path} is not contiguous at position {position}")]
    Discontinuous { path: usize, position: usize },
    #[error("edge {0} is used by more than one path")]
    SharedEdge(EdgeId),
    #[error("cut edge {0} does not exist")]
    UnknownCutEdge(EdgeId),
    #[error("removing the cut leaves the sink reachable")]
    CutDoesNotSeparate,
    #[error("value {value} disagrees with {paths} paths and a cut of size {cut}")]
    ValueMismatch {
        value: usize,
        paths: usize,
        cut: usize,
    },
}

struct Arc {
    to: usize,
    cap: u32,
    rev: usize,
    edge: Option<EdgeId>,
}

struct Dinic {
    graph: Vec<Vec<Arc>>,
    level: Vec<i64>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            graph: (0..n).map(|_| Vec::new()).collect(),
            level: vec![-1; n],
            iter: vec![0; n],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: u32, edge: Option<EdgeId>) {
        let rev_from = self.graph[to].len();
        let rev_to = self.graph[from].len();
        self.graph[from].push(Arc {
            to,
            cap,
            rev: rev_from,
            edge,
        });
        self.graph[to].push(Arc {
            to: from,
            cap: 0,
            rev: rev_to,
            edge: None,
        });
    }

    fn bfs(&mut self, s: usize) {
        self.level.fill(-1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for a in &self.graph[v] {
                if a.cap > 0 && self.level[a.to] < 0 {
                    self.level[a.to] = self.level[v] + 1;
                    queue.push_back(a.to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, limit: u32) -> u32 {
        if v == t {
            return limit;
        }
        while self.iter[v] < self.graph[v].len() {
            let i = self.iter[v];
            let (to, cap) = (self.graph[v][i].to, self.graph[v][i].cap);
            if cap > 0 && self.level[v] < self.level[to] {
                let pushed = self.dfs(to, t, limit.min(cap));
                if pushed > 0 {
                    self.graph[v][i].cap -= pushed;
                    let rev = self.graph[v][i].rev;
                    self.graph[to][rev].cap += pushed;
                    return pushed;
                }
            }
            self.iter[v] += 1;
        }
        0
    }

    fn run(&mut self, s: usize, t: usize) -> usize {
        let mut flow = 0usize;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return flow;
            }
            self.iter.fill(0);
            loop {
                let f = self.dfs(s, t, u32::MAX);
                if f == 0 {
                    break;
                }
                flow += f as usize;
            }
        }
    }
}

/// Maximum number of edge-disjoint paths from any node of `sources` to `sink`.
pub fn maxflow(
    aug: &AugmentedNetwork,
    sources: &[NodeId],
    sink: NodeId,
) -> Result<FlowResult, FlowError> {
    let n = aug.node_count();
    for &v in sources.iter().chain([&sink]) {
        if v >= n {
            return Err(FlowError::UnknownNode(v));
        }
    }
    let source_set: BTreeSet<NodeId> = sources.iter().copied().collect();
    if source_set.contains(&sink) {
        return Err(FlowError::SinkInSourceSet(sink));
    }

    let super_source = n;
    let mut dinic = Dinic::new(n + 1);
    for (k, e) in aug.edges().iter().enumerate() {
        dinic.add_arc(e.tail, e.head, 1, Some(k));
    }
    let unbounded = aug.edges().len() as u32 + 1;
    for &s in &source_set {
        dinic.add_arc(super_source, s, unbounded, None);
    }
    let value = dinic.run(super_source, sink);

    // saturated real arcs carry the flow
    let used: Vec<Vec<EdgeId>> = dinic.graph[..n]
        .iter()
        .map(|arcs| {
            arcs.iter()
                .filter(|a| a.cap == 0)
                .filter_map(|a| a.edge)
                .collect()
        })
        .collect();
    // a DAG has no flow cycles, so walking saturated edges from the sources
    // decomposes the flow into paths; edges are consumed in index order
    let mut next = vec![0usize; n];
    let mut paths = Vec::with_capacity(value);
    for a in &dinic.graph[super_source] {
        for _ in 0..(unbounded - a.cap) {
            let mut path = Vec::new();
            let mut v = a.to;
            while v != sink {
                let k = used[v][next[v]];
                next[v] += 1;
                path.push(k);
                v = aug.edge(k).head;
            }
            paths.push(path);
        }
    }
    debug_assert_eq!(paths.len(), value);

    // source side of the cut: residual-reachable from the super-source
    dinic.bfs(super_source);
    let mincut = aug
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| dinic.level[e.tail] >= 0 && dinic.level[e.head] < 0)
        .map(|(k, _)| k)
        .collect();

    Ok(FlowResult {
        sources: source_set,
        sink,
        value,
        paths,
        mincut,
    })
}

/// Convenience wrapper returning only the flow value.
pub fn maxflow_value(
    aug: &AugmentedNetwork,
    sources: &[NodeId],
    sink: NodeId,
) -> Result<usize, FlowError> {
    maxflow(aug, sources, sink).map(|f| f.value)
}

/// Independently re-checks a [`FlowResult`] against the network.
pub fn verify_flow(aug: &AugmentedNetwork, result: &FlowResult) -> Result<(), FlowViolation> {
    let edges = aug.edges();
    let mut seen = BTreeSet::new();
    for (p, path) in result.paths.iter().enumerate() {
        let Some(&first) = path.first() else {
            return Err(FlowViolation::EmptyPath(p));
        };
        for &k in path {
            if k >= edges.len() {
                return Err(FlowViolation::UnknownEdge { path: p, edge: k });
            }
        }
        if !result.sources.contains(&edges[first].tail) {
            return Err(FlowViolation::BadStart(p));
        }
        for (i, w) in path.windows(2).enumerate() {
            if edges[w[0]].head != edges[w[1]].tail {
                return Err(FlowViolation::Discontinuous {
                    path: p,
                    position: i + 1,
                });
            }
        }
        if edges[*path.last().expect("nonempty")].head != result.sink {
            return Err(FlowViolation::BadEnd(p));
        }
        for &k in path {
            if !seen.insert(k) {
                return Err(FlowViolation::SharedEdge(k));
            }
        }
    }
    if let Some(&k) = result.mincut.iter().find(|&&k| k >= edges.len()) {
        return Err(FlowViolation::UnknownCutEdge(k));
    }
    // forward reachability avoiding cut edges
    let mut reached = vec![false; aug.node_count()];
    let mut stack: Vec<NodeId> = result.sources.iter().copied().collect();
    for &s in &stack {
        reached[s] = true;
    }
    while let Some(v) = stack.pop() {
        for &k in aug.out_edges(v) {
            let h = edges[k].head;
            if !result.mincut.contains(&k) && !reached[h] {
                reached[h] = true;
                stack.push(h);
            }
        }
    }
    if reached[result.sink] {
        return Err(FlowViolation::CutDoesNotSeparate);
    }
    if result.value != result.paths.len() || result.value != result.mincut.len() {
        return Err(FlowViolation::ValueMismatch {
            value: result.value,
            paths: result.paths.len(),
            cut: result.mincut.len(),
        });
    }
    Ok(())
}
