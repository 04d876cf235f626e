//! Simple undirected graphs keyed by unique node IDs, plus the edge-list
//! text format used for fixtures and CLI input.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Globally unique, non-negative node identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for NodeId {
    fn from(v: u64) -> Self {
        NodeId(v)
    }
}

/// An undirected edge stored as `(min, max)`.
pub type Edge = (NodeId, NodeId);

pub fn canonical_edge(u: NodeId, v: NodeId) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("self-loop at line {line}")]
    SelfLoop { line: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("self-loop on node {0}")]
    SelfLoopEdge(NodeId),
    #[error("graph invariant violated: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Immutable simple undirected graph.
///
/// Adjacency lists are kept sorted so that every traversal, edge listing and
/// algorithm built on top is reproducible.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<NodeId, Vec<NodeId>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from explicit nodes and edges. Endpoints of edges are
    /// added as nodes automatically; duplicate edges collapse.
    pub fn from_parts<N, E>(nodes: N, edges: E) -> Result<Self, GraphError>
    where
        N: IntoIterator<Item = NodeId>,
        E: IntoIterator<Item = Edge>,
    {
        let mut sets: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for v in nodes {
            sets.entry(v).or_default();
        }
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoopEdge(u));
            }
            sets.entry(u).or_default().insert(v);
            sets.entry(v).or_default().insert(u);
        }
        Ok(Self::from_sets(sets))
    }

    pub fn from_edges<E>(edges: E) -> Result<Self, GraphError>
    where
        E: IntoIterator<Item = Edge>,
    {
        Self::from_parts(std::iter::empty(), edges)
    }

    /// Convenience constructor over raw integer pairs, mostly for tests.
    pub fn from_pairs(pairs: &[(u64, u64)]) -> Result<Self, GraphError> {
        Self::from_edges(pairs.iter().map(|&(u, v)| (NodeId(u), NodeId(v))))
    }

    fn from_sets(sets: BTreeMap<NodeId, BTreeSet<NodeId>>) -> Self {
        let adj = sets
            .into_iter()
            .map(|(v, ns)| (v, ns.into_iter().collect()))
            .collect();
        Graph { adj }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Nodes in ascending ID order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.adj.keys().copied()
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        self.adj.contains_key(&v)
    }

    /// Sorted neighbor list; empty for unknown nodes.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        self.adj.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.neighbors(v).len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges in canonical `(min, max)` lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, ns)| ns.iter().filter(move |&&w| w > u).map(move |&w| (u, w)))
    }

    /// Largest node ID, if any.
    pub fn max_id(&self) -> Option<NodeId> {
        self.adj.keys().next_back().copied()
    }

    pub fn isolated_nodes(&self) -> Vec<NodeId> {
        self.adj
            .iter()
            .filter(|(_, ns)| ns.is_empty())
            .map(|(&v, _)| v)
            .collect()
    }

    /// Subgraph induced by `keep`.
    pub fn induced_subgraph(&self, keep: &BTreeSet<NodeId>) -> Graph {
        let adj = self
            .adj
            .iter()
            .filter(|(v, _)| keep.contains(v))
            .map(|(&v, ns)| (v, ns.iter().copied().filter(|w| keep.contains(w)).collect()))
            .collect();
        Graph { adj }
    }

    /// Removes `drop` and every edge incident to it.
    pub fn without_nodes(&self, drop: &BTreeSet<NodeId>) -> Graph {
        let keep = self.nodes().filter(|v| !drop.contains(v)).collect();
        self.induced_subgraph(&keep)
    }

    /// Removes every node of degree zero.
    pub fn without_isolated(&self) -> Graph {
        let keep = self
            .adj
            .iter()
            .filter(|(_, ns)| !ns.is_empty())
            .map(|(&v, _)| v)
            .collect();
        self.induced_subgraph(&keep)
    }

    /// Nodes within hop distance `radius` of `center`.
    pub fn ball(&self, center: NodeId, radius: usize) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::new();
        if !self.contains_node(center) {
            return seen;
        }
        seen.insert(center);
        let mut queue = VecDeque::from([(center, 0usize)]);
        while let Some((v, d)) = queue.pop_front() {
            if d == radius {
                continue;
            }
            for &w in self.neighbors(v) {
                if seen.insert(w) {
                    queue.push_back((w, d + 1));
                }
            }
        }
        seen
    }

    /// Checks symmetry, absence of self-loops, closure and sortedness.
    pub fn validate(&self) -> Result<(), GraphError> {
        for (&v, ns) in &self.adj {
            if ns.windows(2).any(|w| w[0] >= w[1]) {
                return Err(GraphError::Invalid(format!("adjacency of {v} not strictly sorted")));
            }
            for &w in ns {
                if w == v {
                    return Err(GraphError::Invalid(format!("self-loop on {v}")));
                }
                if !self.adj.contains_key(&w) {
                    return Err(GraphError::Invalid(format!("{w} adjacent to {v} but not a node")));
                }
                if !self.has_edge(w, v) {
                    return Err(GraphError::Invalid(format!("edge {v}-{w} is not symmetric")));
                }
            }
        }
        Ok(())
    }

    /// Applies an injective relabeling of node IDs.
    pub fn relabel(&self, f: impl Fn(NodeId) -> NodeId) -> Graph {
        let mut sets: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for (&v, ns) in &self.adj {
            sets.insert(f(v), ns.iter().map(|&w| f(w)).collect());
        }
        Graph::from_sets(sets)
    }
}

/// Maximum degree; zero for edgeless graphs.
pub fn max_degree(g: &Graph) -> usize {
    g.adj.values().map(Vec::len).max().unwrap_or(0)
}

/// Parses the edge-list text format: one `u v` pair per line, a single
/// token declares an isolated vertex, `#` starts a comment line.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let parse = |tok: &str| {
            tok.parse::<u64>().map(NodeId).map_err(|_| GraphError::Parse {
                line,
                reason: format!("expected a non-negative integer ID, found {tok:?}"),
            })
        };
        match tokens.as_slice() {
            [v] => nodes.push(parse(v)?),
            [u, v] => {
                let (u, v) = (parse(u)?, parse(v)?);
                if u == v {
                    return Err(GraphError::SelfLoop { line });
                }
                edges.push((u, v));
            }
            _ => {
                return Err(GraphError::Parse {
                    line,
                    reason: format!("expected one or two IDs, found {} tokens", tokens.len()),
                })
            }
        }
    }
    Graph::from_parts(nodes, edges)
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    parse_edge_list(&fs::read_to_string(path)?)
}

/// Serializes to the edge-list format: isolated vertices first as single
/// tokens, then edges in canonical order.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for v in g.isolated_nodes() {
        out.push_str(&format!("{v}\n"));
    }
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
