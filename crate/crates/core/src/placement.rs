//! One-round backup placement by next-modulo selection.
//!
//! Every node picks the neighbor whose ID follows its own in the circular,
//! ascending order of `Γ(v) ∪ {v}`. In a graph whose neighborhood
//! independence is `c`, no node is picked by more than `c` neighbors, and the
//! graph of selected edges has maximum degree at most `c + 1`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::sim::{round_count, run_sync, Inbox, NodeContext, NodeProgram, Outbox, SimError, SimOptions, Step, Trace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlacementError {
    #[error("no neighbor to select for node {0}")]
    NoNeighbor(NodeId),
    #[error("isolated vertices have no backup: {0:?}")]
    Isolated(Vec<NodeId>),
    #[error("node {node} selects {target}, which is not its neighbor")]
    NotNeighbor { node: NodeId, target: NodeId },
    #[error("node {0} is not in the graph")]
    UnknownNode(NodeId),
    #[error("node {0} has neighbors but no selection")]
    Missing(NodeId),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Successor of `v` in the circular sorted order of `neighbors ∪ {v}`.
///
/// `neighbors` must be sorted ascending and must not contain `v`.
pub fn next_modulo(v: NodeId, neighbors: &[NodeId]) -> Result<NodeId, PlacementError> {
    debug_assert!(neighbors.windows(2).all(|w| w[0] < w[1]));
    let first = *neighbors.first().ok_or(PlacementError::NoNeighbor(v))?;
    let pos = neighbors.partition_point(|&w| w <= v);
    Ok(neighbors.get(pos).copied().unwrap_or(first))
}

/// How to treat vertices without neighbors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum IsolatedMode {
    /// Fail, listing every isolated vertex.
    #[default]
    Strict,
    /// Omit them from the placement and record them in `Placement::skipped`.
    Lenient,
}

/// Per-node choice of backup neighbor.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Placement {
    pub selection: BTreeMap<NodeId, NodeId>,
    /// Isolated vertices left out in lenient mode.
    pub skipped: Vec<NodeId>,
}

impl Placement {
    pub fn get(&self, v: NodeId) -> Option<NodeId> {
        self.selection.get(&v).copied()
    }

    pub fn len(&self) -> usize {
        self.selection.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selection.is_empty()
    }

    /// Checks that every non-isolated node selects exactly one of its neighbors.
    pub fn validate(&self, g: &Graph) -> Result<(), PlacementError> {
        for (&v, &w) in &self.selection {
            if !g.contains_node(v) {
                return Err(PlacementError::UnknownNode(v));
            }
            if !g.has_edge(v, w) {
                return Err(PlacementError::NotNeighbor { node: v, target: w });
            }
        }
        if let Some(v) = g.nodes().find(|&v| g.degree(v) > 0 && !self.selection.contains_key(&v)) {
            return Err(PlacementError::Missing(v));
        }
        Ok(())
    }

    /// `v -> w` lines sorted by `v`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, w) in &self.selection {
            let _ = writeln!(out, "{v} -> {w}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, PlacementError> {
        let mut selection = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let bad = |reason: String| PlacementError::Parse { line, reason };
            let (lhs, rhs) = trimmed.split_once("->").ok_or_else(|| bad("expected `v -> w`".into()))?;
            let id = |s: &str| {
                s.trim().parse::<u64>().map(NodeId).map_err(|_| bad(format!("invalid node ID {:?}", s.trim())))
            };
            let (v, w) = (id(lhs)?, id(rhs)?);
            if selection.insert(v, w).is_some() {
                return Err(bad(format!("node {v} selects twice")));
            }
        }
        Ok(Placement { selection, skipped: Vec::new() })
    }
}

/// Node program running next-modulo selection. Every node decides in the
/// first round from its own ID and its neighbors' IDs; isolated nodes
/// output `None`.
#[derive(Clone, Copy, Debug, Default)]
pub struct BackupPlacementProgram;

impl NodeProgram for BackupPlacementProgram {
    type State = Option<NodeId>;
    type Msg = ();
    type Output = Option<NodeId>;

    fn init(&self, _: &NodeContext<'_>) -> Self::State {
        None
    }

    fn step(&self, ctx: &NodeContext<'_>, _: &Self::State, _: &Inbox<()>) -> Step<Self::State, (), Self::Output> {
        let choice = next_modulo(ctx.id, ctx.neighbors).ok();
        Step { state: choice, outbox: Outbox::Silent, output: Some(choice) }
    }
}

/// Runs the placement program on the simulator and returns its trace.
pub fn run_backup_placement_traced(
    g: &Graph,
    mode: IsolatedMode,
    opts: &SimOptions,
) -> Result<(Placement, Trace<Option<NodeId>, Option<NodeId>>), PlacementError> {
    let isolated = g.isolated_nodes();
    if mode == IsolatedMode::Strict && !isolated.is_empty() {
        return Err(PlacementError::Isolated(isolated));
    }
    let trace = run_sync(g, &BackupPlacementProgram, 1, opts)?;
    round_count(&trace)?;
    let selection = trace.outputs.iter().filter_map(|(&v, &w)| w.map(|w| (v, w))).collect();
    Ok((Placement { selection, skipped: isolated }, trace))
}

pub fn run_backup_placement(g: &Graph, mode: IsolatedMode) -> Result<Placement, PlacementError> {
    run_backup_placement_traced(g, mode, &SimOptions::default()).map(|(p, _)| p)
}

/// How many neighbors selected each node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadReport {
    /// Every node of the graph, including those selected by nobody.
    pub in_load: BTreeMap<NodeId, usize>,
    pub max_load: usize,
    pub violating_nodes: Vec<NodeId>,
    pub c_bound: usize,
}

#[derive(Serialize)]
struct LoadReportJson {
    max_load: usize,
    violations: Vec<NodeId>,
    histogram: BTreeMap<usize, usize>,
}

impl LoadReport {
    /// Number of nodes at each load level.
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for &load in self.in_load.values() {
            *h.entry(load).or_insert(0) += 1;
        }
        h
    }

    pub fn to_json(&self) -> String {
        let doc = LoadReportJson {
            max_load: self.max_load,
            violations: self.violating_nodes.clone(),
            histogram: self.histogram(),
        };
        serde_json::to_string_pretty(&doc).expect("plain data serializes")
    }
}

pub fn placement_load(g: &Graph, p: &Placement, c_bound: usize) -> LoadReport {
    let mut in_load: BTreeMap<NodeId, usize> = g.nodes().map(|v| (v, 0)).collect();
    for &w in p.selection.values() {
        *in_load.entry(w).or_insert(0) += 1;
    }
    let max_load = in_load.values().copied().max().unwrap_or(0);
    let violating_nodes = in_load.iter().filter(|(_, &l)| l > c_bound).map(|(&v, _)| v).collect();
    LoadReport { in_load, max_load, violating_nodes, c_bound }
}

/// The graph on all of `g`'s nodes whose edges are exactly `{v, p(v)}`.
pub fn selected_subgraph(g: &Graph, p: &Placement) -> Graph {
    let edges = p.selection.iter().map(|(&v, &w)| (v, w));
    Graph::from_parts(g.nodes(), edges).expect("placements never select the node itself")
}
