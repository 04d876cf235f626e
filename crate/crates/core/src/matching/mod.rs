//! Matchings: the distributed maximal-matching routine, the iterated
//! backup-placement approximation of maximum matching, and validity checks.

mod approx;
mod forest;
mod pr;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{canonical_edge, Edge, Graph, NodeId};
use crate::placement::PlacementError;
use crate::sim::SimError;

pub use approx::{
    bp_mm_once, bp_mm_once_traced, mcm_approx, mcm_approx_traced, residual_fraction, ApproxConfig, ApproxTrace,
    ExperimentRecord, IterationRecord, OnceRun,
};
pub use forest::{
    cv_iterations, forest_decomposition, log_star, three_color_forest, ColoringRun, ForestDecomposition,
};
pub use pr::{maximal_matching_pr, maximal_matching_pr_with, pr_round_bound, PrMatchingProgram, PrRun, PR_ROUNDS_A, PR_ROUNDS_B};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchingError {
    #[error("node {0} appears in two matching edges")]
    NotDisjoint(NodeId),
    #[error("edge {0}-{1} is not an edge of the graph")]
    ForeignEdge(NodeId, NodeId),
    #[error("self-loop {0}-{0} cannot be matched")]
    SelfLoop(NodeId),
    #[error("parent map contains a cycle through node {0}")]
    CyclicForest(NodeId),
    #[error("forest edge {child}->{parent} is not an edge of the graph")]
    ForestEdgeMissing { child: NodeId, parent: NodeId },
    #[error("maximum degree {actual} exceeds the assumed bound {bound}")]
    DegreeBoundExceeded { actual: usize, bound: usize },
    #[error("iteration {requested} outside the recorded range 0..={recorded}")]
    NoSuchIteration { requested: usize, recorded: usize },
    #[error("epsilon must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error("maximal matching did not finish within its round schedule")]
    Unfinished,
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// A set of vertex-disjoint undirected edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Matching {
    edges: BTreeSet<Edge>,
    mate: BTreeMap<NodeId, NodeId>,
}

impl Matching {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn try_from_edges<I: IntoIterator<Item = Edge>>(edges: I) -> Result<Self, MatchingError> {
        let mut m = Matching::new();
        for (u, v) in edges {
            m.insert(u, v)?;
        }
        Ok(m)
    }

    /// Adds `{u, v}`; fails if either endpoint is already matched elsewhere.
    pub fn insert(&mut self, u: NodeId, v: NodeId) -> Result<(), MatchingError> {
        if u == v {
            return Err(MatchingError::SelfLoop(u));
        }
        let e = canonical_edge(u, v);
        if self.edges.contains(&e) {
            return Ok(());
        }
        for x in [u, v] {
            if self.mate.contains_key(&x) {
                return Err(MatchingError::NotDisjoint(x));
            }
        }
        self.mate.insert(u, v);
        self.mate.insert(v, u);
        self.edges.insert(e);
        Ok(())
    }

    /// Unions with a matching on vertices disjoint from this one.
    pub fn extend_disjoint(&mut self, other: &Matching) -> Result<(), MatchingError> {
        for (u, v) in other.edges() {
            self.insert(u, v)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn mate(&self, v: NodeId) -> Option<NodeId> {
        self.mate.get(&v).copied()
    }

    pub fn is_matched(&self, v: NodeId) -> bool {
        self.mate.contains_key(&v)
    }

    pub fn matched_nodes(&self) -> BTreeSet<NodeId> {
        self.mate.keys().copied().collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    /// Checks that every edge belongs to `g`.
    pub fn check_against(&self, g: &Graph) -> Result<(), MatchingError> {
        match self.edges().find(|&(u, v)| !g.has_edge(u, v)) {
            Some((u, v)) => Err(MatchingError::ForeignEdge(u, v)),
            None => Ok(()),
        }
    }

    /// Sorted `u v` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// True iff `edges` is vertex-disjoint and leaves no edge of `g` with both
/// endpoints unmatched. Errors if some edge is not in `g`.
pub fn is_maximal_matching<I>(g: &Graph, edges: I) -> Result<bool, MatchingError>
where
    I: IntoIterator<Item = Edge>,
{
    let mut covered = BTreeSet::new();
    let mut disjoint = true;
    for (u, v) in edges {
        if !g.has_edge(u, v) {
            return Err(MatchingError::ForeignEdge(u, v));
        }
        disjoint &= covered.insert(u);
        disjoint &= covered.insert(v);
    }
    Ok(disjoint && g.edges().all(|(u, v)| covered.contains(&u) || covered.contains(&v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(u: u64, v: u64) -> Edge {
        (NodeId(u), NodeId(v))
    }

    #[test]
    fn maximality_examples() {
        let p3 = Graph::from_pairs(&[(1, 2), (2, 3)]).unwrap();
        assert!(is_maximal_matching(&p3, [e(1, 2)]).unwrap());
        let p4 = Graph::from_pairs(&[(1, 2), (2, 3), (3, 4)]).unwrap();
        assert!(is_maximal_matching(&p4, [e(2, 3)]).unwrap());
        assert!(!is_maximal_matching(&p4, [e(1, 2)]).unwrap());
        assert!(!is_maximal_matching(&p4, []).unwrap());
        let empty = Graph::from_parts([NodeId(1)], []).unwrap();
        assert!(is_maximal_matching(&empty, []).unwrap());
    }

    #[test]
    fn maximality_rejects_overlap_and_foreign_edges() {
        let p3 = Graph::from_pairs(&[(1, 2), (2, 3)]).unwrap();
        assert!(!is_maximal_matching(&p3, [e(1, 2), e(2, 3)]).unwrap());
        assert_eq!(is_maximal_matching(&p3, [e(1, 3)]), Err(MatchingError::ForeignEdge(NodeId(1), NodeId(3))));
    }

    #[test]
    fn matching_insert_enforces_disjointness() {
        let mut m = Matching::new();
        m.insert(NodeId(2), NodeId(1)).unwrap();
        m.insert(NodeId(1), NodeId(2)).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.insert(NodeId(2), NodeId(3)), Err(MatchingError::NotDisjoint(NodeId(2))));
        assert_eq!(m.mate(NodeId(1)), Some(NodeId(2)));
        assert_eq!(m.to_text(), "1 2\n");
    }
}
