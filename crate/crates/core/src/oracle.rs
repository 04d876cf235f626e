//! Exact reference computations for small instances.
//!
//! These are deliberately independent of the distributed algorithms: the
//! independence oracle is a branch-and-bound over neighborhood subsets, and
//! maximum matchings come from two unrelated routes (exhaustive edge search
//! and Edmonds' blossom augmentation) that cross-check each other.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{Edge, Graph, NodeId};
use crate::matching::Matching;

/// Largest neighborhood the independence oracle will search exhaustively.
pub const MAX_ORACLE_DEGREE: usize = 25;
/// Largest edge count accepted by [`mcm_brute_force`].
pub const MAX_BRUTE_FORCE_EDGES: usize = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle infeasible: node {node} has degree {degree} > {limit}; use a sampling mode or supply an explicit bound")]
    DegreeTooLarge { node: NodeId, degree: usize, limit: usize },
    #[error("oracle infeasible: {edges} edges exceed the exhaustive-search limit of {limit}")]
    TooManyEdges { edges: usize, limit: usize },
}

/// Maximum, over all nodes, of the largest independent set inside the
/// open neighborhood. Exact; refuses any node of degree above 25.
pub fn neighborhood_independence(g: &Graph) -> Result<usize, OracleError> {
    if let Some(v) = g.nodes().find(|&v| g.degree(v) > MAX_ORACLE_DEGREE) {
        return Err(OracleError::DegreeTooLarge { node: v, degree: g.degree(v), limit: MAX_ORACLE_DEGREE });
    }
    Ok(g.nodes().map(|v| local_independence(g, v)).max().unwrap_or(0))
}

/// Independence number of the subgraph induced by `Γ(v)`.
pub fn local_independence(g: &Graph, v: NodeId) -> usize {
    let ns = g.neighbors(v);
    debug_assert!(ns.len() <= 32);
    let masks: Vec<u32> = ns
        .iter()
        .map(|&a| {
            ns.iter()
                .enumerate()
                .filter(|&(_, &b)| g.has_edge(a, b))
                .fold(0u32, |m, (j, _)| m | (1 << j))
        })
        .collect();
    let all = if ns.len() == 32 { u32::MAX } else { (1u32 << ns.len()) - 1 };
    let mut best = 0;
    mis(&masks, all, 0, &mut best);
    best
}

fn mis(adj: &[u32], candidates: u32, size: usize, best: &mut usize) {
    if candidates == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + candidates.count_ones() as usize <= *best {
        return;
    }
    let v = candidates.trailing_zeros() as usize;
    let rest = candidates & !(1 << v);
    mis(adj, rest & !adj[v], size + 1, best);
    // Excluding an isolated candidate can never beat including it.
    if adj[v] & rest != 0 {
        mis(adj, rest, size, best);
    }
}

/// Exact maximum-cardinality matching by exhaustive edge search with
/// pruning. Among maximum matchings returns the lexicographically least
/// edge sequence (edges in canonical order).
pub fn mcm_brute_force(g: &Graph) -> Result<Matching, OracleError> {
    let edges: Vec<Edge> = g.edges().collect();
    if edges.len() > MAX_BRUTE_FORCE_EDGES {
        return Err(OracleError::TooManyEdges { edges: edges.len(), limit: MAX_BRUTE_FORCE_EDGES });
    }
    let index: BTreeMap<NodeId, usize> = g.nodes().enumerate().map(|(i, v)| (v, i)).collect();
    let idx_edges: Vec<(usize, usize)> = edges.iter().map(|(u, v)| (index[u], index[v])).collect();
    let mut search = BruteForce {
        edges: &idx_edges,
        used: vec![false; g.node_count()],
        current: Vec::new(),
        best: Vec::new(),
    };
    search.run(0);
    let chosen = search.best.iter().map(|&i| edges[i]);
    Ok(Matching::try_from_edges(chosen).expect("search only picks disjoint edges"))
}

struct BruteForce<'a> {
    edges: &'a [(usize, usize)],
    used: Vec<bool>,
    current: Vec<usize>,
    best: Vec<usize>,
}

impl BruteForce<'_> {
    fn upper_bound(&self, from: usize) -> usize {
        let mut free = vec![false; self.used.len()];
        let mut count = 0;
        for &(u, v) in &self.edges[from..] {
            if !self.used[u] && !self.used[v] {
                for x in [u, v] {
                    if !free[x] {
                        free[x] = true;
                        count += 1;
                    }
                }
            }
        }
        count / 2
    }

    fn run(&mut self, from: usize) {
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
        }
        if from == self.edges.len() || self.current.len() + self.upper_bound(from) <= self.best.len() {
            return;
        }
        let (u, v) = self.edges[from];
        if !self.used[u] && !self.used[v] {
            self.used[u] = true;
            self.used[v] = true;
            self.current.push(from);
            self.run(from + 1);
            self.current.pop();
            self.used[u] = false;
            self.used[v] = false;
        }
        self.run(from + 1);
    }
}

const NONE: usize = usize::MAX;

/// Maximum matching via greedy initialization followed by Edmonds'
/// blossom-contracting augmenting-path search. Polynomial, so it also
/// serves as the exact reference on graphs too large for brute force.
pub fn max_matching_augmenting(g: &Graph) -> Matching {
    let ids: Vec<NodeId> = g.nodes().collect();
    let index: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = ids.iter().map(|&v| g.neighbors(v).iter().map(|w| index[w]).collect()).collect();
    let n = ids.len();
    let mut blossom = Blossom {
        adj: &adj,
        mate: vec![NONE; n],
        parent: vec![NONE; n],
        base: (0..n).collect(),
        used: vec![false; n],
        in_blossom: vec![false; n],
    };
    for v in 0..n {
        if blossom.mate[v] == NONE {
            if let Some(&w) = adj[v].iter().find(|&&w| blossom.mate[w] == NONE) {
                blossom.mate[v] = w;
                blossom.mate[w] = v;
            }
        }
    }
    for root in 0..n {
        if blossom.mate[root] != NONE {
            continue;
        }
        let mut v = blossom.find_path(root);
        while v != NONE {
            let pv = blossom.parent[v];
            let ppv = blossom.mate[pv];
            blossom.mate[v] = pv;
            blossom.mate[pv] = v;
            v = ppv;
        }
    }
    let edges = (0..n)
        .filter(|&v| blossom.mate[v] != NONE && v < blossom.mate[v])
        .map(|v| (ids[v], ids[blossom.mate[v]]));
    Matching::try_from_edges(edges).expect("mate array is an involution")
}

struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
}

impl Blossom<'_> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.mate.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn find_path(&mut self, root: usize) -> usize {
        let n = self.mate.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &to in &self.adj[v] {
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return to;
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    queue.push_back(next);
                }
            }
        }
        NONE
    }
}
