//! Seeded generators for the graph families exercised by the algorithms.
//!
//! All randomness flows through `ChaCha8Rng::seed_from_u64`, so a generator
//! call is a pure function of its arguments.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{load_graph, Graph, GraphError, NodeId};

/// Samples `n` points uniformly in the unit square and joins every pair at
/// Euclidean distance at most `radius`. Node IDs are `0..n`.
pub fn gen_unit_disk(n: usize, radius: f64, seed: u64) -> Graph {
    assert!(n >= 1, "unit-disk graph needs at least one node");
    assert!(radius > 0.0, "radius must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    let r2 = radius * radius;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let dx = points[i].0 - points[j].0;
            let dy = points[i].1 - points[j].1;
            if dx * dx + dy * dy <= r2 {
                edges.push((NodeId(i as u64), NodeId(j as u64)));
            }
        }
    }
    Graph::from_parts((0..n as u64).map(NodeId), edges).expect("generated pairs are distinct")
}

/// Radius giving an expected degree of roughly `avg_degree` for `n` points
/// in the unit square (ignoring boundary losses).
pub fn unit_disk_radius_for_degree(n: usize, avg_degree: f64) -> f64 {
    (avg_degree / (std::f64::consts::PI * n.max(1) as f64)).sqrt()
}

/// Erdős–Rényi `G(n, p)` on IDs `0..n`.
pub fn gen_random_gnp(n: usize, p: f64, seed: u64) -> Graph {
    assert!(n >= 1, "G(n,p) needs at least one node");
    assert!((0.0..=1.0).contains(&p), "edge probability must lie in [0,1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n as u64 {
        for j in i + 1..n as u64 {
            if rng.gen_bool(p) {
                edges.push((NodeId(i), NodeId(j)));
            }
        }
    }
    Graph::from_parts((0..n as u64).map(NodeId), edges).expect("generated pairs are distinct")
}

/// Line graph of `base`. The node for an edge gets the edge's rank in
/// canonical `(min, max)` order as its ID.
pub fn gen_line_graph(base: &Graph) -> Graph {
    let edges: Vec<_> = base.edges().collect();
    let mut incident: BTreeMap<NodeId, Vec<u64>> = BTreeMap::new();
    for (rank, &(u, v)) in edges.iter().enumerate() {
        incident.entry(u).or_default().push(rank as u64);
        incident.entry(v).or_default().push(rank as u64);
    }
    let mut line_edges = Vec::new();
    for ranks in incident.values() {
        for (i, &a) in ranks.iter().enumerate() {
            for &b in &ranks[i + 1..] {
                line_edges.push((NodeId(a), NodeId(b)));
            }
        }
    }
    Graph::from_parts((0..edges.len() as u64).map(NodeId), line_edges)
        .expect("distinct edges give distinct line nodes")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFamily {
    UnitDisk,
    /// Line graph of a `G(n, p)` base graph.
    LineGraph,
    RandomGnp,
    ExplicitFile(PathBuf),
}

impl GraphFamily {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "unit-disk" => Some(Self::UnitDisk),
            "line-graph" => Some(Self::LineGraph),
            "random-gnp" => Some(Self::RandomGnp),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::UnitDisk => "unit-disk",
            Self::LineGraph => "line-graph",
            Self::RandomGnp => "random-gnp",
            Self::ExplicitFile(_) => "explicit-file",
        }
    }

    /// Known upper bound on neighborhood independence, when the family has one.
    pub fn independence_bound(&self) -> Option<usize> {
        match self {
            Self::UnitDisk => Some(6),
            Self::LineGraph => Some(2),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFamilyParams {
    pub family: GraphFamily,
    pub n: usize,
    /// Unit-disk only. `None` picks a radius for an expected degree of 8.
    pub radius: Option<f64>,
    /// Edge probability for `random-gnp` and for the base of `line-graph`.
    pub p: Option<f64>,
    pub seed: u64,
}

impl GraphFamilyParams {
    pub fn generate(&self) -> Result<Graph, GraphError> {
        let bad = |reason: &str| GraphError::Invalid(reason.to_string());
        if self.n == 0 && !matches!(self.family, GraphFamily::ExplicitFile(_)) {
            return Err(bad("n must be at least 1"));
        }
        match &self.family {
            GraphFamily::UnitDisk => {
                let r = self.radius.unwrap_or_else(|| unit_disk_radius_for_degree(self.n, 8.0));
                if r <= 0.0 || !r.is_finite() {
                    return Err(bad("radius must be positive"));
                }
                Ok(gen_unit_disk(self.n, r, self.seed))
            }
            GraphFamily::RandomGnp | GraphFamily::LineGraph => {
                let p = self.p.ok_or_else(|| bad("edge probability --p is required"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(bad("edge probability must lie in [0,1]"));
                }
                let g = gen_random_gnp(self.n, p, self.seed);
                Ok(if self.family == GraphFamily::LineGraph { gen_line_graph(&g) } else { g })
            }
            GraphFamily::ExplicitFile(path) => load_graph(path),
        }
    }
}
