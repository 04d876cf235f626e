//! Maximum-matching approximation on top of backup placement.
//!
//! One pass computes a placement, takes the selected subgraph `G'` (maximum
//! degree at most `c + 1`) and finds a maximal matching of it. Iterating the
//! pass on what is left after removing matched vertices and the vertices
//! they isolate drives the ratio down to `2 + ε`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::graph::{max_degree, Graph};
use crate::placement::{run_backup_placement_traced, selected_subgraph, IsolatedMode, Placement};
use crate::sim::{round_count, SimOptions};

use super::pr::maximal_matching_pr_with;
use super::{Matching, MatchingError};

/// Parameters of the iterated approximation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxConfig {
    pub epsilon: f64,
    /// Upper bound on neighborhood independence of the input.
    pub c: usize,
    /// Number of iterations.
    pub k: usize,
}

impl ApproxConfig {
    /// Config with `k` set to the smallest `i ≥ 1` such that
    /// `(c / (c + 1))^i ≤ ε / (2 (c + 1))`.
    pub fn new(epsilon: f64, c: usize) -> Result<Self, MatchingError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(MatchingError::BadEpsilon(epsilon));
        }
        Ok(ApproxConfig { epsilon, c, k: Self::min_iterations(epsilon, c) })
    }

    /// Overrides `k`, for experiments below the guaranteed iteration count.
    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn min_iterations(epsilon: f64, c: usize) -> usize {
        let decay = c as f64 / (c as f64 + 1.0);
        let target = epsilon / (2.0 * (c as f64 + 1.0));
        if decay <= target {
            return 1;
        }
        let mut k = ((target.ln() / decay.ln()).ceil() as usize).max(1);
        // Guard the closed form against rounding at exact powers.
        while k > 1 && decay.powi(k as i32 - 1) <= target {
            k -= 1;
        }
        while decay.powi(k as i32) > target {
            k += 1;
        }
        k
    }

    pub fn satisfies_bound(&self) -> bool {
        self.k >= Self::min_iterations(self.epsilon, self.c)
    }
}

/// Instrumentation of one iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub nodes_before: usize,
    pub matched_edges: usize,
    pub nodes_after: usize,
    pub gprime_max_degree: usize,
    pub bp_rounds: usize,
    pub mm_rounds: usize,
}

#[derive(Clone, Debug)]
pub struct ApproxTrace {
    pub config: ApproxConfig,
    /// Non-isolated vertices of the input.
    pub n: usize,
    pub matching: Matching,
    pub iterations: Vec<IterationRecord>,
    /// Simulated rounds until every vertex decided.
    pub rounds: usize,
}

impl ApproxTrace {
    /// Residual fractions for iterations `1..=k`.
    pub fn residuals(&self) -> Vec<f64> {
        (1..=self.config.k).map(|i| residual_fraction(self, i).expect("i within 1..=k")).collect()
    }
}

/// Fraction of the initial (non-isolated) vertices still present after
/// iteration `i`; iteration 0 is the input itself.
pub fn residual_fraction(trace: &ApproxTrace, i: usize) -> Result<f64, MatchingError> {
    if i > trace.config.k {
        return Err(MatchingError::NoSuchIteration { requested: i, recorded: trace.config.k });
    }
    if trace.n == 0 {
        return Ok(if i == 0 { 1.0 } else { 0.0 });
    }
    let remaining = match i {
        0 => trace.n,
        i if i <= trace.iterations.len() => trace.iterations[i - 1].nodes_after,
        _ => match trace.iterations.last() {
            Some(last) if last.nodes_after == 0 => 0,
            None => trace.n,
            Some(last) => {
                return Err(MatchingError::NoSuchIteration { requested: i, recorded: last.iteration })
            }
        },
    };
    Ok(remaining as f64 / trace.n as f64)
}

struct Pass {
    placement: Placement,
    gprime: Graph,
    matching: Matching,
    bp_rounds: usize,
    mm_rounds: usize,
}

fn pass(g: &Graph, delta_bound: Option<usize>, id_bound: u64) -> Result<Pass, MatchingError> {
    let opts = SimOptions { id_bound: Some(id_bound), ..Default::default() };
    let (placement, bp_trace) = run_backup_placement_traced(g, IsolatedMode::Lenient, &opts)?;
    let gprime = selected_subgraph(g, &placement);
    let delta = delta_bound.unwrap_or_else(|| max_degree(&gprime));
    let mm = maximal_matching_pr_with(&gprime, delta, id_bound, &opts)?;
    Ok(Pass { placement, gprime, matching: mm.matching, bp_rounds: round_count(&bp_trace)?, mm_rounds: mm.rounds })
}

#[derive(Clone, Debug)]
pub struct OnceRun {
    pub placement: Placement,
    pub gprime: Graph,
    pub matching: Matching,
    pub rounds: usize,
}

/// Placement, selected subgraph and maximal matching of it, in one pass.
pub fn bp_mm_once_traced(g: &Graph) -> Result<OnceRun, MatchingError> {
    let id_bound = g.max_id().map_or(0, |v| v.0);
    let p = pass(g, None, id_bound)?;
    Ok(OnceRun { placement: p.placement, gprime: p.gprime, matching: p.matching, rounds: p.bp_rounds + p.mm_rounds })
}

pub fn bp_mm_once(g: &Graph) -> Result<Matching, MatchingError> {
    bp_mm_once_traced(g).map(|r| r.matching)
}

/// Iterated approximation with per-iteration instrumentation.
///
/// Every iteration runs the maximal-matching program with degree bound
/// `c + 1`; an input whose true independence exceeds `cfg.c` can therefore
/// fail with [`MatchingError::DegreeBoundExceeded`].
pub fn mcm_approx_traced(g: &Graph, cfg: &ApproxConfig) -> Result<ApproxTrace, MatchingError> {
    let id_bound = g.max_id().map_or(0, |v| v.0);
    let mut current = g.without_isolated();
    let n = current.node_count();
    let mut matching = Matching::new();
    let mut iterations = Vec::new();
    let mut rounds = 0;
    for iteration in 1..=cfg.k {
        if current.is_empty() {
            break;
        }
        let p = pass(&current, Some(cfg.c + 1), id_bound)?;
        matching.extend_disjoint(&p.matching)?;
        let matched: BTreeSet<_> = p.matching.matched_nodes();
        let next = current.without_nodes(&matched).without_isolated();
        iterations.push(IterationRecord {
            iteration,
            nodes_before: current.node_count(),
            matched_edges: p.matching.len(),
            nodes_after: next.node_count(),
            gprime_max_degree: max_degree(&p.gprime),
            bp_rounds: p.bp_rounds,
            mm_rounds: p.mm_rounds,
        });
        rounds += p.bp_rounds + p.mm_rounds;
        current = next;
    }
    matching.check_against(g)?;
    Ok(ApproxTrace { config: *cfg, n, matching, iterations, rounds })
}

pub fn mcm_approx(g: &Graph, cfg: &ApproxConfig) -> Result<Matching, MatchingError> {
    mcm_approx_traced(g, cfg).map(|t| t.matching)
}

/// Machine-readable summary of one matching experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub n: usize,
    pub c: usize,
    pub epsilon: Option<f64>,
    pub k: usize,
    pub matching_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mcm_size: Option<usize>,
    /// `mcm_size / matching_size`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub rounds: usize,
    pub residual: Vec<f64>,
}

impl ExperimentRecord {
    pub fn with_mcm(mut self, mcm: usize) -> Self {
        self.mcm_size = Some(mcm);
        self.ratio = Some(if self.matching_size == 0 {
            if mcm == 0 { 1.0 } else { f64::INFINITY }
        } else {
            mcm as f64 / self.matching_size as f64
        });
        self
    }
}

impl From<&ApproxTrace> for ExperimentRecord {
    fn from(t: &ApproxTrace) -> Self {
        ExperimentRecord {
            n: t.n,
            c: t.config.c,
            epsilon: Some(t.config.epsilon),
            k: t.config.k,
            matching_size: t.matching.len(),
            mcm_size: None,
            ratio: None,
            rounds: t.rounds,
            residual: t.residuals(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;

    #[test]
    fn iteration_count_formula() {
        // ln(0.5/6) / ln(2/3) = 6.13
        assert_eq!(ApproxConfig::min_iterations(0.5, 2), 7);
        for (eps, c) in [(0.5, 2), (0.25, 2), (0.5, 4), (0.1, 6), (1.0, 1)] {
            let k = ApproxConfig::min_iterations(eps, c);
            let decay = c as f64 / (c as f64 + 1.0);
            let target = eps / (2.0 * (c as f64 + 1.0));
            assert!(decay.powi(k as i32) <= target);
            assert!(k == 1 || decay.powi(k as i32 - 1) > target);
        }
        assert_eq!(ApproxConfig::min_iterations(0.5, 0), 1);
        assert!(ApproxConfig::new(0.0, 2).is_err());
        assert!(ApproxConfig::new(f64::NAN, 2).is_err());
    }

    #[test]
    fn single_edge_resolves_exactly() {
        let g = Graph::from_pairs(&[(4, 9)]).unwrap();
        assert_eq!(bp_mm_once(&g).unwrap().len(), 1);
        let t = mcm_approx_traced(&g, &ApproxConfig::new(0.5, 1).unwrap()).unwrap();
        assert_eq!(t.matching.len(), 1);
        assert_eq!(residual_fraction(&t, 0).unwrap(), 1.0);
        assert_eq!(residual_fraction(&t, 1).unwrap(), 0.0);
        assert_eq!(residual_fraction(&t, t.config.k).unwrap(), 0.0);
        assert!(residual_fraction(&t, t.config.k + 1).is_err());
    }

    #[test]
    fn two_disjoint_edges_in_one_iteration() {
        let g = Graph::from_pairs(&[(0, 1), (2, 3)]).unwrap();
        let t = mcm_approx_traced(&g, &ApproxConfig::new(0.5, 1).unwrap()).unwrap();
        assert_eq!(t.matching.len(), 2);
        assert_eq!(t.iterations.len(), 1);
    }

    #[test]
    fn isolated_input_vertices_are_ignored() {
        let g = Graph::from_parts([NodeId(10)], [(NodeId(1), NodeId(2))]).unwrap();
        let t = mcm_approx_traced(&g, &ApproxConfig::new(0.5, 1).unwrap()).unwrap();
        assert_eq!(t.n, 2);
        assert_eq!(t.matching.len(), 1);
        let empty = Graph::from_parts([NodeId(3)], []).unwrap();
        let t = mcm_approx_traced(&empty, &ApproxConfig::new(0.5, 1).unwrap()).unwrap();
        assert_eq!(t.n, 0);
        assert_eq!(residual_fraction(&t, 0).unwrap(), 1.0);
        assert_eq!(residual_fraction(&t, 1).unwrap(), 0.0);
    }

    #[test]
    fn truncated_run_reports_missing_iterations() {
        // Dense random graphs usually keep edges between unmatched vertices
        // that the selected subgraph missed.
        let cfg = ApproxConfig::new(0.5, 2).unwrap().with_k(1);
        assert!(!cfg.satisfies_bound());
        let t = (0..50)
            .map(|seed| mcm_approx_traced(&crate::generators::gen_random_gnp(30, 0.4, seed), &ApproxConfig { c: 30, ..cfg }).unwrap())
            .find(|t| t.iterations[0].nodes_after > 0)
            .expect("some instance is unfinished after one iteration");
        assert!(residual_fraction(&t, 1).unwrap() > 0.0);
        assert!(residual_fraction(&t, 2).is_err());
    }

    #[test]
    fn record_json_omits_missing_oracle() {
        let g = Graph::from_pairs(&[(0, 1), (1, 2)]).unwrap();
        let t = mcm_approx_traced(&g, &ApproxConfig::new(0.5, 2).unwrap()).unwrap();
        let rec = ExperimentRecord::from(&t);
        let v: serde_json::Value = serde_json::to_value(&rec).unwrap();
        assert!(v.get("mcm_size").is_none());
        let v = serde_json::to_value(rec.with_mcm(1)).unwrap();
        assert_eq!(v["ratio"], 1.0);
        assert_eq!(v["k"], 7);
    }
}
