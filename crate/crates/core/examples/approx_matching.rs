//! Iterated (2 + ε)-approximation of maximum matching.

use backup_placement::generators::gen_unit_disk;
use backup_placement::matching::{bp_mm_once, mcm_approx_traced, ApproxConfig, ExperimentRecord};
use backup_placement::oracle::{max_matching_augmenting, neighborhood_independence};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = gen_unit_disk(300, 0.09, 3);
    let c = neighborhood_independence(&g)?;
    let mcm = max_matching_augmenting(&g).len();
    println!("n={} c={c} maximum matching {mcm}; single pass {}", g.node_count(), bp_mm_once(&g)?.len());

    for epsilon in [1.0, 0.5, 0.25] {
        let cfg = ApproxConfig::new(epsilon, c)?;
        let trace = mcm_approx_traced(&g, &cfg)?;
        for it in &trace.iterations {
            println!(
                "  ε={epsilon} iteration {}: {} -> {} vertices, {} edges matched, Δ(G')={}",
                it.iteration, it.nodes_before, it.nodes_after, it.matched_edges, it.gprime_max_degree
            );
        }
        let record = ExperimentRecord::from(&trace).with_mcm(mcm);
        println!("{}", serde_json::to_string(&record)?);
    }
    Ok(())
}
