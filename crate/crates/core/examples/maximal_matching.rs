//! Deterministic maximal matching with forest decomposition and 3-coloring.

use backup_placement::generators::gen_random_gnp;
use backup_placement::graph::max_degree;
use backup_placement::matching::{
    forest_decomposition, is_maximal_matching, log_star, maximal_matching_pr_with, pr_round_bound,
};
use backup_placement::sim::SimOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = gen_random_gnp(200, 0.03, 11);
    let id_bound = g.max_id().map_or(0, |v| v.0);
    let delta = max_degree(&g);

    let mut forests = forest_decomposition(&g);
    let coloring_rounds = forests.color(&g, id_bound)?;
    println!("Δ={delta}: {} forests, 3-colored in {coloring_rounds} rounds (log* = {})", forests.len(), log_star(id_bound));

    let run = maximal_matching_pr_with(&g, delta, id_bound, &SimOptions::default())?;
    println!(
        "matched {} edges in {} rounds (bound {}), {} messages, maximal: {}",
        run.matching.len(),
        run.rounds,
        pr_round_bound(delta, id_bound),
        run.messages,
        is_maximal_matching(&g, run.matching.edges())?
    );
    Ok(())
}
