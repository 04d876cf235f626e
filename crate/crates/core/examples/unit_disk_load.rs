//! Load and selected-subgraph degree on random unit-disk and line graphs.

use backup_placement::generators::{gen_line_graph, gen_random_gnp, gen_unit_disk};
use backup_placement::graph::{max_degree, Graph};
use backup_placement::oracle::neighborhood_independence;
use backup_placement::placement::{placement_load, run_backup_placement, selected_subgraph, IsolatedMode};

fn summarize(label: &str, g: &Graph) {
    let c = neighborhood_independence(g).expect("degrees within the oracle guard");
    let p = run_backup_placement(g, IsolatedMode::Lenient).unwrap();
    let load = placement_load(g, &p, c);
    let d = max_degree(&selected_subgraph(g, &p));
    println!("{label:<28} n={:<4} Δ={:<3} c={c} max_load={} Δ(G')={d}", g.node_count(), max_degree(g), load.max_load);
}

fn main() {
    for seed in 0..5 {
        summarize(&format!("unit-disk r=0.2 seed={seed}"), &gen_unit_disk(120, 0.2, seed));
    }
    for seed in 0..5 {
        summarize(&format!("line-graph of G(12,0.4) seed={seed}"), &gen_line_graph(&gen_random_gnp(12, 0.4, seed)));
    }
}
