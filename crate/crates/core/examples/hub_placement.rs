//! Backup placement on the nine-node example graph around hub 25.

use backup_placement::graph::{load_graph, max_degree};
use backup_placement::oracle::neighborhood_independence;
use backup_placement::placement::{placement_load, run_backup_placement, selected_subgraph, IsolatedMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = load_graph(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/hub9.txt"))?;
    let c = neighborhood_independence(&g)?;
    println!("{} nodes, {} edges, max degree {}, neighborhood independence {c}", g.node_count(), g.edge_count(), max_degree(&g));

    let p = run_backup_placement(&g, IsolatedMode::Strict)?;
    print!("{}", p.to_text());

    let load = placement_load(&g, &p, c);
    println!("max load {} (bound {c}), histogram {:?}", load.max_load, load.histogram());
    println!("max degree of selected subgraph: {}", max_degree(&selected_subgraph(&g, &p)));
    Ok(())
}
