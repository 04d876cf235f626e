//! Round counts as n grows: placement stays at one round, matching stays flat.

use backup_placement::cli::{bench_rows, BenchSweep};
use backup_placement::generators::GraphFamily;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sweep = BenchSweep {
        family: GraphFamily::UnitDisk,
        sizes: (5..=12).map(|e| 1 << e).collect(),
        instances: 1,
        radius: None,
        p: None,
    };
    println!("{:>6} {:>6} {:>9} {:>9} {:>13} {:>10}", "n", "edges", "bp_rounds", "mm_rounds", "approx_rounds", "ratio");
    for r in bench_rows(&sweep, 1, None, 0.5, None)? {
        println!("{:>6} {:>6} {:>9} {:>9} {:>13} {:>10.3}", r.n, r.edges, r.bp_rounds, r.mm_rounds, r.approx_rounds, r.ratio);
    }
    Ok(())
}
