//! Running another program on top of the self-stabilizing placement.

use backup_placement::generators::gen_unit_disk;
use backup_placement::graph::max_degree;
use backup_placement::oracle::neighborhood_independence;
use backup_placement::selfstab::{
    compose_bp_then, composed_time_bound, run_self_stab, selection_map, ComposedProgram, DegreeEcho, FaultSchedule,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = gen_unit_disk(80, 0.2, 5).without_isolated();
    let c = neighborhood_independence(&g)?;
    println!("Δ(G)={} c={c}", max_degree(&g));

    let prog = compose_bp_then(DegreeEcho);
    let faults = FaultSchedule::random(&g, 6, 3, 17);
    let report = run_self_stab(&g, &prog, &faults, 12, |_, states| {
        // Every node reports a G' degree within c + 1 and its selection is set.
        let selected = selection_map::<ComposedProgram<DegreeEcho>>(states);
        states.iter().all(|(v, s)| s.ram.payload.0.is_some_and(|d| d as usize <= c + 1) && selected[v].is_some())
    })?;
    println!(
        "stabilization time {:?} (bound {}), selection map constant afterwards: {}",
        report.stabilization_time,
        composed_time_bound(0),
        report.selection_constant_after_stabilization()
    );
    Ok(())
}
