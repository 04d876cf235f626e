//! RAM corruption and one-round recovery of the placement.

use backup_placement::generators::gen_unit_disk;
use backup_placement::oracle::neighborhood_independence;
use backup_placement::selfstab::{run_self_stab_bp, CorruptionMode, FaultEvent, FaultSchedule, Victims};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = gen_unit_disk(60, 0.25, 8).without_isolated();
    let c = neighborhood_independence(&g)?;

    let faults = FaultSchedule::new(
        vec![
            FaultEvent { round: 2, victims: Victims::All, mode: CorruptionMode::RandomBytes },
            FaultEvent { round: 5, victims: Victims::All, mode: CorruptionMode::TargetedValue },
        ],
        42,
    );
    let report = run_self_stab_bp(&g, &faults, 10, c)?;
    println!("legal per round: {:?}", report.legal);
    println!(
        "last fault {}, legal again at {:?}, stabilization time {:?}, stayed legal {}",
        report.last_fault_round, report.stabilization_round, report.stabilization_time, report.stayed_legal
    );

    let mut worst = 0;
    for seed in 0..200 {
        let faults = FaultSchedule::random(&g, 10, 4, seed);
        let r = run_self_stab_bp(&g, &faults, faults.last_fault_round() + 3, c)?;
        worst = worst.max(r.stabilization_time.expect("stabilizes"));
    }
    println!("worst stabilization time over 200 random schedules: {worst}");
    Ok(())
}
