use std::collections::{BTreeMap, BTreeSet};

use backup_placement::generators::{gen_line_graph, gen_random_gnp, gen_unit_disk};
use backup_placement::graph::{max_degree, parse_edge_list, write_edge_list, Graph, NodeId};
use backup_placement::matching::{is_maximal_matching, maximal_matching_pr, PrMatchingProgram};
use backup_placement::oracle::neighborhood_independence;
use backup_placement::placement::{
    next_modulo, placement_load, run_backup_placement, selected_subgraph, BackupPlacementProgram, IsolatedMode,
};
use backup_placement::selfstab::{run_self_stab_bp, FaultSchedule};
use backup_placement::sim::{run_sync, SimOptions, Simulation};
use proptest::prelude::*;

/// Graphs on up to `max_n` vertices with arbitrary distinct IDs.
fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n)
        .prop_flat_map(|n| {
            (
                prop::collection::btree_set(0u64..1_000, n),
                prop::collection::vec((0..n, 0..n), 0..3 * n),
            )
        })
        .prop_map(|(ids, pairs)| {
            let ids: Vec<u64> = ids.into_iter().collect();
            let edges = pairs.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (NodeId(ids[a]), NodeId(ids[b])));
            Graph::from_parts(ids.iter().map(|&v| NodeId(v)), edges).unwrap()
        })
}

fn arb_family_graph() -> impl Strategy<Value = Graph> {
    (0u8..3, 5usize..40, any::<u64>()).prop_map(|(kind, n, seed)| match kind {
        0 => gen_unit_disk(n, 0.25, seed),
        1 => gen_line_graph(&gen_random_gnp(n.min(12), 0.3, seed)),
        _ => gen_random_gnp(n, 3.0 / n as f64, seed),
    })
}

proptest! {
    #[test]
    fn next_modulo_is_circular_successor(v in 0u64..200, nb in prop::collection::btree_set(0u64..200, 1..20)) {
        prop_assume!(!nb.contains(&v));
        let neighbors: Vec<NodeId> = nb.iter().map(|&x| NodeId(x)).collect();
        let got = next_modulo(NodeId(v), &neighbors).unwrap();
        let expected = nb.iter().find(|&&x| x > v).or(nb.iter().next()).copied().unwrap();
        prop_assert_eq!(got, NodeId(expected));
    }

    #[test]
    fn adjacent_neighbors_never_share_a_selection(g in arb_graph(12)) {
        let p = run_backup_placement(&g, IsolatedMode::Lenient).unwrap();
        for u in g.nodes() {
            let selectors: Vec<NodeId> = g.neighbors(u).iter().copied().filter(|&w| p.get(w) == Some(u)).collect();
            for (i, &a) in selectors.iter().enumerate() {
                for &b in &selectors[i + 1..] {
                    prop_assert!(!g.has_edge(a, b), "{a} and {b} both select {u}");
                }
            }
        }
    }

    #[test]
    fn load_and_degree_bounds(g in arb_family_graph()) {
        prop_assume!(max_degree(&g) <= 25);
        let c = neighborhood_independence(&g).unwrap();
        let p = run_backup_placement(&g, IsolatedMode::Lenient).unwrap();
        prop_assert!(placement_load(&g, &p, c).max_load <= c);
        prop_assert!(max_degree(&selected_subgraph(&g, &p)) <= c + 1);
    }

    #[test]
    fn order_preserving_relabeling_commutes(g in arb_graph(15), scale in 1u64..50, offset in 0u64..1000) {
        let f = |v: NodeId| NodeId(v.0 * scale + offset);
        let h = g.relabel(f);
        let p = run_backup_placement(&g, IsolatedMode::Lenient).unwrap();
        let q = run_backup_placement(&h, IsolatedMode::Lenient).unwrap();
        let mapped: BTreeMap<NodeId, NodeId> = p.selection.iter().map(|(&v, &w)| (f(v), f(w))).collect();
        prop_assert_eq!(mapped, q.selection);
    }

    #[test]
    fn placement_depends_only_on_the_closed_neighborhood(g in arb_graph(15)) {
        let p = run_backup_placement(&g, IsolatedMode::Lenient).unwrap();
        for v in g.nodes() {
            let local = g.induced_subgraph(&g.ball(v, 1));
            let q = run_backup_placement(&local, IsolatedMode::Lenient).unwrap();
            prop_assert_eq!(p.get(v), q.get(v));
        }
    }

    #[test]
    fn matching_state_after_r_rounds_depends_on_r_ball(g in arb_graph(14), r in 1usize..5) {
        let id_bound = 1_000;
        let delta = max_degree(&g);
        let prog = PrMatchingProgram::new(delta, id_bound);
        let opts = SimOptions { id_bound: Some(id_bound), ..Default::default() };
        let mut full = Simulation::new(&g, &prog, &opts).unwrap();
        for _ in 0..r {
            full.step().unwrap();
        }
        for v in g.nodes().step_by(3) {
            let ball = g.induced_subgraph(&g.ball(v, r));
            let mut local = Simulation::new(&ball, &prog, &opts).unwrap();
            for _ in 0..r {
                local.step().unwrap();
            }
            prop_assert_eq!(&full.states()[&v], &local.states()[&v]);
        }
    }

    #[test]
    fn maximal_matching_is_valid_and_maximal(g in arb_graph(25)) {
        let m = maximal_matching_pr(&g).unwrap();
        prop_assert!(is_maximal_matching(&g, m.edges()).unwrap());
    }

    #[test]
    fn runs_are_deterministic_and_conserve_messages(g in arb_graph(20)) {
        let prog = PrMatchingProgram::new(max_degree(&g), 1_000);
        let opts = SimOptions { id_bound: Some(1_000), ..Default::default() };
        let a = run_sync(&g, &prog, prog.scheduled_rounds(), &opts).unwrap();
        let b = run_sync(&g, &prog, prog.scheduled_rounds(), &opts).unwrap();
        prop_assert_eq!(&a.snapshots, &b.snapshots);
        prop_assert_eq!(&a.outputs, &b.outputs);
        for r in 1..a.sent_per_round.len() {
            prop_assert_eq!(a.delivered_per_round[r], a.sent_per_round[r - 1]);
        }
        let bp = run_sync(&g, &BackupPlacementProgram, 5, &SimOptions::default()).unwrap();
        prop_assert_eq!(bp.rounds_executed, 1);
    }

    #[test]
    fn edge_list_text_reloads_to_the_same_graph(g in arb_graph(20)) {
        prop_assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn random_faults_stabilize_in_one_round(g in arb_family_graph(), seed in any::<u64>(), events in 1usize..6) {
        let g = g.without_isolated();
        prop_assume!(!g.is_empty() && max_degree(&g) <= 25);
        let c = neighborhood_independence(&g).unwrap();
        let faults = FaultSchedule::random(&g, 8, events, seed);
        let r = run_self_stab_bp(&g, &faults, faults.last_fault_round() + 4, c).unwrap();
        prop_assert_eq!(r.stabilization_time, Some(1));
        prop_assert!(r.stayed_legal && r.rom_intact);
        prop_assert!(r.selection_constant_after_stabilization());
    }
}

#[test]
fn generated_line_graphs_respect_claw_freeness() {
    // Exhaustive over small bases: at most 2 independent vertices per neighborhood.
    for seed in 0..200 {
        let base = gen_random_gnp(6, 0.5, seed);
        if base.edge_count() > 12 {
            continue;
        }
        let l = gen_line_graph(&base);
        assert!(neighborhood_independence(&l).unwrap() <= 2, "seed {seed}");
    }
    let ids: BTreeSet<NodeId> = gen_line_graph(&gen_random_gnp(6, 1.0, 0)).nodes().collect();
    assert_eq!(ids.len(), 15);
}
