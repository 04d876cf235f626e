use std::path::PathBuf;
use std::process::{Command, Output};

fn bpsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpsim")).args(args).output().unwrap()
}

fn hub9() -> String {
    format!("{}/fixtures/hub9.txt", env!("CARGO_MANIFEST_DIR"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_hub_example() {
    let o = bpsim(&["verify", "--graph", &hub9()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("max_load 4"), "{text}");
    assert!(text.contains("max degree of G' 5"), "{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_single_edge() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("edge.txt");
    std::fs::write(&g, "1 2\n").unwrap();
    assert_eq!(bpsim(&["verify", "--graph", g.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn verify_rejects_wrong_placements() {
    let dir = tempfile::tempdir().unwrap();
    // Everyone dumps on the hub: valid edges, but load 8 exceeds c = 4.
    let overloaded = dir.path().join("overloaded.txt");
    std::fs::write(&overloaded, "25 -> 9\n9 -> 25\n20 -> 25\n4 -> 25\n30 -> 25\n7 -> 25\n40 -> 25\n50 -> 25\n6 -> 25\n").unwrap();
    let o = bpsim(&["verify", "--graph", &hub9(), "--placement", overloaded.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL load_bound"));

    // 9 is not adjacent to 30.
    let foreign = dir.path().join("foreign.txt");
    std::fs::write(&foreign, "25 -> 30\n9 -> 30\n20 -> 25\n30 -> 4\n4 -> 25\n7 -> 25\n40 -> 7\n50 -> 6\n6 -> 25\n").unwrap();
    let o = bpsim(&["verify", "--graph", &hub9(), "--placement", foreign.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let checks: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(checks[0]["name"], "placement_valid");
    assert_eq!(checks[0]["status"], "fail");
}

#[test]
fn verify_reports_skipped_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("hub.txt");
    let text: String = (1..=30).map(|i| format!("0 {i}\n")).collect();
    std::fs::write(&g, text).unwrap();
    let o = bpsim(&["verify", "--graph", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("SKIP load_bound"));
    assert_eq!(bpsim(&["verify", "--graph", g.to_str().unwrap(), "--c", "30"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(bpsim(&["bp"]).status.code(), Some(2));
    assert_eq!(bpsim(&["bp", "--family", "unit-disk"]).status.code(), Some(2));
    assert_eq!(bpsim(&["gen", "--family", "hexagons", "--n", "4"]).status.code(), Some(2));
    assert_eq!(bpsim(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bpsim(&["bp", "--graph", "/nonexistent/graph.txt"]).status.code(), Some(2));
}

#[test]
fn bp_prints_hub_placement() {
    let o = bpsim(&["bp", "--graph", &hub9()]);
    assert_eq!(stdout(&o), "4 -> 25\n6 -> 25\n7 -> 25\n9 -> 20\n20 -> 25\n25 -> 30\n30 -> 4\n40 -> 7\n50 -> 6\n");
    let o = bpsim(&["bp", "--graph", &hub9(), "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["max_load"], 4);
    assert_eq!(doc["gprime_max_degree"], 5);
    assert_eq!(doc["histogram"]["4"], 1);
}

#[test]
fn gen_output_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let out: PathBuf = dir.path().join("g.txt");
    let o = bpsim(&["gen", "--family", "unit-disk", "--n", "50", "--radius", "0.3", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let g = backup_placement::load_graph(&out).unwrap();
    assert_eq!(g, backup_placement::generators::gen_unit_disk(50, 0.3, 7));
}

#[test]
fn empty_bench_sweep_is_header_only() {
    let o = bpsim(&["bench", "--sizes", ""]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1);
    assert!(stdout(&o).starts_with("family,n,seed,c,"));
}

#[test]
fn approx_and_selfstab_reports() {
    let o = bpsim(&["approx", "--graph", &hub9(), "--epsilon", "0.25"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["mcm_size"], 4);
    assert!(doc["matching_size"].as_u64().unwrap() * 9 >= 4 * 4);

    let dir = tempfile::tempdir().unwrap();
    let faults = dir.path().join("faults.json");
    std::fs::write(&faults, r#"[{"round": 5, "victims": "all", "mode": "targeted-value"}]"#).unwrap();
    let o = bpsim(&["selfstab", "--graph", &hub9(), "--faults", faults.to_str().unwrap(), "--rounds", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["last_fault_round"], 5);
    assert_eq!(doc["stabilization_time"], 1);
}
