use std::process::Command;

use flipgraph::geometry::{solve_complete_structure, Tolerances};
use flipgraph::monodromy::{build, parse_word};

fn flipgraph() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_flipgraph"));
    cmd.env_remove("FLIPGRAPH_CONFIG");
    cmd
}

fn records(stdout: &[u8]) -> Vec<serde_json::Value> {
    String::from_utf8_lossy(stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect()
}

#[test]
fn build_then_solve_matches_in_process() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tri.json");
    let status = flipgraph().args(["build", "L^2R^3", "--json"]).arg(&path).status().unwrap();
    assert!(status.success());
    assert!(path.exists());

    let out = flipgraph().arg("solve").arg(&path).output().unwrap();
    assert!(out.status.success());
    let rec = &records(&out.stdout)[0];

    let tri = build(&parse_word("L^2R^3").unwrap()).unwrap();
    let sol = solve_complete_structure(&tri, None, &Tolerances::default()).unwrap();
    let shapes = rec["shapes"].as_array().unwrap();
    assert_eq!(shapes.len(), sol.shapes.len());
    for (s, want) in shapes.iter().zip(&sol.shapes) {
        assert_eq!(s[0].as_f64().unwrap().to_bits(), want.z.re.to_bits());
        assert_eq!(s[1].as_f64().unwrap().to_bits(), want.z.im.to_bits());
    }
    assert_eq!(rec["residual"].as_f64().unwrap().to_bits(), sol.residual.to_bits());
}

#[test]
fn isolated_even_word() {
    let out = flipgraph().args(["isolated", "R^2L^2"]).output().unwrap();
    assert!(out.status.success());
    let rec = &records(&out.stdout)[0];
    assert_eq!(rec["is_isolated"], true);
    assert_eq!(rec["is_geometric"], true);
}

#[test]
fn single_letter_word_fails() {
    let out = flipgraph().args(["build", "LLLL"]).output().unwrap();
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "SingleLetterWord");
}

#[test]
fn usage_error_prints_help() {
    let out = flipgraph().arg("frobnicate").output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn isosig_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = flipgraph().args(["isosig", "decode", "fLLQcacdedejbqqww"]).output().unwrap();
    assert!(out.status.success());
    let path = dir.path().join("figure_eight.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let enc = flipgraph().args(["isosig", "encode"]).arg(&path).output().unwrap();
    assert!(enc.status.success());
    assert_eq!(records(&enc.stdout)[0]["isosig"], "fLLQcacdedejbqqww");
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[explorer]\ndepth = 1\nmax_nodes = 5\n").unwrap();
    let out = flipgraph()
        .env("FLIPGRAPH_CONFIG", &cfg)
        .args(["explore", "RL", "--filter", "all", "--max-nodes", "3"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&out.stdout);
    let graph = recs.last().unwrap();
    assert_eq!(graph["depth"], 1);
    assert!(graph["nodes"].as_u64().unwrap() <= 3);

    std::fs::write(&cfg, "[tolerances]\neps_res = -1.0\n").unwrap();
    let bad = flipgraph().env("FLIPGRAPH_CONFIG", &cfg).args(["solve", "RL"]).output().unwrap();
    assert!(!bad.status.success());
}

#[test]
fn cusp_writes_svg_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("cusp.svg");
    let out = flipgraph().args(["cusp", "R^2L^2", "--report", "--svg"]).arg(&svg).output().unwrap();
    assert!(out.status.success());
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let recs = records(&out.stdout);
    assert_eq!(recs[0]["triangles"], 16);
    // 16 triangles, 24 shared edges
    assert_eq!(recs.iter().filter(|r| r["kind"] == "cusp_edge").count(), 24);
}

#[test]
fn reproduce_paper_small_range() {
    let out = flipgraph().args(["reproduce-paper", "--n-max", "2", "--m-max", "2"]).output().unwrap();
    assert!(out.status.success());
    let recs = records(&out.stdout);
    let isolation: Vec<_> = recs.iter().filter(|r| r["kind"] == "isolation").collect();
    assert_eq!(isolation.len(), 4);
    assert!(isolation.iter().all(|r| r["is_isolated"] == true));
    assert!(recs.iter().any(|r| r["kind"] == "table" && r["matches"] == true));
    assert_eq!(recs.last().unwrap()["failed"], 0);
}
