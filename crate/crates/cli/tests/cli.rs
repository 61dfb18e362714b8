use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn dpath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpath")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn put(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn path_instance(k: usize) -> Value {
    json!({"vertices": 3, "edges": [[0, 1], [1, 2]], "terminals": [0, 2], "demand_edges": [[0, 2]], "k": k})
}

/// 3x3 grid with pendant terminals on the four sides; the two demanded
/// pairs cross.
fn two_crossing_pairs() -> Value {
    let mut edges = Vec::new();
    for r in 0..3 {
        for c in 0..3 {
            let v = 3 * r + c;
            if c < 2 {
                edges.push(json!([v, v + 1]));
            }
            if r < 2 {
                edges.push(json!([v, v + 3]));
            }
        }
    }
    for (t, v) in [(9, 1), (10, 7), (11, 3), (12, 5)] {
        edges.push(json!([v, t]));
    }
    json!({"vertices": 13, "edges": edges, "terminals": [9, 10, 11, 12], "demand_edges": [[9, 10], [11, 12]], "k": 2})
}

/// 4x4 grid with six pendant terminals around the outer face; terminal `i`
/// is paired with terminal `i+3`, so every two pairs cross. At most one pair
/// routes, yet no small vertex set separates all pairs.
fn crossing_grid() -> Value {
    let s = 4;
    let mut edges = Vec::new();
    for r in 0..s {
        for c in 0..s {
            let v = s * r + c;
            if c + 1 < s {
                edges.push(json!([v, v + 1]));
            }
            if r + 1 < s {
                edges.push(json!([v, v + s]));
            }
        }
    }
    let ring = [0, 2, 7, 15, 13, 8];
    let ts: Vec<usize> = (16..22).collect();
    for (&t, &v) in ts.iter().zip(&ring) {
        edges.push(json!([v, t]));
    }
    let demand: Vec<Value> = (0..3).map(|i| json!([ts[i], ts[i + 3]])).collect();
    json!({"vertices": 22, "edges": edges, "terminals": ts, "demand_edges": demand, "k": 2})
}

fn demand_only(n: usize, demand: &[(usize, usize)]) -> Value {
    let edges: Vec<Value> = (0..n - 1).map(|v| json!([v, v + 1])).collect();
    let d: Vec<Value> = demand.iter().map(|&(a, b)| json!([a, b])).collect();
    json!({"vertices": n, "edges": edges, "terminals": (0..n).collect::<Vec<_>>(), "demand_edges": d, "k": 1})
}

#[test]
fn solve_single_path() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "p.json", &path_instance(1));
    let rep_path = dir.path().join("rep.json");
    let o = dpath(&["solve", s(&f), "--output", s(&rep_path)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert_eq!(r["outcome"], "paths");
    assert_eq!(r["witness"]["paths"], json!([[0, 1, 2]]));
    assert_eq!(code(&dpath(&["verify", s(&f), s(&rep_path)])), 0);
}

#[test]
fn solve_zero_target() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "p.json", &path_instance(0));
    let o = dpath(&["solve", s(&f)]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["witness"]["paths"], json!([]));
}

#[test]
fn solve_no_instance() {
    let dir = TempDir::new().unwrap();
    let inst = json!({"vertices": 4, "edges": [[0, 1], [2, 3]], "terminals": [0, 3], "demand_edges": [[0, 3]], "k": 1});
    let f = put(&dir, "no.json", &inst);
    let o = dpath(&["solve", s(&f)]);
    assert_eq!(code(&o), 1);
    assert_eq!(report(&o)["outcome"], "no");
}

#[test]
fn crossing_grid_gives_matching_witness() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "grid.json", &crossing_grid());
    let rep_path = dir.path().join("rep.json");
    let o = dpath(&["solve", s(&f), "--k", "2", "--r", "2", "--output", s(&rep_path)]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(&o);
    assert_eq!(r["outcome"], "matching_witness");
    assert_eq!(r["witness"]["pattern"]["kind"], "InducedMatching");
    assert_eq!(code(&dpath(&["verify", s(&f), s(&rep_path)])), 0);
}

#[test]
fn budget_exhaustion_exits_three() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "grid.json", &two_crossing_pairs());
    let o = Command::new(env!("CARGO_BIN_EXE_dpath"))
        .args(["solve", s(&f), "--k", "2", "--r", "3"])
        .env("DPATH_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(report(&o)["outcome"], "budget_exhausted");
}

#[test]
fn malformed_file_names_the_field() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(&f, "{\"vertices\": 2,\n \"edges\": [[0, 1]],\n \"terminals\": [0, 1],\n \"k\": 1}").unwrap();
    let o = dpath(&["solve", s(&f)]);
    assert_eq!(code(&o), 4);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("demand_edges") && err.contains("line"), "{err}");
}

#[test]
fn cover_hitting_set_verifies() {
    let dir = TempDir::new().unwrap();
    let inst = json!({"vertices": 5, "edges": [[0, 1], [1, 2], [1, 3], [1, 4]], "terminals": [0, 2, 3, 4],
        "demand_edges": [[0, 2], [3, 4]], "k": 2});
    let f = put(&dir, "star.json", &inst);
    let rep_path = dir.path().join("rep.json");
    let o = dpath(&["cover", s(&f), "--output", s(&rep_path)]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&o)["outcome"], "hitting_set");
    assert_eq!(code(&dpath(&["verify", s(&f), s(&rep_path)])), 0);
}

#[test]
fn approx_returns_packing() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "p.json", &path_instance(1));
    let o = dpath(&["approx", s(&f)]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["witness"]["paths"].as_array().unwrap().len(), 1);
}

#[test]
fn generated_matching_instance_and_witness() {
    let dir = TempDir::new().unwrap();
    let prefix = dir.path().join("m");
    let o = dpath(&["gen", "matching-hard", "--k", "1", "--n", "2", "--seed", "4", "--planted", "--out", s(&prefix)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let inst = dir.path().join("m.json");
    let wit = dir.path().join("m.witness.json");
    assert_eq!(code(&dpath(&["verify", s(&inst), s(&wit)])), 0);

    let mut w: Value = serde_json::from_str(&std::fs::read_to_string(&wit).unwrap()).unwrap();
    w["paths"][0].as_array_mut().unwrap().remove(1);
    let tampered = put(&dir, "t.json", &w);
    assert_eq!(code(&dpath(&["verify", s(&inst), s(&tampered)])), 1);
}

#[test]
fn generated_skew_instance_and_witness() {
    let dir = TempDir::new().unwrap();
    let prefix = dir.path().join("s");
    assert_eq!(code(&dpath(&["gen", "skew-hard", "--planted", "--out", s(&prefix)])), 0);
    let inst: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(inst["k"], 14);
    assert!(inst["labels"].is_object());
    let wit = dir.path().join("s.witness.json");
    assert_eq!(code(&dpath(&["verify", s(&dir.path().join("s.json")), s(&wit)])), 0);
}

#[test]
fn generated_grid_tiling_and_random() {
    let o = dpath(&["gen", "grid-tiling", "--k", "2", "--n", "2", "--planted"]);
    assert_eq!(code(&o), 0);
    let gt = report(&o);
    assert_eq!(gt["sets"].as_array().unwrap().len(), 2);
    assert!(gt["solution"].is_array());
    let a = dpath(&["gen", "random", "--k", "2", "--n", "9", "--seed", "3"]);
    let b = dpath(&["gen", "random", "--k", "2", "--n", "9", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(report(&a)["vertices"], 9);
}

#[test]
fn analyze_trichotomy() {
    let dir = TempDir::new().unwrap();
    let m3 = put(&dir, "m3.json", &demand_only(6, &[(0, 1), (2, 3), (4, 5)]));
    let o = dpath(&["analyze", s(&m3), "--r", "3"]);
    assert_eq!(code(&o), 2);
    assert_eq!(report(&o)["outcome"], "matching");

    let s3 = put(&dir, "s3.json", &demand_only(6, &[(0, 3), (0, 4), (0, 5), (1, 4), (1, 5), (2, 5)]));
    let rep_path = dir.path().join("rep.json");
    let o = dpath(&["analyze", s(&s3), "--r", "3", "--output", s(&rep_path)]);
    assert_eq!(report(&o)["outcome"], "skew");
    assert_eq!(code(&dpath(&["verify", s(&s3), s(&rep_path)])), 0);

    let k22 = put(&dir, "k22.json", &demand_only(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]));
    let o = dpath(&["analyze", s(&k22), "--r", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["outcome"], "neither");
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let f = put(&dir, "grid.json", &crossing_grid());
    let strip = |o: &Output| {
        let mut r = report(o);
        r["stats"].as_object_mut().unwrap().remove("wall_ms");
        r
    };
    let a = dpath(&["solve", s(&f), "--k", "1", "--show-constants"]);
    let b = dpath(&["solve", s(&f), "--k", "1", "--show-constants"]);
    assert_eq!(strip(&a), strip(&b));
    let c = &report(&a)["constants"];
    assert_eq!(c["skew_reduction_k_prime"], 14);
    assert_eq!(c["clique_reduction_size"], 10);
}

#[test]
fn dot_output_and_dimacs_input() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.dimacs");
    std::fs::write(&g, "c path\np edge 3 2\ne 1 2\ne 2 3\n").unwrap();
    let d = put(&dir, "d.json", &json!({"terminals": [0, 2], "demand_edges": [[0, 2]], "k": 1}));
    let dot = dir.path().join("g.dot");
    let o = dpath(&["solve", s(&g), "--demand", s(&d), "--dot", s(&dot)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("graph dpath {") && text.contains("0 -- 1 [color=red"));
}

#[test]
fn usage_errors_exit_four() {
    assert_eq!(code(&dpath(&["solve"])), 4);
    assert_eq!(code(&dpath(&["--help"])), 0);
}
