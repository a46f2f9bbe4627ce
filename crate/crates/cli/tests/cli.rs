use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sectorwalk"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(dir: &Path, args: &[&str]) -> Value {
    serde_json::from_str(&ok(dir, args)).unwrap()
}

fn lines(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn workspace() -> TempDir {
    let dir = TempDir::new().unwrap();
    for (name, family, params) in [
        ("grid23.json", "grid", "2,3"),
        ("path4.json", "path", "4"),
        ("cycle5.json", "cycle", "5"),
        ("grid46.json", "grid", "4,6"),
    ] {
        ok(dir.path(), &["generate", family, params, "--out", name]);
    }
    std::fs::write(dir.path().join("kernel.csv"), "2,0.5,0.1,0\n-0.5,1.5,0.2,0.3\n-0.1,-0.2,1,0.4\n0,-0.3,-0.4,1.2\n").unwrap();
    std::fs::write(dir.path().join("indefinite.csv"), "1,0\n0,-1\n").unwrap();
    std::fs::write(dir.path().join("halves.json"), r#"{"blocks": [[0, 1], [2, 3]], "counts": [1, 1]}"#).unwrap();
    std::fs::write(
        dir.path().join("block.json"),
        r#"{"n": 4, "degree": 2, "terms": [{"set": [0, 1], "coeff": 1}, {"set": [2, 3], "coeff": 1}]}"#,
    )
    .unwrap();
    std::fs::write(dir.path().join("point.json"), r#"{"n": 4, "degree": 2, "terms": [{"set": [0, 2], "coeff": 1}]}"#)
        .unwrap();
    dir
}

#[test]
fn generated_graph_round_trips() {
    let dir = workspace();
    let text = std::fs::read_to_string(dir.path().join("grid23.json")).unwrap();
    let g = sectorwalk_core::graph::parse_graph(&text).unwrap();
    assert_eq!((g.n(), g.edge_count()), (6, 7));
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("grid23.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "generate");
}

#[test]
fn k_matching_samples_are_reproducible() {
    let dir = workspace();
    let args = |out: &str| {
        vec![
            "sample", "k-matchings", "--graph", "grid23.json", "--size", "1", "--gap", "2", "--steps", "1000",
            "--chains", "100", "--seed", "7", "--out",
        ]
        .into_iter()
        .map(String::from)
        .chain([out.to_string()])
        .collect::<Vec<_>>()
    };
    let a: Vec<String> = args("a.jsonl");
    let b: Vec<String> = args("b.jsonl");
    ok(dir.path(), &a.iter().map(|s| s.as_str()).collect::<Vec<_>>());
    let out = bin().current_dir(dir.path()).env("SECTORWALK_THREADS", "1").args(&b).output().unwrap();
    assert!(out.status.success());
    let (pa, pb) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    assert_eq!(std::fs::read(&pa).unwrap(), std::fs::read(&pb).unwrap());

    let records = lines(&pa);
    assert_eq!(records.len(), 101);
    assert_eq!(records[0]["meta"]["seed"], 7);
    for r in &records[1..] {
        let set: Vec<usize> = serde_json::from_value(r["set"].clone()).unwrap();
        assert_eq!(set.len(), 4);
        assert_eq!(r["t"], 1000);
    }

    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.jsonl.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["parameters"]["records"], 100);
}

#[test]
fn different_seeds_differ() {
    let dir = workspace();
    for (seed, out) in [("1", "x.jsonl"), ("2", "y.jsonl")] {
        ok(
            dir.path(),
            &["sample", "k-matchings", "--graph", "grid46.json", "--size", "4", "--steps", "50", "--chains", "50", "--seed", seed, "--out", out],
        );
    }
    let x = std::fs::read_to_string(dir.path().join("x.jsonl")).unwrap();
    let y = std::fs::read_to_string(dir.path().join("y.jsonl")).unwrap();
    assert_ne!(x.lines().skip(1).collect::<Vec<_>>(), y.lines().skip(1).collect::<Vec<_>>());
}

#[test]
fn burnin_and_thin_select_times() {
    let dir = workspace();
    ok(
        dir.path(),
        &["sample", "k-matchings", "--graph", "cycle5.json", "--size", "2", "--steps", "20", "--burnin", "10", "--thin", "5", "--chains", "3", "--out", "t.jsonl"],
    );
    let times: Vec<u64> = lines(&dir.path().join("t.jsonl"))[1..].iter().map(|r| r["t"].as_u64().unwrap()).collect();
    assert_eq!(times, vec![10, 15, 20, 10, 15, 20, 10, 15, 20]);
}

#[test]
fn csv_output_has_header() {
    let dir = workspace();
    ok(dir.path(), &["sample", "ndpp", "--kernel", "kernel.csv", "--k", "2", "--steps", "10", "--chains", "4", "--format", "csv", "--out", "s.csv"]);
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "chain,t,set");
    assert_eq!(rows.len(), 5);
    assert!(rows[1].starts_with("0,10,"));
}

#[test]
fn matchings_are_valid() {
    let dir = workspace();
    ok(dir.path(), &["sample", "matchings", "--graph", "grid23.json", "--steps", "30", "--chains", "20", "--seed", "3", "--out", "m.jsonl"]);
    let text = std::fs::read_to_string(dir.path().join("grid23.json")).unwrap();
    let g = sectorwalk_core::graph::parse_graph(&text).unwrap();
    for r in &lines(&dir.path().join("m.jsonl"))[1..] {
        let monomers: Vec<usize> = serde_json::from_value(r["set"].clone()).unwrap();
        let pairs: Vec<(usize, usize)> = serde_json::from_value(r["edges"].clone()).unwrap();
        let mut covered: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).chain(monomers).collect();
        covered.sort_unstable();
        assert_eq!(covered, (0..6).collect::<Vec<_>>());
        assert!(pairs.iter().all(|&(a, b)| g.edge_between(a, b).is_some()));
    }
}

#[test]
fn partition_samples_respect_counts() {
    let dir = workspace();
    ok(
        dir.path(),
        &["sample", "partition", "--kernel", "kernel.csv", "--size", "2", "--constraints", "halves.json", "--steps", "20", "--chains", "30", "--out", "p.jsonl"],
    );
    let records = lines(&dir.path().join("p.jsonl"));
    assert_eq!(records[0]["meta"]["gap"], 2);
    for r in &records[1..] {
        let set: Vec<usize> = serde_json::from_value(r["set"].clone()).unwrap();
        assert_eq!(set.iter().filter(|&&x| x < 2).count(), 1, "{set:?}");
    }
}

#[test]
fn indefinite_kernel_is_an_input_error() {
    let dir = workspace();
    let out = run(dir.path(), &["sample", "ndpp", "--kernel", "indefinite.csv", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive semidefinite"));
}

#[test]
fn missing_matching_is_infeasible() {
    let dir = workspace();
    ok(dir.path(), &["generate", "path", "4", "--edge-weight", "0", "--out", "dead.json"]);
    let out = run(dir.path(), &["sample", "k-matchings", "--graph", "dead.json", "--size", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_graph_is_an_input_error() {
    let dir = workspace();
    std::fs::write(dir.path().join("neg.json"), r#"{"n": 2, "lambda": [1, 1], "edges": [{"u": 0, "v": 1, "w": -1}], "rotation": [[0], [0]]}"#).unwrap();
    let out = run(dir.path(), &["count", "pm", "--graph", "neg.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("negative weight"));
}

#[test]
fn perfect_matchings_are_exact() {
    let dir = workspace();
    let v = json(dir.path(), &["count", "pm", "--graph", "grid23.json"]);
    assert_eq!(v["estimate"], 3.0);
    assert_eq!(v["exact"], true);
}

#[test]
fn k_matching_count_is_close() {
    let dir = workspace();
    let v = json(dir.path(), &["count", "k-matchings", "--graph", "path4.json", "--size", "1", "--eps", "0.1", "--delta", "0.05"]);
    let estimate = v["estimate"].as_f64().unwrap();
    assert!((estimate - 3.0).abs() < 0.3, "{estimate}");
    assert!(v.get("elapsed_secs").is_none());
}

#[test]
fn infeasible_count_is_exact_zero() {
    let dir = workspace();
    let v = json(dir.path(), &["count", "k-matchings", "--graph", "path4.json", "--size", "3", "--eps", "0.1", "--delta", "0.05"]);
    assert_eq!(v["estimate"], 0.0);
    assert_eq!(v["exact"], true);
}

#[test]
fn sampled_counts_need_accuracy_flags() {
    let dir = workspace();
    let out = run(dir.path(), &["count", "k-matchings", "--graph", "path4.json", "--size", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mixed_derivative_matches_symbolic() {
    let dir = workspace();
    std::fs::write(
        dir.path().join("e2.json"),
        r#"{"degree": 2, "terms": [{"set": [0, 1], "coeff": 1}, {"set": [0, 2], "coeff": 1}, {"set": [1, 2], "coeff": 1}]}"#,
    )
    .unwrap();
    std::fs::write(dir.path().join("problem.json"), r#"{"directions": [[1, 1, 1]], "counts": [1], "point": [1, 2, 3]}"#).unwrap();
    let v = json(
        dir.path(),
        &["count", "mixed-derivative", "--poly", "e2.json", "--problem", "problem.json", "--eps", "0.1", "--delta", "0.05", "--seed", "4"],
    );
    let (est, truth) = (v["estimate"].as_f64().unwrap(), v["symbolic"].as_f64().unwrap());
    assert!((truth - 12.0).abs() < 1e-9);
    assert!((est - truth).abs() <= 0.1 * truth, "{est} vs {truth}");
}

#[test]
fn block_density_reaches_row_sum_three() {
    let dir = workspace();
    let v = json(dir.path(), &["diagnose", "poly", "--poly", "block.json"]);
    assert!((v["correlation"]["inf_row_sum"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert_eq!(v["polytope"]["max_length"], 4);
    assert_eq!(v["flc"].as_array().unwrap().len(), 4);
}

#[test]
fn point_mass_has_zero_influence() {
    let dir = workspace();
    let v = json(dir.path(), &["diagnose", "poly", "--poly", "point.json"]);
    let spectrum: Vec<f64> = serde_json::from_value(v["correlation"]["inf_spectrum"].clone()).unwrap();
    assert!(spectrum.iter().all(|&x| x == 0.0));
    assert_eq!(v["correlation"]["inf_row_sum"], 0.0);
    assert_eq!(v["support_size"], 1);
}

#[test]
fn single_exchange_is_flagged() {
    let dir = workspace();
    let v = json(dir.path(), &["diagnose", "matchings", "--graph", "cycle5.json", "--gap", "1"]);
    assert_eq!(v["walk"]["spectral_gap"], 0.0);
    assert_eq!(v["walk"]["flag"], "parity-reducible");
    assert_eq!(v["homogenization"]["passes"], true);
    let v = json(dir.path(), &["diagnose", "matchings", "--graph", "cycle5.json"]);
    assert!(v["walk"]["spectral_gap"].as_f64().unwrap() > 0.0);
    assert_eq!(v["entropy_bound"]["passes"], true);
    assert_eq!(v["log_support_in_bracket"], true);
}

#[test]
fn enumeration_guard_trips() {
    let dir = workspace();
    let out = run(dir.path(), &["diagnose", "k-matchings", "--graph", "grid46.json", "--size", "5"]);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--force"));
}

#[test]
fn replay_reproduces_samples() {
    let dir = workspace();
    ok(dir.path(), &["sample", "ndpp", "--kernel", "kernel.csv", "--k", "2", "--steps", "40", "--chains", "25", "--seed", "11", "--out", "first.jsonl"]);
    ok(dir.path(), &["replay", "first.jsonl.manifest.json", "--out", "second.jsonl"]);
    let read = |p: PathBuf| std::fs::read(p).unwrap();
    assert_eq!(read(dir.path().join("first.jsonl")), read(dir.path().join("second.jsonl")));
    assert!(dir.path().join("second.jsonl.manifest.json").exists());
}
