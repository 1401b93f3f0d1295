use std::process::{Command, Output};

use serde_json::Value;

fn hcube(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcube")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn codim1_table_is_sorted_tsv() {
    let out = hcube(&["sizes", "codim1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "a\tb\tt");
    let rows: Vec<(u32, u32, u32)> = body[1..]
        .iter()
        .map(|l| {
            let f: Vec<u32> = l.split('\t').map(|x| x.parse().unwrap()).collect();
            (f[0], f[1], f[2])
        })
        .collect();
    let mut sorted = rows.clone();
    sorted.sort();
    assert_eq!(rows, sorted);
    assert_eq!(rows.len(), 9);
    assert!(rows.contains(&(3, 3, 35)) && rows.contains(&(4, 3, 70)));
    assert!(text.contains("# content_sha256: "));
}

#[test]
fn output_is_deterministic() {
    let args = ["search", "--mode", "large", "--k", "7", "--max-edges", "3"];
    let a = hcube(&args);
    let b = hcube(&args);
    let c = hcube(&["--sequential", "search", "--mode", "large", "--k", "7", "--max-edges", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["body"], json(&c)["body"]);
    let seeded = ["verify", "antichain", "--ell", "4..8", "--trials", "200", "--seed", "5"];
    assert_eq!(hcube(&seeded).stdout, hcube(&seeded).stdout);
}

#[test]
fn header_describes_the_run() {
    let v = json(&hcube(&["search", "--mode", "large", "--k", "6", "--max-edges", "3"]));
    let h = &v["header"];
    assert_eq!(h["tool"], "hcube");
    assert_eq!(h["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(h["config"]["k"], 6);
    let body = serde_json::to_string(&v["body"]).unwrap();
    assert_eq!(h["content_sha256"].as_str().unwrap().len(), 64);
    assert!(!body.is_empty());
}

#[test]
fn search_document_shape() {
    let v = json(&hcube(&["search", "--mode", "large", "--k", "8", "--max-edges", "3"]));
    let depths = v["body"]["depths"].as_array().unwrap();
    assert_eq!(depths.len(), 3);
    let third = &depths[2];
    assert_eq!(third["edges"], 3);
    let maxima: Vec<u64> = third["shapes"].as_array().unwrap().iter().map(|s| s["max"].as_u64().unwrap()).collect();
    assert_eq!(maxima, vec![9, 18]);
    for s in third["shapes"].as_array().unwrap() {
        assert!(s["shape"]["edges"].is_array() && s["shape"]["k"].is_u64());
        assert!(s["fraction"].as_str().unwrap().contains('/'));
    }
}

#[test]
fn verify_large_checks_its_range() {
    let out = hcube(&["verify", "large", "--k", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let out = hcube(&["verify", "large", "--k", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["body"]["passed"], true);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(hcube(&["search", "--mode", "medium", "--k", "6"]).status.code(), Some(2));
    assert_eq!(hcube(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hcube(&["oracle", "eval", "--map", "{\"k\":2,\"m\":1,\"entries\":[[\"1\"]]}"]).status.code(), Some(2));
}

#[test]
fn window_lists_witnesses() {
    let v = json(&hcube(&["window", "hn", "--n", "8"]));
    let text = v["body"].to_string();
    for t in ["64", "70", "80", "96", "128", "256"] {
        assert!(text.contains(t), "{t} missing");
    }
}

#[test]
fn oracle_and_shape_commands() {
    let v = json(&hcube(&["oracle", "eval", "--map", "{\"k\":3,\"m\":1,\"entries\":[[\"1\",\"-1\",\"1/2\"]]}"]));
    assert!(v["body"].is_object());
    let v = json(&hcube(&["shape", "--shape", "{\"k\":4,\"edges\":[[0,3],[1,3],[2,3]]}"]));
    assert!(v["body"].to_string().contains('9'));
}

#[test]
fn writes_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.tsv");
    let out = hcube(&["sizes", "codim1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(path).unwrap().contains("a\tb\tt\n"));
}
