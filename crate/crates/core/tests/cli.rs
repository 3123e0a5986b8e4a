use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spiderweb(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spiderweb")).args(args).env("SPIDERWEB_DATA_DIR", dir).current_dir(dir).output().unwrap()
}

#[test]
fn experiments_rerun_identically_and_report_failures_in_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let first = spiderweb(dir.path(), &["experiment", "complexity-curves", "--trials", "50"]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let data = fs::read(dir.path().join("complexity-curves.csv")).unwrap();
    assert!(spiderweb(dir.path(), &["experiment", "complexity-curves", "--trials", "50"]).status.success());
    assert_eq!(fs::read(dir.path().join("complexity-curves.csv")).unwrap(), data);
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("complexity-curves.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);

    // the high-compatibility vertex count misses its reference value
    let trim = spiderweb(dir.path(), &["experiment", "trim-table"]);
    assert_eq!(trim.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&trim.stdout).contains("FAIL trim-table: high-compatibility vertices"));

    assert_eq!(spiderweb(dir.path(), &["experiment", "no-such-thing"]).status.code(), Some(2));
}

#[test]
fn encode_corrupt_retrieve_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(spiderweb(p, &["generate", "--constraints", "high-compatibility", "--out", "g.swdg"]).status.success());
    let cap = spiderweb(p, &["capacity", "--digraph", "g.swdg", "--format", "csv"]);
    assert!(String::from_utf8_lossy(&cap.stdout).starts_with("rho,capacity,"));

    let data: Vec<u8> = (0..300u32).map(|i| (i * 7 % 251) as u8).collect();
    fs::write(p.join("in.bin"), &data).unwrap();
    assert!(spiderweb(p, &["encode", "--digraph", "g.swdg", "--in", "in.bin", "--out", "seqs.txt"]).status.success());
    assert!(spiderweb(p, &["decode", "--digraph", "g.swdg", "--in", "seqs.txt", "--out", "back.bin"]).status.success());
    assert_eq!(fs::read(p.join("back.bin")).unwrap(), data);

    let n = fs::read_to_string(p.join("seqs.txt")).unwrap().lines().count();
    let args = ["corrupt", "--digraph", "g.swdg", "--reads", "seqs.txt", "--error-rate", "0.02", "--copies", "6", "--out", "reads.txt"];
    assert!(spiderweb(p, &args).status.success());
    assert_eq!(fs::read_to_string(p.join("reads.txt")).unwrap().lines().count(), 6 * n);

    let out = spiderweb(p, &["correct", "--digraph", "g.swdg", "--reads", "reads.txt", "--format", "csv"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("id,status,candidates"));
    assert_eq!(text.lines().count(), 6 * n + 1);

    let expect = n.to_string();
    let args = ["retrieve", "--digraph", "g.swdg", "--reads", "reads.txt", "--expect", &expect, "--report", "report.toml", "--out", "msgs.txt"];
    assert!(spiderweb(p, &args).status.success());
    let report: toml::Table = fs::read_to_string(p.join("report.toml")).unwrap().parse().unwrap();
    assert_eq!(report["retrieved"].as_integer(), Some(n as i64));
    assert_eq!(fs::read_to_string(p.join("msgs.txt")).unwrap().lines().count(), n);
}
