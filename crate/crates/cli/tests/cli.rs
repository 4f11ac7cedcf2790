use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn l3c(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l3c")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn put(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const K4: &str = "p l3c 4 6\ne 1 2\ne 1 3\ne 1 4\ne 2 3\ne 2 4\ne 3 4\n";

#[test]
fn k4_is_no() {
    let dir = tempfile::tempdir().unwrap();
    let f = put(dir.path(), "k4.l3c", K4);
    let o = l3c(&["solve", &f]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "s NO\n");
    assert_eq!(code(&l3c(&["oracle", &f])), 1);
}

#[test]
fn planted_yes_with_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let gen = l3c(&["gen", "--family", "planted", "--n", "18", "--seed", "4"]);
    assert_eq!(code(&gen), 0);
    let f = put(dir.path(), "p.l3c", &stdout(&gen));
    let report = dir.path().join("r.json");
    let o = l3c(&["solve", &f, "--verify-certificate", "--stats-out", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("s YES\n"));
    assert_eq!(out.lines().filter(|l| l.starts_with("v ")).count(), 18);
    assert!(String::from_utf8_lossy(&o.stderr).contains("certificate verified"));

    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["answer"], "YES");
    assert!(json.get("timings").is_none());
    let rules = json["stats"]["rules"].as_object().unwrap();
    let explored: u64 = rules.values().map(|r| r["children_explored"].as_u64().unwrap()).sum();
    assert_eq!(json["stats"]["total_instances"].as_u64().unwrap(), explored + 1);

    let cert = put(dir.path(), "c.txt", &out);
    assert_eq!(code(&l3c(&["verify", &f, &cert])), 0);
    let bad = put(dir.path(), "bad.txt", &out.replacen("v 1 1", "v 1 9", 1));
    assert_ne!(code(&l3c(&["verify", &f, &bad])), 0);
}

#[test]
fn strict_policy_reports_diameter() {
    let dir = tempfile::tempdir().unwrap();
    let f = put(dir.path(), "p6.l3c", "p l3c 6 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 6\n");
    let o = l3c(&["solve", &f]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("diameter is 5"));
    assert_eq!(code(&l3c(&["solve", &f, "--diameter-policy", "fallback"])), 0);
}

#[test]
fn usage_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let f = put(dir.path(), "bad.l3c", "p l3c 2 1\ne 1 3\n");
    let o = l3c(&["solve", &f]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(code(&l3c(&["solve", "--frobnicate", &f])), 2);
    assert_eq!(code(&l3c(&["explode"])), 2);
    assert_eq!(code(&l3c(&["solve", "/nonexistent/file.l3c"])), 2);
}

#[test]
fn oracle_budget_is_indeterminate() {
    let dir = tempfile::tempdir().unwrap();
    let gen = l3c(&["gen", "--family", "random-diam3", "--n", "30", "--seed", "2"]);
    let f = put(dir.path(), "r.l3c", &stdout(&gen));
    assert_eq!(code(&l3c(&["oracle", &f, "--budget", "3"])), 3);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let gen = l3c(&["gen", "--family", "random-diam3", "--n", "16", "--seed", "9", "--p2", "0.3", "--p3", "0.7"]);
    let f = put(dir.path(), "i.l3c", &stdout(&gen));
    let run = |name: &str| {
        let p = dir.path().join(name);
        l3c(&["solve", &f, "--seed", "5", "--stats-out", p.to_str().unwrap()]);
        fs::read(p).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn gen_writes_corpora() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("corpus");
    let o = l3c(&["gen", "--family", "gadget-b1", "--n", "20", "--count", "3", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_dir(&out).unwrap().count(), 3);
    assert_eq!(code(&l3c(&["gen", "--family", "planted", "--n", "3"])), 2);
}

#[test]
fn lab_and_bench_run() {
    let o = l3c(&["lemma-lab", "--mu", "40", "--trials", "50"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["structural_violations"], 0);
    let o = l3c(&["bench", "--sizes", "12,16", "--per-size", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 3);
}
