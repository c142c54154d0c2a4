use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn ssbkit(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssbkit"))
        .args(args)
        .env("SSBKIT_OUT", root)
        .output()
        .expect("spawn ssbkit")
}

fn stderr_line(out: &Output) -> String {
    let text = String::from_utf8_lossy(&out.stderr).into_owned();
    assert_eq!(text.lines().count(), 1, "stderr not one line: {text}");
    text.trim_end().to_string()
}

fn sha(path: &Path) -> String {
    hex::encode(Sha256::digest(fs::read(path).unwrap()))
}

#[test]
fn help_lists_every_flag() {
    let dir = tempfile::tempdir().unwrap();
    let flags: [(&str, &[&str]); 6] = [
        ("ddl", &["--variant", "--keys", "--types"]),
        ("gen", &["--sf", "--seed", "--out", "--tables", "--benchmark"]),
        ("queries", &["--flight", "--seed", "--default-params", "--reference", "--emit"]),
        (
            "run",
            &[
                "--engine", "--engine-spec", "--config", "--sf", "--seed", "--reps", "--discard", "--order",
                "--flush-caches", "--default-params", "--benchmark", "--data", "--out",
            ],
        ),
        ("compress", &["--data", "--columns", "--sort-keys", "--out"]),
        ("report", &["--runs", "--compression", "--out"]),
    ];
    for (cmd, want) in flags {
        let out = ssbkit(dir.path(), &[cmd, "--help"]);
        assert!(out.status.success());
        let help = String::from_utf8(out.stdout).unwrap();
        for f in want.iter().chain(&["--out-root"]) {
            assert!(help.contains(f), "{cmd} --help lacks {f}");
        }
        assert!(help.contains("SSBKIT_OUT"), "{cmd} --help lacks the env var");
    }
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = ssbkit(dir.path(), &["gen", "--sf", "0.01", "--seed", "1", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).starts_with("error: usage: "));
    let out = ssbkit(dir.path(), &["gen", "--sf", "zero", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ssbkit(dir.path(), &["ddl", "--types", "oracle"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_line(&out), "error: usage: unknown type map oracle");
}

#[test]
fn run_without_gen_names_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = ssbkit(dir.path(), &["run", "--sf", "0.01", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let line = stderr_line(&out);
    assert!(line.starts_with("error: missing_files: "), "{line}");
    for f in ["manifest.json", "lineorder.tbl", "dim_date.tbl", "tpch/lineitem.tbl"] {
        assert!(line.contains(f), "{line} lacks {f}");
    }
    assert!(line.contains(&dir.path().join("data").join("sf0.01-seed5").display().to_string()));
}

#[test]
fn gen_is_deterministic_and_uses_the_env_root() {
    let dir = tempfile::tempdir().unwrap();
    let other = dir.path().join("again");
    let a = ssbkit(dir.path(), &["gen", "--sf", "0.001", "--seed", "42", "--benchmark", "ssb"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let default_dir = dir.path().join("data").join("sf0.001-seed42");
    let b = ssbkit(dir.path(), &["gen", "--sf", "1/1000", "--seed", "42", "--benchmark", "ssb", "--out", other.to_str().unwrap()]);
    assert!(b.status.success());
    for f in ["manifest.json", "lineorder.tbl", "customer.tbl", "supplier.tbl", "part.tbl", "dim_date.tbl"] {
        assert_eq!(sha(&default_dir.join(f)), sha(&other.join(f)), "{f}");
    }
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(default_dir.join("manifest.json")).unwrap()).unwrap();
    for t in manifest["tables"].as_array().unwrap() {
        let file = default_dir.join(t["file"].as_str().unwrap());
        assert_eq!(t["sha256"].as_str().unwrap(), sha(&file));
    }
    let c = ssbkit(dir.path(), &["gen", "--sf", "0.001", "--seed", "43", "--benchmark", "ssb", "--out", other.to_str().unwrap()]);
    assert!(c.status.success());
    assert_ne!(sha(&default_dir.join("lineorder.tbl")), sha(&other.join("lineorder.tbl")));
}

#[test]
fn gen_table_subset_and_unknown_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d");
    let o = ssbkit(dir.path(), &["gen", "--sf", "0.001", "--seed", "1", "--tables", "supplier,dim_date", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let mut names: Vec<String> = fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["dim_date.tbl", "manifest.json", "supplier.tbl", "tpch"]);
    assert!(out.join("tpch/supplier.tbl").is_file());
    let bad = ssbkit(dir.path(), &["gen", "--sf", "0.001", "--seed", "1", "--tables", "partsupp", "--benchmark", "ssb"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(stderr_line(&bad), "error: usage: unknown table partsupp");
}

#[test]
fn queries_emit_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = ssbkit(dir.path(), &["queries", "--flight", "2", "--seed", "9", "--reference", "--emit", d.to_str().unwrap()]);
        assert!(o.status.success());
    }
    for f in ["Q2.1.sql", "Q2.2.sql", "Q2.3.sql", "Q2.sql", "instances.json"] {
        assert_eq!(sha(&a.join(f)), sha(&b.join(f)), "{f}");
    }
    let sql = fs::read_to_string(a.join("Q2.1.sql")).unwrap();
    assert!(!sql.contains(':'), "{sql}");
    let inst: serde_json::Value = serde_json::from_slice(&fs::read(a.join("instances.json")).unwrap()).unwrap();
    assert_eq!(inst.as_array().unwrap().len(), 4);
    let o = ssbkit(dir.path(), &["queries", "--flight", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_line(&o), "error: usage: no flight 7");
}

#[test]
fn run_rejects_data_from_another_seed() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d");
    assert!(ssbkit(dir.path(), &["gen", "--sf", "0.001", "--seed", "1", "--out", data.to_str().unwrap()]).status.success());
    let o = ssbkit(dir.path(), &["run", "--sf", "0.001", "--seed", "2", "--data", data.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr_line(&o).starts_with("error: mismatch: "));
    let o = ssbkit(dir.path(), &["run", "--sf", "0.001", "--seed", "1", "--config", "tuned", "--data", data.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_line(&o), "error: usage: unknown config tuned");
    let o = ssbkit(dir.path(), &["run", "--sf", "0.001", "--seed", "1", "--engine", "pg", "--data", data.to_str().unwrap()]);
    assert_eq!(stderr_line(&o), "error: usage: engine pg needs --engine-spec");
}

#[test]
fn run_compress_report_round() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    assert!(ssbkit(root, &["gen", "--sf", "0.001", "--seed", "3"]).status.success());
    let o = ssbkit(root, &["run", "--sf", "0.001", "--seed", "3", "--reps", "2", "--order", "seeded_shuffle"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let run = root.join("runs").join("sqlite-out_of_box-sf0.001-seed3");
    let records = fs::read_to_string(run.join("ssb/records.jsonl")).unwrap();
    assert_eq!(records.lines().count(), 26);
    let tpch = fs::read_to_string(run.join("tpch/records.jsonl")).unwrap();
    assert_eq!(tpch.lines().count(), 8);
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(run.join("ssb/run_manifest.json")).unwrap()).unwrap();
    let data_manifest = root.join("data/sf0.001-seed3/manifest.json");
    assert_eq!(manifest["data"]["manifest_sha256"].as_str().unwrap(), sha(&data_manifest));
    assert_eq!(manifest["plan"]["repetitions"], 2);
    assert_eq!(manifest["plan"]["policy"], "seeded_shuffle");

    let data = root.join("data/sf0.001-seed3");
    let o = ssbkit(root, &["compress", "--data", data.to_str().unwrap(), "--columns", "LO_DISCOUNT", "--sort-keys", "LO_ORDERDATE"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(root.join("compression.csv")).unwrap();
    assert!(csv.starts_with("column,codec,sorted,ratio,encode_ms,agg_ms\n"));
    let o = ssbkit(root, &["compress", "--data", root.to_str().unwrap()]);
    assert!(stderr_line(&o).starts_with("error: missing_files: "));
    let o = ssbkit(root, &["compress", "--data", data.to_str().unwrap(), "--columns", "LO_NOPE"]);
    assert_eq!(stderr_line(&o), "error: usage: unknown column LO_NOPE");

    let before = sha(&run.join("ssb/records.jsonl"));
    let o = ssbkit(root, &["report", "--compression", root.join("compression.csv").to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(before, sha(&run.join("ssb/records.jsonl")));
    let paired = fs::read_to_string(root.join("report/paired_out_of_box.csv")).unwrap();
    assert_eq!(paired.lines().count(), 11);
    assert!(root.join("report/fig1.csv").is_file());
    assert!(!root.join("report/paired_indexed.csv").exists());

    let empty = root.join("nothing");
    fs::create_dir(&empty).unwrap();
    let o = ssbkit(root, &["report", "--runs", empty.to_str().unwrap()]);
    assert!(stderr_line(&o).starts_with("error: missing_files: no run_manifest.json under "));
}
