use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hrsft::matrices::families::{golden_mean, golden_tensor};
use hrsft::{MatrixFamily, Word};
use serde_json::Value;
use tempfile::TempDir;

fn hrsft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hrsft")).args(args).output().expect("binary runs")
}

fn write_family(dir: &Path, name: &str, fam: &MatrixFamily) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, fam.to_json()).unwrap();
    path
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

struct Fixture {
    dir: TempDir,
    g1: PathBuf,
    g3: PathBuf,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let g1 = write_family(dir.path(), "g1.json", &golden_mean());
    let g3 = write_family(dir.path(), "g3.json", &golden_tensor());
    Fixture { dir, g1, g3 }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_reports_valid_family() {
    let fx = fixture();
    let out = hrsft(&["validate", "-f", s(&fx.g1)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["status"], "valid");
    assert_eq!(v["config"]["command"], "validate");
}

#[test]
fn validate_reports_violation_codes_with_exit_one() {
    let fx = fixture();
    let path = fx.dir.path().join("bad.json");
    std::fs::write(&path, r#"{"rank":2,"alphabet":["a","b"],"matrices":[[[1,1],[0,1]],[[1,0],[1,1]]]}"#).unwrap();
    let out = hrsft(&["validate", "-f", s(&path)]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["status"], "invalid");
    let codes: Vec<&str> = v["violations"].as_array().unwrap().iter().map(|x| x["code"].as_str().unwrap()).collect();
    assert!(!codes.is_empty());
    assert!(codes.iter().all(|&c| c == "UniqueFactorizationViolation"));
}

#[test]
fn entropy_both_modes_agree() {
    let fx = fixture();
    let out = hrsft(&["entropy", "-f", s(&fx.g1), "--p", "1", "--mode", "both", "--k", "1", "--n-max", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let est = v["estimate"].as_f64().unwrap();
    let exact = v["exact"].as_f64().unwrap();
    assert!((est - exact).abs() <= 1e-6);
    assert!(v["abs_error"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["sequence"].as_array().unwrap().len(), 40);
    assert_eq!(v["diffs"].as_array().unwrap().len(), 39);
}

#[test]
fn log_base_only_rescales_display() {
    let fx = fixture();
    let nats = json_of(&hrsft(&["entropy", "-f", s(&fx.g1), "--p", "1", "--mode", "exact"]));
    let bits = json_of(&hrsft(&["entropy", "-f", s(&fx.g1), "--p", "1", "--mode", "exact", "--log-base", "2"]));
    let (a, b) = (nats["exact"].as_f64().unwrap(), bits["exact"].as_f64().unwrap());
    assert!((a / std::f64::consts::LN_2 - b).abs() < 1e-10);
}

#[test]
fn search_gap_csv_is_deterministic() {
    let fx = fixture();
    let a = fx.dir.path().join("a.csv");
    let b = fx.dir.path().join("b.csv");
    let run = |out: &Path, threads: &str| {
        let o = hrsft(&[
            "search-gap",
            "-f",
            "/dev/null",
            "--exhaustive",
            "--size",
            "2",
            "--format",
            "csv",
            "--threads",
            threads,
            "--out",
            s(out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    };
    run(&a, "1");
    run(&b, "4");
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("fingerprint,size,matrices,r1,r2,r_prod,gap\n"));
    for line in text.lines().skip(1) {
        let gap: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(gap >= -1e-9);
    }
}

#[test]
fn random_search_repeats_with_seed() {
    let args = ["search-gap", "--size", "3", "--density", "0.4", "--trials", "300", "--seed", "11", "--controls", "2"];
    let a = hrsft(&args);
    let b = hrsft(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert!(v["records"].as_array().unwrap().iter().all(|r| r.get("runtime_ns").is_none()));
}

#[test]
fn embedded_argv_reproduces_output() {
    let fx = fixture();
    let first = hrsft(&["pressure", "-f", s(&fx.g1), "--p", "1", "--k", "1", "--g", "0,0.5", "--oracle"]);
    assert_eq!(first.status.code(), Some(0));
    let v = json_of(&first);
    let argv: Vec<String> = v["config"]["argv"].as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect();
    let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
    let second = hrsft(&argv);
    assert_eq!(first.stdout, second.stdout);
    assert!(v["abs_error"].as_f64().unwrap() <= 1e-5);
}

#[test]
fn domain_errors_exit_one_with_code() {
    let fx = fixture();
    let out = hrsft(&["entropy", "-f", s(&fx.g1), "--p", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["error"]["code"], "ZeroDirection");

    let out = hrsft(&["action-entropy", "-f", s(&fx.g1)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["error"]["code"], "RankOne");

    let out = hrsft(&["validate", "-f", s(&fx.dir.path().join("missing.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["error"]["code"], "Io");
}

#[test]
fn usage_errors_exit_two() {
    let fx = fixture();
    assert_eq!(hrsft(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(hrsft(&["entropy", "-f", s(&fx.g1)]).status.code(), Some(2));
    assert_eq!(hrsft(&["entropy", "-f", s(&fx.g1), "--p", "1,1"]).status.code(), Some(2));
    assert_eq!(hrsft(&["entropy", "-f", s(&fx.g1), "--p", "1", "--log-base", "3"]).status.code(), Some(2));
    assert_eq!(hrsft(&["words", "-f", s(&fx.g1), "--shape", "2", "--origin", "z"]).status.code(), Some(2));
    assert_eq!(hrsft(&["--help"]).status.code(), Some(0));
}

#[test]
fn words_round_trip_through_json() {
    let fx = fixture();
    let out = hrsft(&["words", "-f", s(&fx.g3), "--shape", "1,2", "--limit", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["emitted"], 5);
    let fam = golden_tensor();
    for w in v["words"].as_array().unwrap() {
        let word = Word::from_json(&fam, &w.to_string()).unwrap();
        assert_eq!(word.to_json(), w.to_string());
    }
}

#[test]
fn csv_outputs_have_headers() {
    let fx = fixture();
    let out = hrsft(&["count-check", "-f", s(&fx.g3), "--max-shape", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("shape,enumerated,formula,equal\n"));
    assert_eq!(text.lines().count(), 1 + 9);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));

    let out = hrsft(&["action-entropy", "-f", s(&fx.g3), "--n", "10,100", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let vals: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(vals[1] <= 0.01 && vals[1] < vals[0]);
}

#[test]
fn lemma_check_passes_on_tensor_family() {
    let fx = fixture();
    let out = hrsft(&["lemma-check", "-f", s(&fx.g3), "--p", "1,1", "--max-shape", "1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["failures"], 0);
}
