use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_covering-sieve"));
    cmd.args(args).env_remove("COVERING_SIEVE_CACHE");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{}: {}\nstderr: {}", e, String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const COVER: &str = r#"[{"residue":0,"modulus":2},{"residue":0,"modulus":3},{"residue":1,"modulus":4},
{"residue":5,"modulus":6},{"residue":7,"modulus":12}]"#;

#[test]
fn classic_cover_has_zero_density() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "cover.json", COVER);
    let out = bin(&["simulate", "--file", &file], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["exact_density"], "0/1");
    assert_eq!(v["result"]["q"], 12);
    assert_eq!(v["command"], "simulate");
    assert!(v["version"].is_string() && v["inflation"].is_number());
    let out = bin(&["verify", "--file", &file, "--delta", "0,1/4"], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["all_passed"], true);
}

#[test]
fn invalid_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let dup = write(dir.path(), "dup.json", r#"[{"residue":0,"modulus":4},{"residue":1,"modulus":4}]"#);
    let big = write(dir.path(), "big.json", r#"[{"residue":5,"modulus":4}]"#);
    let zero = write(dir.path(), "zero.json", r#"[{"residue":0,"modulus":0}]"#);
    let bad = write(dir.path(), "bad.json", r#"[{"residue":0}]"#);
    for file in [&dup, &big, &zero, &bad] {
        assert_eq!(bin(&["simulate", "--file", file], &[]).status.code(), Some(2), "{}", file);
    }
    let cover = write(dir.path(), "cover.json", COVER);
    assert_eq!(bin(&["simulate", "--file", &cover, "--delta", "1/4"], &[]).status.code(), Some(2));
    assert_eq!(bin(&["simulate", "--file", &cover, "--delta", "3/4,0"], &[]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"], &[]).status.code(), Some(2));
    assert_eq!(bin(&["antichains", "--lemma", "seven-smooth"], &[]).status.code(), Some(2));
    assert_eq!(bin(&["construct", "--mode", "tree", "--t", "2"], &[]).status.code(), Some(2));
    assert_eq!(bin(&["simulate", "--file", &cover, "--inflation", "0.5"], &[]).status.code(), Some(2));
    assert_eq!(bin(&["--help"], &[]).status.code(), Some(0));
}

#[test]
fn resource_caps_exit_three() {
    let out = bin(&["construct", "--mode", "block"], &[]);
    assert_eq!(out.status.code(), Some(3));
    let out = bin(&["eg-sum", "--n", "1000", "--cap", "100"], &[]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn construct_output_feeds_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = dir.path().join("list.json");
    let report = dir.path().join("report.json");
    let out = bin(
        &[
            "construct", "--mode", "block", "--M", "2", "--eps", "0.9", "--delta", "0.5", "--blocks", "2",
            "--emit", emitted.to_str().unwrap(), "--output", report.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let stats = &v["result"]["stats"];
    assert_eq!(stats["density"], "8/33");
    assert_eq!(stats["sieve_cross_check"], true);
    // both the full report and the bare list are valid instance files
    for file in [&report, &emitted] {
        let sim = bin(&["simulate", "--file", file.to_str().unwrap()], &[]);
        assert_eq!(sim.status.code(), Some(0));
        assert_eq!(json(&sim)["result"]["exact_density"], "8/33");
    }
}

#[test]
fn config_file_is_overridden_by_flags_and_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "run.conf", "# desk settings\nlemma = no-prime-powers\nexp-cap = 3\nsize-cap = 3\n");
    let out = bin(&["antichains", "--config", &config, "--size-cap", "4"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["config"]["lemma"], "no-prime-powers");
    assert_eq!(v["config"]["exp-cap"], "3");
    assert_eq!(v["config"]["size-cap"], "4");
    assert_eq!(v["result"]["size_cap"], 4);
    assert_eq!(v["result"]["max"], "1/3");
    let broken = write(dir.path(), "broken.conf", "lemma\n");
    assert_eq!(bin(&["antichains", "--config", &broken], &[]).status.code(), Some(2));
}

#[test]
fn gk_csv_uses_and_fills_the_prime_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("primes.bin");
    let out = bin(&["gk", "--k", "2,3"], &[("COVERING_SIEVE_CACHE", &cache)]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,p_k,g_k"));
    assert!(lines.next().unwrap().starts_with("2,3,1.2609"));
    assert!(lines.next().unwrap().starts_with("3,5,3.0078"));
    let meta: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(meta["command"], "gk");
    assert!(cache.metadata().unwrap().len() > 16);
    // a second run reads the cache and agrees
    let again = bin(&["gk", "--k", "2,3", "--prime-cache", cache.to_str().unwrap()], &[]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}

#[test]
fn minmod_quick_mode_reports_failure_with_steps() {
    let dir = tempfile::tempdir().unwrap();
    let steps = dir.path().join("steps.csv");
    let out = bin(&["minmod", "--steps-csv", steps.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["result"]["outcome"]["failed_at"], 44);
    assert_eq!(v["passed"], false);
    let csv = std::fs::read_to_string(&steps).unwrap();
    assert!(csv.starts_with("i,p_i,delta_i,mhat2,muhat,f_i\n26,101,"));
    assert_eq!(csv.lines().count(), 19);
}

#[test]
fn certificates_and_interval_sums_pass() {
    let out = bin(&["certificates", "--g2", "1.2609", "--g3", "3.0078"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let names: Vec<&str> = v["result"]["certificates"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["hough-nielsen", "2-9-15", "schinzel"]);
    // a threshold below f_3 = 3 makes 2-9-15 fail
    let out = bin(&["certificates", "--g2", "1.2609", "--g3", "2.9"], &[]);
    assert_eq!(out.status.code(), Some(1));

    let out = bin(&["eg-sum", "--n", "1,10,100"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let out = bin(&["eg-sum", "--n", "1,10,100", "--bound", "2"], &[]);
    assert_eq!(out.status.code(), Some(1));
}
