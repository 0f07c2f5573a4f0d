use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-modelset"))
        .args(args)
        .current_dir(dir)
        .env_remove("PADIC_MODELSET_THREADS")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn seqgen_reproduces_right_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["seqgen", "--system", "limitperiodic3", "--lo", "-26", "--hi", "19", "--json"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["schema"], "padic-modelset/1");
    let e: Vec<i64> = serde_json::from_value(v["endpoints"].clone()).unwrap();
    assert_eq!(e, [-26, -24, -23, -21, -18, -17, -15, -12, -9, -8, -6, -3, 0, 1, 3, 4, 6, 9, 10, 12, 13, 15, 18, 19]);
    assert_eq!(v["notes"].as_array().unwrap().len(), 1);
}

#[test]
fn seqgen_custom_rules() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("pd.txt"), "a -> ba\nb -> aa\n").unwrap();
    let out = run(
        dir.path(),
        &["seqgen", "--system", "custom", "--rules", "pd.txt", "--seed", "a|a", "--lo", "0", "--hi", "4"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    let missing_seed = run(dir.path(), &["seqgen", "--system", "custom", "--rules", "pd.txt"]);
    assert_eq!(missing_seed.status.code(), Some(1));
}

#[test]
fn verify_limitperiodic_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify", "--system", "limitperiodic3", "--K", "6", "--R", "100", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["ok"], true);
    assert_eq!(v["mismatches"], 0);
    assert!(!dir.path().join("verify-diff.json").exists());
}

#[test]
fn verify_failure_writes_diff() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["limitperiodic", "verify", "--K", "3", "--R", "60", "--diff", "d.json"]);
    assert_eq!(out.status.code(), Some(3));
    let diff: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("d.json")).unwrap()).unwrap();
    assert_eq!(diff["ok"], false);
    assert!(diff["mismatches"].as_u64().unwrap() > 0);
}

#[test]
fn dekking_controls() {
    let dir = tempfile::tempdir().unwrap();
    for (sys, extra, expect) in
        [("limitperiodic3", Some("--dekking"), true), ("perioddoubling", None, true), ("thuemorse", None, false)]
    {
        let mut args = vec!["verify", "--system", sys, "--json"];
        args.extend(extra);
        let out = run(dir.path(), &args);
        assert!(out.status.success());
        let v = json_of(&out);
        assert_eq!(v["coincidence"].is_object(), expect, "{sys}");
    }
}

#[test]
fn negative_level_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["chair", "gen", "--levels", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn chair_gen_artifacts_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["chair", "gen", "--levels", "3", "--svg", "out.svg", "--json", "points.json"];
    assert!(run(dir.path(), &args).status.success());
    let svg1 = std::fs::read(dir.path().join("out.svg")).unwrap();
    let json1 = std::fs::read(dir.path().join("points.json")).unwrap();
    assert!(run(dir.path(), &args).status.success());
    assert_eq!(svg1, std::fs::read(dir.path().join("out.svg")).unwrap());
    assert_eq!(json1, std::fs::read(dir.path().join("points.json")).unwrap());
    let v: Value = serde_json::from_slice(&json1).unwrap();
    assert_eq!(v["level"], 3);
    let total: usize = (0..4).map(|k| v["sets"][k.to_string()].as_array().unwrap().len()).sum();
    assert_eq!(total, 64);
    let svg = String::from_utf8(svg1).unwrap();
    assert!(svg.contains("#1b9e77") && svg.contains("#e7298a"));
}

#[test]
fn diffract_csv_and_thue_morse_warning() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "diffract",
            "--system",
            "limitperiodic3",
            "--r",
            "729",
            "--nmax",
            "2",
            "--kmax",
            "1",
            "--weights",
            "1,1,1",
            "--strongest",
            "3",
            "--csv",
            "s.csv",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("m,n,k,analytic_re,analytic_im_abs2,numeric_abs2,rel_err"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&first[..3], ["0", "2", "0"]);
    assert_eq!(first[4], "2.5000000000000000e-1");

    let out = run(
        dir.path(),
        &["diffract", "--system", "thuemorse", "--r", "256", "--nmax", "2", "--kmax", "1", "--weights", "1,-1"],
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("negative control"));

    let bad = run(dir.path(), &["diffract", "--system", "limitperiodic3", "--weights", "1,1"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn windows_and_modelset_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["windows", "--system", "limitperiodic3", "--K", "3", "--json"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["windows"]["a"]["measure"], "4/27");
    let out =
        run(dir.path(), &["modelset", "--system", "limitperiodic3", "--K", "6", "--lo", "0", "--hi", "19", "--json"]);
    assert!(out.status.success());
    let v = json_of(&out);
    let xs: Vec<String> =
        v["points"].as_array().unwrap().iter().map(|p| p["x"].as_str().unwrap().to_string()).collect();
    assert_eq!(xs, ["0", "1", "3", "4", "6", "9", "10", "12", "13", "15", "18", "19"]);
}

#[test]
fn threads_flag_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(dir.path(), &["--threads", "1", "seqgen", "--json"]);
    let b = Command::new(env!("CARGO_BIN_EXE_padic-modelset"))
        .args(["seqgen", "--json"])
        .current_dir(dir.path())
        .env("PADIC_MODELSET_THREADS", "2")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let zero = run(dir.path(), &["--threads", "0", "seqgen"]);
    assert_eq!(zero.status.code(), Some(2));
}
