use std::process::{Command, Output};

fn xtcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xtcs")).args(args).env_remove("XTCS_CATALOG").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn config_dir() -> String {
    format!("{}/configs", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn catalog_show_and_lookup_failure() {
    let o = xtcs(&["catalog", "show", "3.22_3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for line in ["N           (6)", "c2bar       30", "b3          48", "b3plus      18"] {
        assert!(s.contains(line), "{s}");
    }
    let o = xtcs(&["catalog", "show", "nosuch"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("unknown block id"));
}

#[test]
fn catalog_validate_and_list() {
    let o = xtcs(&["catalog", "validate"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(" 0 mismatches"));
    let o = xtcs(&["catalog", "list", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 66);
}

#[test]
fn missing_catalog_is_an_io_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_xtcs"))
        .args(["catalog", "list"])
        .env("XTCS_CATALOG", "/nonexistent/catalog.toml")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn catalog_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("small.toml");
    let small = xtcs::catalog::Catalog::shipped().restrict(&["3.21", "3.8_1_18"]);
    std::fs::write(&path, small.to_toml()).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_xtcs")).args(["catalog", "list"]).env("XTCS_CATALOG", &path).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn match_rank1_pair() {
    let o = xtcs(&["match", "--plus", "3.21", "--minus", "3.8_1_18", "--theta", "1/4pi", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let m = &v["matches"];
    assert_eq!(m.as_array().unwrap().len(), 1);
    assert_eq!((m[0]["b3"].as_i64(), m[0]["d_free"].as_i64(), m[0]["nu_bar"].as_i64()), (Some(64), Some(24), Some(-39)));
    assert_eq!(m[0]["torsion"], serde_json::json!(["2"]));
}

#[test]
fn match_two_ordinary_blocks_is_rejected() {
    let o = xtcs(&["match", "--plus", "3.8_1_2", "--minus", "3.8_1_4", "--theta", "1/4pi"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("involution block"));
}

#[test]
fn match_pure_cross_terms() {
    let o = xtcs(&["match", "--plus", "3.28", "--minus", "3.28", "--theta", "1/6pi", "--pure", "--bound", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ds: std::collections::BTreeSet<i64> =
        v["matches"].as_array().unwrap().iter().map(|m| m["d_free"].as_i64().unwrap()).collect();
    assert_eq!(ds.into_iter().collect::<Vec<_>>(), vec![2, 8]);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["match", "--plus", "3.22_4", "--minus", "3.8_1_16", "--theta", "1/4pi", "--format", "json"];
    assert_eq!(xtcs(&args).stdout, xtcs(&args).stdout);
}

#[test]
fn invariants_from_config_files() {
    let o = xtcs(&["invariants", "--config", &format!("{}/3.22_1_3.9_10.toml", config_dir()), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["b3"].as_i64(), v["d_free"].as_i64(), v["nu_bar"].as_i64()), (Some(91), Some(4), Some(-36)));
    assert_eq!(v["torsion"], serde_json::json!([]));

    let o = xtcs(&["invariants", "--config", &format!("{}/3.23_8_3.11.toml", config_dir()), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["b2"].as_i64(), v["b3"].as_i64(), v["nu_bar"].as_i64()), (Some(1), Some(49), Some(-39)));
}

#[test]
fn invariants_rejects_bad_signature() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "plus = \"3.21\"\nminus = \"3.8_1_18\"\ntheta = \"1/4pi\"\n[pushout]\ngram = [[4, 10], [10, 18]]\n").unwrap();
    let o = xtcs(&["invariants", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("signature must be (2, rk-2)"), "{}", stderr(&o));
}

#[test]
fn invariants_lookup_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("unknown.toml");
    std::fs::write(&path, "plus = \"9.99\"\nminus = \"3.8_1_18\"\ntheta = \"1/4pi\"\n[pushout]\ngram = [[2]]\n").unwrap();
    assert_eq!(xtcs(&["invariants", "--config", path.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(xtcs(&["invariants", "--config", "/nonexistent.toml"]).status.code(), Some(2));
}

#[test]
fn theta_must_be_a_rational_multiple_of_pi() {
    let o = xtcs(&["match", "--plus", "3.21", "--minus", "3.8_1_18", "--theta", "0.785"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn reproduce_reports_row_diffs() {
    let o = xtcs(&["reproduce", "table4"]);
    let s = stdout(&o);
    assert!(s.contains("rows match"));
    let ok = s.contains("25/25 rows match");
    assert_eq!(o.status.code(), Some(if ok { 0 } else { 1 }));
    if !ok {
        assert!(s.contains("MISMATCH"));
    }
}
