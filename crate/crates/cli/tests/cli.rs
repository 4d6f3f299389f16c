use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn confuse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confuse"))
        .args(args)
        .env_remove("CONFUSE_MAX_CARRIER")
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = confuse(&full);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn rate(v: &Value) -> &str {
    v["exact"].as_str().unwrap()
}

#[test]
fn catalogs_match_the_bundled_reference() {
    for kind in ["field", "ring"] {
        let (code, v) = json(&["catalog", kind, "--reference"]);
        assert_eq!(code, 0);
        assert!(v["reference_diff"]["missing"]
            .as_array()
            .unwrap()
            .is_empty());
    }
    let (code, v) = json(&["catalog", "field", "--max", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["entries"].as_array().unwrap().len(), 1);
}

#[test]
fn tampered_reference_fails_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/data/reference/fields.json"
    ))
    .unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["rows"].as_array_mut().unwrap().remove(0);
    let path = write(dir.path(), "ref.json", &v.to_string());
    let (code, out) = json(&["catalog", "field", "--reference", &path]);
    assert_eq!(code, 2);
    assert!(!out["reference_diff"]["extra"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn solve_equal3() {
    let (code, v) = json(&["solve", "--table", "@equal3"]);
    assert_eq!(code, 0);
    let report = &v["verification"];
    assert_eq!(rate(&report["rate1"]), "log2 3");
    assert_eq!(rate(&report["rate2"]), "log2 3");
    assert_eq!(report["correct"]["pass"], true);
    assert_eq!(report["secure"]["pass"], true);
    assert_eq!(v["converse"]["optimal"], true);
}

#[test]
fn pinned_maps_with_optimized_mask() {
    let (code, v) = json(&[
        "solve",
        "--table",
        "@z4_example",
        "--map1",
        "1,0",
        "--map2",
        "0,2",
        "--optimize-z",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["z_support"], serde_json::json!([0, 2]));
    assert_eq!(rate(&v["verification"]["rate1"]), "2");
    assert_eq!(rate(&v["verification"]["rate2"]), "1");
}

#[test]
fn pinned_maps_that_are_not_an_expansion() {
    let out = confuse(&[
        "solve",
        "--table",
        "@z4_example",
        "--map1",
        "0,1",
        "--map2",
        "0,1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn constant_table_gets_a_trivial_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(
        dir.path(),
        "one.json",
        r#"{"m1": 1, "m2": 1, "outputs": [[0]]}"#,
    );
    let (code, v) = json(&["solve", "--table", &t]);
    assert_eq!(code, 0);
    assert_eq!(v["expansion"]["map1"], serde_json::json!([0]));
    assert_eq!(v["expansion"]["structure"]["carrier"]["p"], 2);
}

#[test]
fn emitted_schemes_verify() {
    let dir = tempfile::tempdir().unwrap();
    let solved = dir.path().join("solved.json");
    let out = confuse(&["--json", "solve", "--table", "@and"]);
    std::fs::write(&solved, &out.stdout).unwrap();
    let solved = solved.to_str().unwrap();
    let (code, v) = json(&["verify", "--scheme", solved, "--table", solved]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(rate(&v["report"]["rate1"]), "log2 3");

    let emitted = dir.path().join("baseline.json");
    let emitted = emitted.to_str().unwrap();
    let (code, _) = json(&[
        "baseline",
        "--table",
        "@threshold_2x3",
        "--emit-scheme",
        emitted,
    ]);
    assert_eq!(code, 0);
    let (code, v) = json(&["verify", "--scheme", emitted, "--table", "@threshold_2x3"]);
    assert_eq!(code, 0);
    assert_eq!(rate(&v["report"]["rate1"]), "2");
    assert_eq!(rate(&v["report"]["rate2"]), "2");

    let (code, v) = json(&[
        "verify",
        "--scheme",
        "@reveal_key",
        "--table",
        "@reveal_key",
    ]);
    assert_eq!(code, 0);
    assert_eq!(rate(&v["report"]["rate2"]), "log2 3");
    assert_eq!(v["manifest"]["inputs"].as_object().unwrap().len(), 2);
}

#[test]
fn corrupted_scheme_reports_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let path = path.to_str().unwrap();
    assert_eq!(
        json(&["solve", "--table", "@equal3", "--emit-scheme", path]).0,
        0
    );
    let mut s: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let first = s["dec"].as_array_mut().unwrap()[0].as_array_mut().unwrap();
    let last = first.len() - 1;
    let out = first[last].as_u64().unwrap();
    first[last] = Value::from(1 - out);
    std::fs::write(path, s.to_string()).unwrap();
    let (code, v) = json(&["verify", "--scheme", path, "--table", "@equal3"]);
    assert_eq!(code, 2);
    assert!(v["report"]["correct"]["witness"].is_object());
}

#[test]
fn runs_are_reproducible_up_to_the_timestamp() {
    let args = [
        "blockcode",
        "--table",
        "@and",
        "--L",
        "16",
        "--trials",
        "30",
        "--seed",
        "5",
    ];
    let strip = |mut v: Value| {
        v["manifest"].as_object_mut().unwrap().remove("timestamp");
        v
    };
    let (a, b) = (strip(json(&args).1), strip(json(&args).1));
    assert_eq!(a, b);
    assert_eq!(a["manifest"]["seed"], 5);
    for key in [
        "carrier",
        "rate_bits_per_input",
        "empirical_error",
        "H_bits",
        "H_qary",
        "dist_u",
        "code",
    ] {
        assert!(a.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn blockcode_security_at_short_length() {
    let (code, v) = json(&[
        "blockcode",
        "--table",
        "@and",
        "--L",
        "2",
        "--rows",
        "1",
        "--security-l",
        "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["security"]["pass"], true);
}

#[test]
fn crt_equal_six() {
    let (code, v) = json(&["crt-equal", "--m", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["permutations"], 720);
    assert_eq!(v["correct"]["pass"], true);
    assert_eq!(v["secure"]["pass"], true);
    assert_eq!(v["difference_support"], 5);
    assert_eq!(v["difference_uniform"], true);
}

#[test]
fn error_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(
        confuse(&["solve", "--table", missing.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        confuse(&["solve", "--table", "@no_such_table"])
            .status
            .code(),
        Some(3)
    );
    let bad = write(dir.path(), "bad.json", "{not json");
    assert_eq!(confuse(&["solve", "--table", &bad]).status.code(), Some(4));
    let ragged = write(
        dir.path(),
        "ragged.json",
        r#"{"m1": 2, "m2": 2, "outputs": [[0, 1], [1]]}"#,
    );
    assert_eq!(
        confuse(&["solve", "--table", &ragged]).status.code(),
        Some(4)
    );
    let out = confuse(&["verify", "--scheme", "@reveal_key", "--table", "@equal3"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(!out.stderr.is_empty());
}

#[test]
fn max_carrier_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_confuse"))
        .args(["solve", "--table", "@threshold_2x3"])
        .env("CONFUSE_MAX_CARRIER", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
