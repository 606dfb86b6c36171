use std::process::{Command, Output};

use serde_json::Value;

fn ispwr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ispwr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = ispwr(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut args = args.to_vec();
    args.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&args)).unwrap()
}

fn validator() -> jsonschema::Validator {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../schema/ispwr.schema.json"
    );
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

#[test]
fn count_examples() {
    assert_eq!(
        stdout(&["count", "-d", "2", "-k", "2"]),
        "degree       2\nlevels       2\norder        127\nidempotents  25\ndclasses     10\naut          8\n"
    );
    let v = json(&["count", "-d", "1", "-k", "5"]);
    for key in ["order", "idempotents", "dclasses"] {
        assert_eq!(v[key], "6");
    }
    assert_eq!(v["aut"], "1");
    let csv = stdout(&["count", "-d", "3", "-k", "2", "--format", "csv"]);
    assert_eq!(
        csv,
        "degree,levels,order,idempotents,dclasses,aut\n3,2,256939,729,35,1296\n"
    );
}

#[test]
fn count_handles_huge_parameters() {
    let v = json(&["count", "-d", "64", "-k", "2"]);
    let order = v["order"].as_str().unwrap();
    assert!(order.len() > 1000 && order.bytes().all(|b| b.is_ascii_digit()));
    let v = json(&["count", "-d", "4", "-k", "6"]);
    assert!(v["order"].as_str().unwrap().len() > 1000);
}

#[test]
fn enumerate_formats() {
    let text = stdout(&["enumerate", "-d", "2", "-k", "1"]);
    assert_eq!(
        text.lines().collect::<Vec<_>>(),
        ["[-,-]", "[-,1]", "[-,2]", "[1,-]", "[2,-]", "[1,2]", "[2,1]"]
    );
    assert_eq!(
        stdout(&["enumerate", "-d", "1", "-k", "1"]).lines().count(),
        2
    );
    assert_eq!(
        json(&["enumerate", "-d", "2", "-k", "2"])
            .as_array()
            .unwrap()
            .len(),
        127
    );
    let csv = stdout(&["enumerate", "-d", "2", "-k", "2", "--format", "csv"]);
    assert_eq!(csv.lines().count(), 128);
    assert!(csv.starts_with("index,element\n0,"));
}

#[test]
fn enumerate_refuses_beyond_cap() {
    let out = ispwr(&["enumerate", "-d", "2", "-k", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2147483647"));
    assert!(out.stdout.is_empty());
    let out = ispwr(&["enumerate", "-d", "2", "-k", "2", "--max-elements", "100"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_observed_matches() {
    let rows = json(&["classify", "-d", "2", "-k", "2", "--observed"]);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r["match"] == true));
    let total: u64 = rows
        .iter()
        .map(|r| r["d_class_size"].as_str().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 127);

    let rows = json(&["classify", "-d", "2", "-k", "1", "--observed"]);
    let triples: Vec<[&str; 3]> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            ["num_idempotents", "h_class_size", "d_class_size"].map(|k| r[k].as_str().unwrap())
        })
        .collect();
    assert_eq!(triples, [["1", "2", "2"], ["2", "1", "4"], ["1", "1", "1"]]);
}

#[test]
fn classify_formula_only() {
    assert_eq!(
        json(&["classify", "-d", "3", "-k", "2"])
            .as_array()
            .unwrap()
            .len(),
        35
    );
    let text = stdout(&["classify", "-d", "4", "-k", "2"]);
    assert_eq!(text.lines().count(), 1 + 126);
    assert!(!text.contains("match"));
}

#[test]
fn classify_observed_falls_back_beyond_cap() {
    let out = ispwr(&[
        "classify",
        "-d",
        "2",
        "-k",
        "3",
        "--observed",
        "--max-elements",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 1 + 66);
}

#[test]
fn verify_exit_codes() {
    let out = ispwr(&["verify", "-d", "2", "-k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).ends_with("all checks passed\n"));
    assert_eq!(
        ispwr(&["verify", "-d", "2", "-k", "9"]).status.code(),
        Some(2)
    );
    assert_eq!(
        ispwr(&["verify", "-d", "0", "-k", "1"]).status.code(),
        Some(64)
    );
    assert_eq!(ispwr(&["verify", "-d", "2"]).status.code(), Some(64));
    assert_eq!(
        ispwr(&["count", "-d", "2", "-k", "2", "--format", "xml"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(ispwr(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("ispwr-test-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let out = ispwr(&["count", "-d", "2", "-k", "2", "--format", "csv", "-o", p]);
    assert!(out.status.success() && out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(
        written,
        stdout(&["count", "-d", "2", "-k", "2", "--format", "csv"])
    );
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["enumerate", "-d", "2", "-k", "2", "--format", "json"][..],
        &[
            "classify",
            "-d",
            "2",
            "-k",
            "2",
            "--observed",
            "--format",
            "csv",
        ],
        &["verify", "-d", "2", "-k", "2"],
        &["count", "-d", "3", "-k", "3", "--format", "json"],
    ] {
        assert_eq!(ispwr(args).stdout, ispwr(args).stdout, "{args:?}");
    }
}

#[test]
fn json_outputs_match_schema() {
    let v = validator();
    let cases: [&[&str]; 7] = [
        &["count", "-d", "3", "-k", "3"],
        &["enumerate", "-d", "2", "-k", "1"],
        &["enumerate", "-d", "2", "-k", "2"],
        &["classify", "-d", "2", "-k", "2", "--observed"],
        &["classify", "-d", "4", "-k", "2"],
        &["verify", "-d", "2", "-k", "1"],
        &["verify", "-d", "1", "-k", "3"],
    ];
    for args in cases {
        let doc = json(args);
        let errors: Vec<String> = v.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
    // numbers where strings belong are rejected
    assert!(!v.is_valid(&serde_json::json!({
        "degree": 2, "levels": 2, "order": 127, "idempotents": "25", "dclasses": "10", "aut": "8"
    })));
}
