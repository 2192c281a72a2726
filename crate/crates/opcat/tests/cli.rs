//! End-to-end tests of the `opcat` binary: golden output for the built-in
//! examples, exit-code contract, and round-trips through `classify` and
//! `validate`.

use std::path::PathBuf;
use std::process::{Command, Output};

use opcat::scenario::model_to_json;

fn opcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opcat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("opcat-cli-{}-{name}", std::process::id()));
    p
}

#[test]
fn examples_bell_prints_the_exact_table() {
    let out = opcat(&["examples", "bell"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for line in [
        "  (a,b)    1/2      0      0    1/2",
        " (a,b')    3/8    1/8    1/8    3/8",
        " (a',b)    3/8    1/8    1/8    3/8",
        "(a',b')    1/8    3/8    3/8    1/8",
    ] {
        assert!(text.contains(line), "missing row in:\n{text}");
    }
    assert!(text.contains("quantum realization"));
    assert!(text.contains("verified"));
    assert!(text.contains("NoSignallingNonlocal"));
}

#[test]
fn examples_prbox_prints_the_signed_witness() {
    let out = opcat(&["examples", "prbox"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("(a',b')      0    1/2    1/2      0"));
    assert!(text.contains(
        "[1/2, 0, 0, 0, -1/2, 0, 1/2, 0, -1/2, 1/2, 0, 0, 1/2, 0, 0, 0]"
    ));
    assert!(text.contains("NoSignallingNonlocal"));
}

#[test]
fn examples_json_certificate_revalidates() {
    let out = opcat(&["--json", "examples", "bell"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(v["verdict"], "NoSignallingNonlocal");
    // The emitted certificate must pass both the library validator and the
    // `validate` verb.
    opcat::classify::validate_certificate(&v).expect("certificate validates");
    let path = temp_path("bell-cert.json");
    std::fs::write(&path, stdout(&out)).unwrap();
    let out = opcat(&["validate", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("OK: certificate"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn classify_exit_codes_follow_the_contract() {
    // A nonlocal table: exit 0 normally, exit 2 under --require-witness.
    let bell = temp_path("bell-model.json");
    std::fs::write(
        &bell,
        serde_json::to_string(&model_to_json(&opcat::presets::bell_model())).unwrap(),
    )
    .unwrap();
    let out = opcat(&["classify", bell.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("NoSignallingNonlocal"));
    let out = opcat(&["classify", "--require-witness", bell.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // A product (hence local) table keeps exit 0 even with --require-witness.
    let local = temp_path("local-model.json");
    let mut lhv = None;
    if let opcat::classify::LocalDecision::Local(model) =
        opcat::classify::decide_local(&uniform_local_model()).unwrap()
    {
        lhv = Some(model);
    }
    assert!(lhv.is_some());
    std::fs::write(
        &local,
        serde_json::to_string(&model_to_json(&uniform_local_model())).unwrap(),
    )
    .unwrap();
    let out = opcat(&["classify", "--require-witness", local.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("Local"));

    // Errors exit 1.
    let out = opcat(&["classify", "/nonexistent/model.json"]);
    assert_eq!(out.status.code(), Some(1));

    std::fs::remove_file(&bell).ok();
    std::fs::remove_file(&local).ok();
}

fn uniform_local_model() -> opcat::scenario::EmpiricalModel {
    use std::collections::BTreeMap;

    use opcat::operational::OutcomeDistribution;
    use opcat::semiring::{Scalar, SemiringInstance};

    let scenario = opcat::presets::bell_scenario();
    let inst = SemiringInstance::rational();
    let mut table = BTreeMap::new();
    for m in scenario.setting_tuples() {
        let mut weights = BTreeMap::new();
        for o in scenario.outcome_tuples() {
            weights.insert(scenario.outcome_label(&o), Scalar::rational(1, 4));
        }
        table.insert(
            scenario.setting_label(&m),
            OutcomeDistribution::new(inst.clone(), weights),
        );
    }
    opcat::scenario::EmpiricalModel::new(scenario, inst, table).unwrap()
}

#[test]
fn validate_accepts_a_model_file() {
    let path = temp_path("validate-model.json");
    std::fs::write(
        &path,
        serde_json::to_string(&model_to_json(&opcat::presets::pr_box_model())).unwrap(),
    )
    .unwrap();
    let out = opcat(&["validate", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("OK: empirical model"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn eval_runs_an_operational_scenario() {
    let path = temp_path("eval.json");
    std::fs::write(
        &path,
        r#"{
  "instance": "rational",
  "sites": ["A", "B"],
  "settings": {"A": ["m0"], "B": ["m0"]},
  "outcomes": {"A": ["0", "1"], "B": ["0", "1"]},
  "objects": {"A": ["0", "1"], "B": ["0", "1"]},
  "state": {"pure": ["1", "0", "0", "0"]},
  "measurements": {
    "A": [{"outcomes": ["0", "1"], "projectors": [
      {"entries": [["1", "0"], ["0", "0"]]},
      {"entries": [["0", "0"], ["0", "1"]]}
    ]}],
    "B": [{"outcomes": ["0", "1"], "projectors": [
      {"entries": [["1", "0"], ["0", "0"]]},
      {"entries": [["0", "0"], ["0", "1"]]}
    ]}]
  }
}"#,
    )
    .unwrap();
    let out = opcat(&["eval", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("(m0,m0)"), "missing setting row in:\n{text}");
    assert!(text.contains('1'));
    std::fs::remove_file(&path).ok();
}

#[test]
fn rel_demo_verifies_its_construction() {
    let path = temp_path("rel.json");
    std::fs::write(
        &path,
        r#"{
  "instance": "boolean",
  "sites": [
    {"covers": [
      {"outcomes": ["0", "1"], "subsets": [
        {"base": ["x0", "x1"], "values": {"x0": 1, "x1": 0}},
        {"base": ["x0", "x1"], "values": {"x0": 0, "x1": 1}}
      ]}
    ]},
    {"covers": [
      {"outcomes": ["0", "1"], "subsets": [
        {"base": ["y0", "y1"], "values": {"y0": 1, "y1": 0}},
        {"base": ["y0", "y1"], "values": {"y0": 0, "y1": 1}}
      ]}
    ]}
  ],
  "global": {"base": ["(x0,y0)", "(x0,y1)", "(x1,y0)", "(x1,y1)"],
             "values": {"(x0,y0)": 1, "(x0,y1)": 0, "(x1,y0)": 0, "(x1,y1)": 1}}
}"#,
    )
    .unwrap();
    let out = opcat(&["rel-demo", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("local hidden-variable construction: verified"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn classify_handles_multiple_files_in_order() {
    let a = temp_path("multi-a.json");
    let b = temp_path("multi-b.json");
    std::fs::write(
        &a,
        serde_json::to_string(&model_to_json(&opcat::presets::bell_model())).unwrap(),
    )
    .unwrap();
    std::fs::write(
        &b,
        serde_json::to_string(&model_to_json(&uniform_local_model())).unwrap(),
    )
    .unwrap();
    let out = opcat(&[
        "--jobs",
        "2",
        "classify",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let pos_a = text.find("multi-a").expect("first file reported");
    let pos_b = text.find("multi-b").expect("second file reported");
    assert!(pos_a < pos_b, "reports out of order:\n{text}");
    std::fs::remove_file(&a).ok();
    std::fs::remove_file(&b).ok();
}
