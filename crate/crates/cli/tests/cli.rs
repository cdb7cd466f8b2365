use std::process::{Command, Output};

use serde_json::Value;

fn vsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vsc")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_b3_level_one() {
    let out = vsc(&["classify", r#"{"base":{"affine":["B",3]},"level":1}"#]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["kind"], "vertex-operator-superalgebra");
    assert_eq!(v["summands"][1]["lowest_weight"], "1/2");
}

#[test]
fn classify_d4_level_two_has_holomorphic_pairs() {
    let out = vsc(&["classify", r#"{"base":{"affine":["D",4]},"level":2}"#]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(!v["holomorphic_pairs"].as_array().unwrap().is_empty());
    assert_eq!(v["grading_group"], serde_json::json!([2, 2]));
}

#[test]
fn classify_lattice_spec_from_file() {
    let dir = std::env::temp_dir().join(format!("vsc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("spec.json");
    std::fs::write(&path, r#"{"base":{"lattice":{"gram":[[2]]}},"L":[["1/2"]]}"#).unwrap();
    let out = vsc(&["classify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["kind"], "abelian-intertwining-algebra");
}

#[test]
fn malformed_input_exits_two() {
    assert_eq!(vsc(&["classify", "{not json"]).status.code(), Some(2));
    assert_eq!(vsc(&["classify", r#"{"base":{"affine":["Q",3]},"level":1}"#]).status.code(), Some(2));
    assert_eq!(vsc(&["minimal", "B1"]).status.code(), Some(2));
    assert_eq!(vsc(&["verify", "everything"]).status.code(), Some(2));
    assert_eq!(vsc(&["delta-apply", "--alpha", "1,2"]).status.code(), Some(2));
}

#[test]
fn minimal_weights() {
    assert_eq!(json_of(&vsc(&["minimal", "A4"])), serde_json::json!([1, 2, 3, 4]));
    assert_eq!(json_of(&vsc(&["minimal", "G2"])), serde_json::json!([]));
    assert_eq!(json_of(&vsc(&["minimal", "D5"])), serde_json::json!([1, 4, 5]));
}

#[test]
fn delta_suite_passes_at_default_cutoff() {
    let out = vsc(&["verify", "delta"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn cocycle_suite_on_d4() {
    let out = vsc(&["verify", "cocycle"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["name"] == "h is a two-cocycle in the first two slots"));
}

#[test]
fn jacobi_sample_passes_and_sign_mutation_is_caught() {
    let out = vsc(&["verify", "jacobi", "--sample", "20", "--seed", "3", "--window", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let out = vsc(&["verify", "jacobi", "--inject-sign-error", "--window", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    let msg = v["checks"][0]["first_failure"].as_str().unwrap();
    assert!(msg.contains("coefficient of z0^"), "{msg}");
}

#[test]
fn characters_and_delta_apply() {
    let out = vsc(&["character", "--beta", "1/2", "--cutoff", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["deformed"], v["coset"]);
    assert_eq!(v["coset"]["1/4"], 2);
    let out = vsc(&["delta-apply", "--alpha", "1", "--vector", "h:1"]);
    let v = json_of(&out);
    // Δ(α,z)α(-1)1 = α(-1)1 + 2z⁻¹1
    assert_eq!(v["series"][0]["exponent"], "-1");
    assert_eq!(v["series"][0]["vector"]["|gamma=(0)"], "2");
    assert_eq!(v["series"][1]["exponent"], "0");
}

#[test]
fn quotient_of_a2_dual() {
    let v = json_of(&vsc(&["quotient", r#"{"gram":[[2,-1],[-1,2]]}"#]));
    assert_eq!(v["order"], 3);
    assert_eq!(v["reps"].as_array().unwrap().len(), 3);
}

#[test]
fn emitted_json_round_trips() {
    for args in [
        vec!["classify", r#"{"base":{"affine":["C",3]},"level":2}"#],
        vec!["verify", "cocycle"],
        vec!["minimal", "E6"],
        vec!["character", "--cutoff", "2"],
    ] {
        let out = vsc(&args);
        let text = String::from_utf8(out.stdout).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&v).unwrap(), text.trim_end());
    }
}

#[test]
fn output_file_and_text_format() {
    let path = std::env::temp_dir().join(format!("vsc-out-{}.txt", std::process::id()));
    let out = vsc(&["minimal", "D4", "--format", "text", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "[1, 3, 4]\n");
}

#[test]
fn runs_are_deterministic() {
    let args = ["verify", "jacobi", "--sample", "5", "--seed", "9", "--window", "2"];
    assert_eq!(vsc(&args).stdout, vsc(&args).stdout);
}
