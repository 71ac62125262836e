use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonlocal-ot"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn json(args: &[&str]) -> Value {
    let o = bin(args);
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", stdout(&o)))
}

fn json_file(args: &[&str], tag: &str) -> Value {
    let path = std::env::temp_dir().join(format!("nonlocal-ot-{tag}-{}.json", std::process::id()));
    let mut full = args.to_vec();
    full.extend(["--out", path.to_str().unwrap()]);
    assert!(bin(&full).status.success());
    let doc = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    doc
}

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn assert_schema(name: &str, doc: &Value) {
    let path = repo().join("schemas").join(format!("{name}.v1.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).expect("schema file")).unwrap();
    let v = jsonschema::validator_for(&schema).expect("valid schema");
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{name}: {errors:#?}");
    assert_eq!(doc["schema"], format!("nonlocal-ot/{name}/v1"));
}

#[test]
fn list_shows_each_reduction_with_its_cost() {
    let o = bin(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 8);
    assert!(text.contains("ot-from-to: 1 bit "));
    assert!(text.contains("ok-from-ko: 0 bits"));
    assert!(text.contains("TO -> OT"));
}

#[test]
fn run_traces_one_world() {
    let o = bin(&["run", "--protocol", "ot-from-pr", "--inputs", "x0=1", "x1=0", "c=1", "res=0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("A→B: 1"), "{text}");
    assert!(text.lines().last().unwrap().ends_with("A=- B=0"), "{text}");
}

#[test]
fn run_is_deterministic_per_seed() {
    let args = ["run", "--protocol", "ot-from-ok", "--inputs", "x0=1", "x1=1", "--seed", "7"];
    assert_eq!(bin(&args).stdout, bin(&args).stdout);
}

#[test]
fn exit_codes_separate_failures_from_errors() {
    assert_eq!(bin(&["verify", "--protocol", "ot-from-to"]).status.code(), Some(0));
    assert_eq!(bin(&["verify", "--protocol", "ot-from-pr~m-uses-x1"]).status.code(), Some(1));
    assert_eq!(bin(&["verify", "--protocol", "no-such"]).status.code(), Some(2));
    assert_eq!(bin(&["run", "--protocol", "ot-from-pr", "--inputs", "c=7"]).status.code(), Some(2));
    assert_eq!(bin(&["frob"]).status.code(), Some(2));
}

#[test]
fn spec_files_name_a_protocol_or_a_mutation() {
    let dir = repo().join("specs");
    let mutated = dir.join("ot-from-pr~m-uses-x1.json");
    let plain = dir.join("ot-from-to.json");
    let spec: Value = serde_json::from_str(&std::fs::read_to_string(&mutated).unwrap()).unwrap();
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(repo().join("schemas/spec-file.v1.json")).unwrap()).unwrap();
    assert!(jsonschema::is_valid(&schema, &spec));
    let o = bin(&["verify", "--spec", mutated.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["correctness"]["pass"], false);
    assert!(r["correctness"]["counterexample"].is_object());
    assert_eq!(bin(&["verify", "--spec", plain.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn verify_all_is_byte_identical_across_runs_and_workers() {
    let a = bin(&["verify", "--all", "--workers", "1"]);
    let b = bin(&["verify", "--all", "--workers", "1"]);
    let c = bin(&["verify", "--all", "--workers", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn out_flag_writes_the_same_document() {
    let path = std::env::temp_dir().join(format!("nonlocal-ot-{}.json", std::process::id()));
    let o = bin(&["chsh", "singlet", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let written = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(written, bin(&["chsh", "singlet"]).stdout);
}

#[test]
fn impossibility_search_below_the_bound() {
    let o = bin(&["search", "ot-from-pr", "--bits", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["mode"], "impossibility");
    assert_eq!(doc["correct_and_private"], 0);
    assert_eq!(doc["budgets"]["tape_budget"], 1);
}

#[test]
fn witness_search_at_the_bound_finds_the_catalog_protocol() {
    let doc = json(&["search", "pr-from-ok", "--bits", "2"]);
    assert_eq!(doc["mode"], "witness");
    assert_eq!(doc["catalog_member"], true);
    assert_eq!(doc["correct_and_private"], 128);
    assert!(!doc["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn template_search_and_refusal() {
    let doc = json(&["search", "ot-from-pr", "--template", "AB"]);
    assert_eq!(doc["mode"], "template");
    assert_eq!(doc["correct_and_private"], 8);
    let o = bin(&["search", "ot-from-ok", "--template", "AB,AB", "--max-space-bits", "8"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn outputs_match_their_schemas() {
    assert_schema("list", &json_file(&["list"], "list"));
    assert_schema("run", &json_file(&["run", "--protocol", "pr-from-ok"], "run"));
    assert_schema("verification-report", &json(&["verify", "--protocol", "ot-from-ok"]));
    assert_schema("verification-report", &json(&["verify", "--protocol", "pr-from-ot~constant-choice"]));
    assert_schema("verify-all", &json(&["verify", "--all"]));
    assert_schema("search", &json(&["search", "ot-from-pr", "--bits", "0"]));
    assert_schema("search", &json(&["search", "ot-from-pr", "--bits", "1"]));
    assert_schema("search", &json(&["search", "ot-from-pr", "--template", "AB"]));
    assert_schema("chsh", &json(&["chsh", "pr-variant"]));
    assert_schema("chsh-all", &json(&["chsh", "--all"]));
}

#[test]
fn schemas_reject_malformed_reports() {
    let schema: Value = serde_json::from_str(
        &std::fs::read_to_string(repo().join("schemas/verify-all.v1.json")).unwrap(),
    )
    .unwrap();
    let mut doc = json(&["verify", "--all"]);
    assert!(jsonschema::is_valid(&schema, &doc));
    doc["reports"][2].as_object_mut().unwrap().remove("correctness");
    assert!(!jsonschema::is_valid(&schema, &doc));
    doc["reports"][2]["correctness"] = serde_json::json!({"pass": true, "counterexample": null, "reason": null});
    doc["reports"][2]["privacy"]["A"]["pass"] = Value::from("yes");
    assert!(!jsonschema::is_valid(&schema, &doc));
}
