use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn spec(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "specs", &format!("{name}.json")].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_valdetect")).args(args).env("VALDETECT_THREADS", "2").output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn rigid_zeta_is_certified() {
    let o = run(&["--spec", &spec("laurent_st"), "rigid", "zeta"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["verdict"], "rigid");
    assert_eq!(v["certified"], true);
}

#[test]
fn symbol_of_x_and_x_plus_one_vanishes() {
    let v = json(&run(&["--spec", &spec("rational_x"), "symbol", "x", "x+1"]));
    assert_eq!(v["zero"], true);
}

#[test]
fn cube_has_zero_class() {
    let v = json(&run(&["--spec", &spec("laurent_st"), "class-of", "t^3"]));
    assert_eq!(v["zero"], true);
    assert_eq!(v["class"], "1");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--spec", &spec("rational_x"), "rigid", "0"]).status.code(), Some(0));
    assert_eq!(run(&["--spec", &spec("rational_x"), "--assert", "rigid", "0"]).status.code(), Some(2));
    assert_eq!(run(&["--spec", "/nonexistent.json", "rigid", "0"]).status.code(), Some(1));
    assert_eq!(run(&["--spec", &spec("laurent_st"), "rigid", "x"]).status.code(), Some(1));
    assert_eq!(run(&["--spec", &spec("laurent_st"), "class-of", "0"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["rigid", "zeta"]).status.code(), Some(1));
}

#[test]
fn out_of_context_classes_are_rejected() {
    let o = run(&["--spec", &spec("rational_x"), "rigid", "x-3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("context"));
}

#[test]
fn verify_is_deterministic() {
    let a = run(&["--stable", "--seed", "17", "verify", "--suite", "steinberg"]);
    let b = run(&["--stable", "--seed", "17", "verify", "--suite", "steinberg"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["seed"], 17);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn timings_are_present_and_nonnegative() {
    let v = json(&run(&["verify", "--suite", "prop33"]));
    for c in v["checks"].as_array().unwrap() {
        assert!(c["millis"].as_f64().unwrap() >= 0.0);
        assert!(c["assurance"].is_string());
    }
}

#[test]
fn lattice_suite_on_a_spec() {
    let o = run(&["--spec", &spec("laurent_st"), "verify", "--suite", "lattice"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["field"], "F_7((s))((t))");
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["summary"].as_str().unwrap().starts_with("28/28")));
}

#[test]
fn text_and_json_agree_on_verdicts() {
    let j = json(&run(&["--stable", "verify", "--suite", "acl-dual"]));
    let t = String::from_utf8(run(&["--stable", "--format", "text", "verify", "--suite", "acl-dual"]).stdout).unwrap();
    for c in j["checks"].as_array().unwrap() {
        let name = c["name"].as_str().unwrap();
        let line = t.lines().find(|l| l.starts_with(name)).expect("row per check");
        assert_eq!(line.contains("PASS"), c["passed"].as_bool().unwrap());
    }
}

#[test]
fn replay_claim_reports_every_step() {
    let o = run(&["replay-claim", "--range", "8"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["steps"].as_array().unwrap().len(), 19);
    assert_eq!(v["passed_steps"], 19);
}

#[test]
fn galois_queries() {
    let v = json(&run(&["--spec", &spec("rational_t"), "d1i1", "1"]));
    assert_eq!(v["i1"], serde_json::json!(["t*"]));
    let v = json(&run(&["--spec", &spec("laurent_st"), "acl-center", "s* + 2 t*, zeta*"]));
    assert_eq!(v["dual_agrees"], true);
    assert_eq!(v["is_acl"], true);
}
