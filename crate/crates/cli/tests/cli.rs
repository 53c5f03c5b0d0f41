use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cakecut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cakecut"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_gen(dir: &Path, file: &str, args: &[&str]) -> String {
    let path = dir.join(file);
    let path_str = path.to_str().unwrap().to_string();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path_str]);
    assert_eq!(code(&cakecut(&full)), 0);
    path_str
}

#[test]
fn gen_ell_matches_density() {
    let out = cakecut(&["gen", "ell", "--n", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(
        v["breakpoints"],
        serde_json::json!(["0", "1/4", "1/2", "1"])
    );
    assert_eq!(v["densities"], serde_json::json!(["3/2", "1/2", "1"]));
}

#[test]
fn gen_instances() {
    let f1 = json(&cakecut(&["gen", "F1"]));
    assert_eq!(f1["version"], 1);
    for agent in f1["agents"].as_array().unwrap() {
        assert_eq!(agent["densities"], serde_json::json!(["1"]));
    }
    let f2 = json(&cakecut(&["gen", "F2", "--eps", "1/100"]));
    assert_eq!(
        f2["agents"][1]["breakpoints"],
        serde_json::json!(["0", "1/2", "1"])
    );
    assert_eq!(
        f2["agents"][1]["densities"],
        serde_json::json!(["1/100", "1"])
    );
}

#[test]
fn gen_is_deterministic_and_rejects_unknown_names() {
    let a = cakecut(&["gen", "rotatingef", "--n", "3"]);
    let b = cakecut(&["gen", "rotatingef", "--n", "3"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&cakecut(&["gen", "F7"])), 2);
}

#[test]
fn f6_second_agent_totals_three_quarters() {
    let dir = tempfile::tempdir().unwrap();
    let f6 = write_gen(dir.path(), "f6.json", &["F6", "--eps", "1/100"]);
    let text = fs::read_to_string(&f6).unwrap();
    let file: cakecut::ProfileFile = serde_json::from_str(&text).unwrap();
    assert_eq!(file.agents[1].total(), cakecut::Rational::ratio(3, 4));
}

#[test]
fn run_simple_ef_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let profile = write_gen(dir.path(), "p.json", &["simpleef", "--n", "3"]);
    let out = cakecut(&["run", "--profile", &profile, "--mechanism", "simple_ef"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["audit"]["exact"], true);
    assert_eq!(v["guarantees_hold"], true);
}

#[test]
fn run_even_paz_counterexample_profile() {
    let dir = tempfile::tempdir().unwrap();
    let profile = write_gen(dir.path(), "p.json", &["evenpaz", "--eps", "1/20"]);
    let out = cakecut(&["run", "--profile", &profile, "--mechanism", "even_paz"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["audit"]["per_agent_values"][0][0], "143/200");
}

#[test]
fn run_rejects_zero_total_agent() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    fs::write(
        &path,
        r#"{"version":1,"agents":[
            {"breakpoints":["0","1"],"densities":["1"]},
            {"breakpoints":["0","1"],"densities":["0"]}]}"#,
    )
    .unwrap();
    let out = cakecut(&[
        "run",
        "--profile",
        path.to_str().unwrap(),
        "--mechanism",
        "moving_knife",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        r#"{"version":1,"agents":[{"breakpoints":["0","1"],"densities":["0.5"]}]}"#,
    )
    .unwrap();
    let out = cakecut(&[
        "run",
        "--profile",
        path.to_str().unwrap(),
        "--mechanism",
        "simple_ef",
    ]);
    assert_eq!(code(&out), 2);
    let out = cakecut(&[
        "run",
        "--profile",
        path.to_str().unwrap(),
        "--mechanism",
        "nope",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn audit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let profile = write_gen(dir.path(), "p.json", &["F1"]);
    let alloc = dir.path().join("a.json");
    fs::write(&alloc, r#"{"shares":[[["0","1/3"]],[["1/3","1"]]]}"#).unwrap();
    let out = cakecut(&[
        "audit",
        "--profile",
        &profile,
        "--allocation",
        alloc.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["proportional"], false);
    assert_eq!(v["entire"], true);
}

fn gain(cert: &Value) -> (String, String) {
    let g = &cert["gain_profile"];
    (
        g["truthful_value"].as_str().unwrap().into(),
        g["deviating_value"].as_str().unwrap().into(),
    )
}

#[test]
fn attack_generators() {
    let out = cakecut(&["attack", "movingknife", "--n", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["classification"], "WRAT_Violation");
    assert_eq!(gain(&v), ("1/3".into(), "7/18".into()));

    let v = json(&cakecut(&["attack", "evenpaz", "--eps", "1/20"]));
    assert_eq!(gain(&v), ("143/200".into(), "23/32".into()));

    let v = json(&cakecut(&["attack", "simpleef", "--n", "2"]));
    assert_eq!(gain(&v), ("3/8".into(), "1/2".into()));

    let out = cakecut(&["attack", "rotatingef", "--n", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["classification"], "RAT_Deterred");
}

#[test]
fn attack_precondition_failures() {
    assert_eq!(code(&cakecut(&["attack", "movingknife", "--n", "2"])), 3);
    assert_eq!(code(&cakecut(&["attack", "evenpaz", "--eps", "1/5"])), 3);
    assert_eq!(code(&cakecut(&["attack", "bogus"])), 2);
}

#[test]
fn attack_scenario_file_with_samples() {
    let dir = tempfile::tempdir().unwrap();
    let cert = cakecut(&["attack", "simpleef", "--n", "2"]);
    let scenario = json(&cert)["scenario"].clone();
    let path = dir.path().join("s.json");
    fs::write(&path, scenario.to_string()).unwrap();
    let out = cakecut(&[
        "attack",
        "--scenario",
        path.to_str().unwrap(),
        "--samples",
        "5",
        "--seed",
        "3",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(
        v["scenario"]["opponent_profiles"].as_array().unwrap().len(),
        6
    );
}

#[test]
fn gadget_builtin() {
    let out = cakecut(&["gadget", "--mechanism", "moving_knife", "--eps", "1/100"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "TruthfulnessViolation");
    assert_eq!(v["eps_used"], "1/100");
    assert_eq!(
        code(&cakecut(&[
            "gadget",
            "--mechanism",
            "even_paz",
            "--eps",
            "1/2"
        ])),
        3
    );
}

#[cfg(unix)]
fn script(dir: &Path, name: &str, body: &str) -> String {
    use std::os::unix::fs::PermissionsExt;
    let path = dir.join(name);
    fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
    fs::set_permissions(&path, fs::Permissions::from_mode(0o755)).unwrap();
    path.to_str().unwrap().to_string()
}

#[cfg(unix)]
#[test]
fn gadget_external_dictator() {
    let dir = tempfile::tempdir().unwrap();
    let m = script(
        dir.path(),
        "dictator",
        r#"read line; echo '{"shares":[[["0","1"]],[]]}'"#,
    );
    let out = cakecut(&["gadget", "--external", &m, "--eps", "1/100"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["verdict"], "ProportionalityViolation");
    assert_eq!(v["stage"]["instance"], 1);
}

#[cfg(unix)]
#[test]
fn gadget_external_protocol_errors() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = script(dir.path(), "garbage", "read line; echo not-json");
    assert_eq!(code(&cakecut(&["gadget", "--external", &garbage])), 4);
    let silent = script(dir.path(), "silent", "read line");
    assert_eq!(code(&cakecut(&["gadget", "--external", &silent])), 4);
    let one_share = script(
        dir.path(),
        "one",
        r#"read line; echo '{"shares":[[["0","1"]]]}'"#,
    );
    assert_eq!(code(&cakecut(&["gadget", "--external", &one_share])), 4);
    let missing = dir.path().join("missing").to_str().unwrap().to_string();
    assert_eq!(code(&cakecut(&["gadget", "--external", &missing])), 4);
}

#[cfg(unix)]
#[test]
fn gadget_external_fixed_split_fails_third_instance() {
    // always cuts at 1/2; on F3 agent 0 then holds only 1/4 of its 3/4
    let dir = tempfile::tempdir().unwrap();
    let m = script(
        dir.path(),
        "half",
        r#"read line; echo '{"shares":[[["0","1/2"]],[["1/2","1"]]]}'"#,
    );
    let out = cakecut(&["gadget", "--external", &m]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "ProportionalityViolation");
    assert_eq!(v["stage"]["instance"], 3);
    assert_eq!(v["certificate"]["agent"], 0);
}
