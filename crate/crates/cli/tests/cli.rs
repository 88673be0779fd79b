use std::process::{Command, Output};

fn opcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opcat"))
        .args(args)
        .env_remove("OPCAT_BOUND")
        .output()
        .expect("run opcat")
}

fn stderr_reason(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().find(|l| l.starts_with('{')).expect("json reason on stderr");
    serde_json::from_str(line).unwrap()
}

#[test]
fn laws_pass_on_small_bounds() {
    for cat in ["triv", "O", "F"] {
        let out = opcat(&["laws", "--cat", cat, "--bound", "2"]);
        assert_eq!(out.status.code(), Some(0), "{cat}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn monad_suite_on_non_perfect_category_exits_2() {
    let out = opcat(&["laws", "--cat", "trunc:O:3", "--suite", "monad"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_reason(&out)["reason"], "not-perfect");
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["laws", "--cat", "bogus"][..],
        &["laws", "--no-such-flag"],
        &["factor", "--cat", "F", "--src", "3", "--tgt", "2", "--map", "0,9,2"],
        &["laws", "--bound", "0"],
    ] {
        let out = opcat(args);
        assert_eq!(out.status.code(), Some(64), "{args:?}");
    }
    let out = opcat(&["laws", "--cat", "bogus"]);
    assert_eq!(stderr_reason(&out)["exit"], 64);
}

#[test]
fn failed_fibration_check_exits_1() {
    let out = opcat(&["compare", "--target", "theta-fibration", "--bound", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_reason(&out)["reason"], "law-failure");
}

#[test]
fn factor_prints_the_middle_object() {
    let out = opcat(&["factor", "--cat", "F", "--src", "3", "--tgt", "2", "--map", "0,0,2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("F2 (2 points)"), "{text}");
    assert!(text.contains("inert       F3=>F2:[0,1,2]"), "{text}");
    assert!(text.contains("active      F2=>F2:[0,0]"), "{text}");
}

#[test]
fn export_json_has_schema() {
    let out = opcat(&["export", "--cat", "O", "--bound", "2", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "opcat/1");
    assert_eq!(v["objects"].as_array().unwrap().len(), 3);
}

#[test]
fn bound_is_read_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_opcat"))
        .args(["export", "--cat", "O", "--format", "json"])
        .env("OPCAT_BOUND", "1")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["bound"], 1);
}
