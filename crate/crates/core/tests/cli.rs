use std::process::{Command, Output};

fn defifix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_defifix")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn arith_over_extension() {
    let o = defifix(&["arith", "--field", "F3^2", "--op", "mul", "[0,1]", "[0,1]"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "[2]");
}

#[test]
fn definable_set_text_and_json() {
    let o = defifix(&["definable-set", "--field", "F5", "--formula", "exists y. x = y*y"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[4]"));
    let j = defifix(&["definable-set", "--field", "F5", "--formula", "exists y. x = y*y", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert!(v.is_object());
}

#[test]
fn certificates_and_verdicts() {
    assert_eq!(defifix(&["nbhd", "check", "--field", "F7", "--elements", "1,2", "--target", "2"]).status.code(), Some(0));
    assert_eq!(defifix(&["nbhd", "check", "--field", "F7", "--elements", "2,4", "--target", "2"]).status.code(), Some(1));
    assert_eq!(defifix(&["nbhd", "rational", "--value", "7/4"]).status.code(), Some(0));
}

#[test]
fn errors_are_coded() {
    let o = defifix(&["parse", "--formula", "x = = 1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[parse]"));
    let j = defifix(&["fixed-field", "--field", "F6", "--format", "json"]);
    assert_eq!(j.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["error"]["code"], "field");
}

#[test]
fn cap_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_defifix"))
        .args(["fixed-field", "--field", "F3^2"])
        .env("DEFIFIX_CAP", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error[cap]"));
}

#[test]
fn single_equation_defines_target() {
    let o = defifix(&["compile", "single-eq", "--field", "F7", "--elements", "1,2", "--target", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let eq = stdout(&o).lines().next().unwrap().to_string();
    let set = defifix(&["definable-set", "--field", "F7", "--formula", &eq, "--format", "json"]);
    assert!(stdout(&set).contains(r#"["[2]"]"#), "{}", stdout(&set));
}
