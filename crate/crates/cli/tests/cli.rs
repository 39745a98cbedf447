use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn dhall(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dhall")).args(args).output().unwrap()
}

fn dhall_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dhall"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json_ok(args: &[&str]) -> Value {
    let out = dhall(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn product_of_two_x_objects() {
    let v = json_ok(&["prod", "--r", "1", "--m", "2", "X(1,0,0)", "X(1,1,1)"]);
    assert_eq!(v, json!([{"obj": "X(1,0,0) + X(1,1,1)", "coeff": "q"}, {"obj": "X(1,0,1)", "coeff": "q"}]));
}

#[test]
fn zero_is_the_unit() {
    let v = json_ok(&["prod", "--r", "1", "--m", "2", "0", "X(1,1,1)"]);
    assert_eq!(v, json!([{"obj": "X(1,1,1)", "coeff": "1"}]));
}

#[test]
fn numeric_q_must_be_a_prime_power() {
    let v = json_ok(&["prod", "--r", "1", "--m", "2", "--q", "4", "X(1,0,0)", "X(1,1,1)"]);
    assert_eq!(v, json!([{"obj": "X(1,0,0) + X(1,1,1)", "coeff": "4"}, {"obj": "X(1,0,1)", "coeff": "4"}]));
    assert_eq!(dhall(&["prod", "--r", "1", "--m", "2", "--q", "6", "0", "0"]).status.code(), Some(2));
}

#[test]
fn z_product_has_a_correction_term() {
    let v = json_ok(&["prod", "--r", "2", "--m", "3", "Z(1,0)", "Z(2,0)"]);
    let objs: Vec<&str> = v.as_array().unwrap().iter().map(|t| t["obj"].as_str().unwrap()).collect();
    assert!(objs.len() >= 2, "{v}");
}

#[test]
fn relations_vanish_at_small_parameters() {
    let v = json_ok(&["relcheck", "--r", "1", "--m", "1", "--lo", "-1", "--hi", "1"]);
    assert_eq!(v["pass"], json!(true));
    assert!(v["families"].as_array().unwrap().iter().all(|f| f["pass"] == json!(true)));
}

#[test]
fn normal_word_is_its_own_normal_form() {
    let v = json_ok(&["nf", "--r", "1", "--m", "2", "x(1,1) x(1,0)"]);
    assert_eq!(v, json!([{"word": "x(1,1) x(1,0)", "coeff": "1"}]));
}

#[test]
fn dims_on_a_small_box() {
    let v = json_ok(&["dims", "--r", "1", "--m", "1", "--d", "0", "--lo", "0", "--hi", "1", "--bound", "1"]);
    assert_eq!(v, json!({"normal_count": 5, "object_count": 5, "equal": true, "rank_q2": 5, "rank_q3": 5}));
}

#[test]
fn params_of_a_canonical_quiver() {
    let v = json_ok(&["gentle", "params", &data("lambda_2_1_2.bq")]);
    assert_eq!(v.to_string(), r#"{"p":2,"q":1,"r":2,"rC":2,"mC":3}"#);
}

#[test]
fn generated_quiver_round_trips_through_stdin() {
    let text = String::from_utf8(dhall(&["gentle", "generate", "3", "2", "1"]).stdout).unwrap();
    let out = dhall_stdin(&["gentle", "params", "-"], &text);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v, json!({"p": 3, "q": 2, "r": 1}));
}

#[test]
fn non_gentle_quiver_fails_the_check() {
    let text = "vertex a\nvertex b\narrow x: a -> b\narrow y: a -> b\narrow w: a -> b\n";
    let out = dhall_stdin(&["gentle", "check", "-"], text);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["gentle"], json!(false));
}

#[test]
fn parse_errors_exit_with_two() {
    let out = dhall_stdin(&["gentle", "check", "-"], "vertex a\narow x: a -> a\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2:"));
    assert_eq!(dhall(&["prod", "--r", "1", "--m", "1", "X(1,0)", "0"]).status.code(), Some(2));
    assert_eq!(dhall(&["nf", "--r", "1", "--m", "1", "x(2,0)"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["prod", "--r", "2", "--m", "3", "Z(1,0)", "Z(2,0)"];
    let first = dhall(&args).stdout;
    for _ in 0..3 {
        assert_eq!(dhall(&args).stdout, first);
    }
    let tsv = ["--format", "tsv", "gentle", "check", &data("lambda_2_1_2.bq")];
    assert_eq!(dhall(&tsv).stdout, dhall(&tsv).stdout);
}
