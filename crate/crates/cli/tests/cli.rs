use std::process::{Command, Output};

use serde_json::Value;

const FIVE_LEAF: &str = "(((1,2),(3,4)),5);";
const SEVEN_LEAF: &str = "((((1,2),(3,4)),5),(6,7));";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfnmc"))
        .args(args)
        .env_remove("CFNMC_THREADS")
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(run(args).stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

#[test]
fn survey_five_leaves() {
    let out = run(&["survey", "--leaves", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("3 shapes"));
    assert!(text.contains("F_5 = 8"));
    assert!(text.contains("E_4 = 5"));
    assert!(text.contains("identical: true"));
}

#[test]
fn vertices_of_cherry() {
    let v = json(&["--json", "vertices", "--tree", "(1,2);"]);
    assert_eq!(v["count"], 2);
    assert_eq!(v["vertices"], serde_json::json!(["0", "1"]));
    assert_eq!(code(&["vertices", "--tree", "(1,2);"]), 0);
}

#[test]
fn golden_generators_json() {
    let v = json(&["gens", "--json", "--tree", FIVE_LEAF]);
    let gens = v.as_array().unwrap();
    assert_eq!(gens.len(), 6);
    let first = &gens[0];
    assert_eq!(first["plus"], serde_json::json!(["0000", "0011"]));
    assert_eq!(first["minus"], serde_json::json!(["0001", "0010"]));
    assert_eq!(first["initial"], "plus");
    let provs: Vec<&str> = gens
        .iter()
        .map(|g| g["provenance"].as_str().unwrap())
        .collect();
    assert_eq!(provs, ["Root", "Root", "Root", "Swap", "Swap", "Swap"]);
}

#[test]
fn verification_commands_pass() {
    for args in [
        vec!["volume", "--tree", FIVE_LEAF],
        vec!["ehrhart", "--tree", FIVE_LEAF],
        vec!["groebner-check", "--tree", FIVE_LEAF],
        vec!["markov-check", "--tree", FIVE_LEAF],
        vec!["nni-check", "--tree", FIVE_LEAF],
        vec!["model-check", "--tree", FIVE_LEAF, "--samples", "10"],
        vec!["facets", "--tree", SEVEN_LEAF, "--verify-hull"],
    ] {
        assert_eq!(code(&args), 0, "{args:?}");
    }
}

#[test]
fn mixed_facets_with_supplement() {
    let args = [
        "rti-facets",
        "--tree",
        SEVEN_LEAF,
        "--ideal",
        "1,2,3,4",
        "--verify-hull",
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("x1 + 2x2 + x3 + x4 <= 2"));
    assert!(text.contains("x1 + y1 <= 1"));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(code(&["vertices", "--tree", "(1,2"]), 2);
    assert_eq!(code(&["vertices", "--tree", "(1,2,3);"]), 2);
    assert_eq!(code(&["vertices", "--tree", "(1,1);"]), 2);
    assert_eq!(code(&["vertices", "--tree", "(a,2);"]), 2);
    assert_eq!(
        code(&["rti-facets", "--tree", FIVE_LEAF, "--ideal", "0"]),
        2
    );
    assert_eq!(
        code(&["rti-facets", "--tree", FIVE_LEAF, "--ideal", "9"]),
        2
    );
    assert_eq!(code(&["survey", "--leaves", "1"]), 2);
    assert_eq!(code(&["vertices"]), 2);
    assert_eq!(code(&["no-such-command"]), 2);
}

#[test]
fn failed_check_exits_one() {
    // zero tolerance rejects the rounding error in the odd coordinates
    assert_eq!(code(&["model-check", "--tree", FIVE_LEAF, "--tol", "0"]), 1);
}

#[test]
fn json_is_deterministic() {
    let base = [
        "--json",
        "model-check",
        "--tree",
        FIVE_LEAF,
        "--samples",
        "20",
        "--seed",
        "5",
    ];
    let a = stdout(&base);
    assert_eq!(a, stdout(&base));
    for threads in ["1", "3"] {
        let mut args = vec!["--threads", threads];
        args.extend(base);
        assert_eq!(stdout(&args), a);
    }
    let g = [
        "--json",
        "groebner-check",
        "--tree",
        "((((1,2),3),(4,5)),6);",
    ];
    let one = stdout(&g);
    let mut four = vec!["--threads", "4"];
    four.extend(g);
    assert_eq!(stdout(&four), one);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["seed"], 5);
    assert_eq!(v["pass"], true);
}

#[test]
fn threads_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_cfnmc"))
        .args(["--json", "vertices", "--tree", FIVE_LEAF])
        .env("CFNMC_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], 8);
}
