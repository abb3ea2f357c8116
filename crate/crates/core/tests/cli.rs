use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcat"))
        .args(args)
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    qcat(args).status.code().unwrap()
}

fn report(args: &[&str]) -> (i32, Value) {
    let o = qcat(args);
    let v = serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)));
    (o.status.code().unwrap(), v)
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("qcat-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn classify() {
    let (c, v) = report(&[
        "squiggle",
        "classify",
        "6,2,5,3,4,0,5,1,3,0",
        "--dim",
        "5",
        "--json",
    ]);
    assert_eq!(c, 0);
    assert_eq!(v["classification"]["atomic"], true);
    assert_eq!(
        v["classification"]["final_vertex"],
        serde_json::json!([1, 0])
    );
    let o = qcat(&["squiggle", "classify", "3,1,2,2,0", "--dim", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 3"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["algebras", "chain-closure", "--width", "7"]), 0);
    assert_eq!(code(&["algebras", "chain-closure", "--width", "5"]), 5);
    assert_eq!(
        code(&["algebras", "chain-closure", "--width", "7", "--cap", "3"]),
        4
    );
    assert_eq!(code(&["verify", "limits", "discrete2"]), 1);
    assert_eq!(code(&["verify", "limits", "diamond"]), 0);
    assert_eq!(
        code(&[
            "verify",
            "closure",
            "--kind",
            "pullback",
            "chain3",
            "chain2",
            "--break-top"
        ]),
        2
    );
    assert_eq!(code(&["verify", "em", "z2-twist", "--width", "5"]), 0);
    assert_eq!(code(&["algebras", "no-such-monad.json"]), 3);
    assert_eq!(code(&["frobnicate"]), 3);
    assert_eq!(code(&["--version"]), 0);
}

#[test]
fn reports_are_reproducible() {
    let args = ["algebras", "diamond-closure", "--width", "7"];
    let (a, b) = (qcat(&args), qcat(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["tool"], "qcat");
    assert_eq!(v["status"], "pass");
    assert!(v.get("seconds").is_none());
    let (_, t) = report(&["--timing", "algebras", "diamond-closure", "--width", "7"]);
    assert!(t["seconds"].is_number());
}

#[test]
fn emitted_examples_round_trip() {
    let dir = scratch("emit");
    assert_eq!(
        code(&[
            "examples",
            "emit",
            "chain3",
            "chain-closure",
            "--dir",
            dir.to_str().unwrap()
        ]),
        0
    );
    let m = dir.join("chain-closure.json");
    let out = dir.join("report.json");
    assert_eq!(
        code(&[
            "algebras",
            m.to_str().unwrap(),
            "--width",
            "7",
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["counts"], serde_json::json!([2, 3, 4, 5]));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn library_entry_point_matches_the_binary() {
    assert_eq!(
        qcat::cli::main_with(["qcat", "verify", "limits", "discrete2"]),
        qcat::cli::EXIT_FAIL
    );
    assert_eq!(
        qcat::cli::main_with([
            "qcat",
            "squiggle",
            "enumerate",
            "--width",
            "3",
            "--dim",
            "1",
            "--cells"
        ]),
        0
    );
}
