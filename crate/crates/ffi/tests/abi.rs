use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use qcat_ffi::*;

const CHAIN_CLOSURE: &str = r#"{
  "name": "chain-closure",
  "category": {"path": "chain3.json"},
  "functor": {"objects": {"a": "b", "b": "b", "c": "c"}}
}"#;

fn monad(json: &str) -> *mut QcatMonad {
    let s = CString::new(json).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { qcat_monad_from_json(s.as_ptr(), &mut m) },
        QcatStatus::Ok,
        "{:?}",
        last_error()
    );
    m
}

fn last_error() -> Option<String> {
    let p = qcat_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

fn take(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { qcat_string_free(p) };
    s
}

#[test]
fn algebras_round_trip() {
    let m = monad(CHAIN_CLOSURE);
    let mut n = 0;
    assert_eq!(unsafe { qcat_monad_em_count(m, &mut n) }, QcatStatus::Ok);
    assert_eq!(n, 2);
    let mut a = ptr::null_mut();
    assert_eq!(
        unsafe { qcat_algebras_evaluate(m, 7, 2, &mut a) },
        QcatStatus::Ok
    );
    let mut iso = false;
    assert_eq!(unsafe { qcat_algebras_em_iso(a, &mut iso) }, QcatStatus::Ok);
    assert!(iso);
    let mut count = 0;
    assert_eq!(
        unsafe { qcat_algebras_count(a, 1, &mut count) },
        QcatStatus::Ok
    );
    assert_eq!(count, 3);
    assert_eq!(
        unsafe { qcat_algebras_count(a, 9, &mut count) },
        QcatStatus::Schema
    );
    let mut js = ptr::null_mut();
    assert_eq!(
        unsafe { qcat_algebras_report_json(a, &mut js) },
        QcatStatus::Ok
    );
    let v: serde_json::Value = serde_json::from_str(&take(js)).unwrap();
    assert_eq!(v["counts"], serde_json::json!([2, 3, 4]));
    unsafe {
        qcat_algebras_free(a);
        qcat_monad_free(m);
    }
}

#[test]
fn short_tower_reports_no_stabilization() {
    let m = monad(CHAIN_CLOSURE);
    let mut a = ptr::null_mut();
    assert_eq!(
        unsafe { qcat_algebras_evaluate(m, 3, 1, &mut a) },
        QcatStatus::NoStabilization
    );
    assert!(!a.is_null());
    unsafe {
        qcat_algebras_free(a);
        qcat_monad_free(m);
    }
}

#[test]
fn errors_and_nulls() {
    let mut m = ptr::null_mut();
    let bad = CString::new("{\"nope\": 1}").unwrap();
    assert_eq!(
        unsafe { qcat_monad_from_json(bad.as_ptr(), &mut m) },
        QcatStatus::Schema
    );
    assert!(last_error().is_some());
    assert_eq!(
        unsafe { qcat_monad_from_json(ptr::null(), &mut m) },
        QcatStatus::NullArgument
    );
    let mut out = ptr::null_mut();
    let seq = [2u8, 0, 2, 0, 1];
    assert_eq!(
        unsafe { qcat_squiggle_classify(1, seq.as_ptr(), seq.len(), &mut out) },
        QcatStatus::Schema
    );
    assert!(last_error().unwrap().contains("position"));
    unsafe { qcat_string_free(ptr::null_mut()) };
}

#[test]
fn classify_and_creation() {
    let mut out = ptr::null_mut();
    let seq = [6u8, 2, 5, 3, 4, 0, 6, 1, 3, 0];
    assert_eq!(
        unsafe { qcat_squiggle_classify(5, seq.as_ptr(), seq.len(), &mut out) },
        QcatStatus::Ok
    );
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["nondegenerate"], true);
    assert_eq!(v["atomic"], false);
    let m = monad(CHAIN_CLOSURE);
    let shape = CString::new("empty").unwrap();
    assert_eq!(
        unsafe { qcat_verify_creation(m, shape.as_ptr(), 7, &mut out) },
        QcatStatus::Ok
    );
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["terminal"]["status"], "pass");
    unsafe { qcat_monad_free(m) };
}

#[test]
fn header_is_current_and_compiles() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/qcat.h")).unwrap();
    for name in [
        "qcat_monad_from_json",
        "qcat_algebras_evaluate",
        "qcat_verify_creation",
        "QCAT_STATUS_SIZE_CAP",
    ] {
        assert!(header.contains(name), "{name} missing from the header");
    }
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(dir.join("include/qcat.h"))
        .output()
    else {
        eprintln!("no C compiler; skipping the syntax check");
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
