use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use sqc_ffi::*;

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    sqc_string_free(s);
    out
}

fn last_error() -> String {
    let p = sqc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn formula_round_trip_and_free() {
    let text = CString::new("forall x. p(x) -> p(x)").unwrap();
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(sqc_formula_parse(text.as_ptr(), &mut f), SqcStatus::Ok);
        let mut printed = ptr::null_mut();
        assert_eq!(sqc_formula_print(f, &mut printed), SqcStatus::Ok);
        assert_eq!(take(printed), "forall x. p(x) -> p(x)");
        sqc_formula_free(f);
    }
    assert!(sqc_last_error().is_null());
}

#[test]
fn parse_error_sets_last_error() {
    let text = CString::new("p ->").unwrap();
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(sqc_formula_parse(text.as_ptr(), &mut f), SqcStatus::ParseError);
    }
    assert!(f.is_null());
    assert!(last_error().contains("SYNTAX_ERROR"));
}

#[test]
fn null_arguments_are_rejected() {
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(sqc_formula_parse(ptr::null(), &mut f), SqcStatus::NullArgument);
        let text = CString::new("p").unwrap();
        assert_eq!(sqc_formula_parse(text.as_ptr(), ptr::null_mut()), SqcStatus::NullArgument);
        let mut out = ptr::null_mut();
        assert_eq!(sqc_formula_print(ptr::null(), &mut out), SqcStatus::NullArgument);
        sqc_formula_free(ptr::null_mut());
        sqc_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_utf8() {
    let bytes = CString::new(vec![0xffu8, 0xfe]).unwrap();
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(sqc_formula_parse(bytes.as_ptr(), &mut f), SqcStatus::InvalidUtf8);
    }
}

#[test]
fn countermodel_and_prove() {
    let converse = CString::new("(forall y. exists x. r(x, y)) -> (exists x. forall y. r(x, y))").unwrap();
    let swap = CString::new("(exists x. forall y. r(x, y)) -> (forall y. exists x. r(x, y))").unwrap();
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(sqc_formula_parse(converse.as_ptr(), &mut f), SqcStatus::Ok);
        let (mut found, mut model) = (-1, ptr::null_mut());
        assert_eq!(sqc_formula_countermodel(f, 2, &mut found, &mut model), SqcStatus::Ok);
        assert_eq!(found, 1);
        assert_eq!(take(model), "domain = {0, 1}\nr = {(0, 0), (1, 1)}\n");
        let mut script = ptr::null_mut();
        assert_eq!(sqc_formula_prove(f, 1, 200, &mut script), SqcStatus::SearchFailed);
        assert!(script.is_null());
        assert!(last_error().contains("no-proof-within-bounds"));
        assert_eq!(sqc_formula_countermodel(f, 0, &mut found, &mut model), SqcStatus::InvalidLimits);
        sqc_formula_free(f);

        assert_eq!(sqc_formula_parse(swap.as_ptr(), &mut f), SqcStatus::Ok);
        assert_eq!(sqc_formula_countermodel(f, 2, &mut found, &mut model), SqcStatus::Ok);
        assert_eq!(found, 0);
        assert!(model.is_null());
        assert_eq!(sqc_formula_prove(f, 1, 200, &mut script), SqcStatus::Ok);
        let text = CString::new(take(script)).unwrap();
        let (mut verdict, mut steps) = (SqcVerdict::ParseError, 0);
        assert_eq!(sqc_script_check(text.as_ptr(), &mut verdict, &mut steps), SqcStatus::Ok);
        assert_eq!(verdict, SqcVerdict::Complete);
        assert!(steps > 0);
        sqc_formula_free(f);
    }
}

#[test]
fn script_verdicts_match_exit_codes() {
    let cases = [
        ("p -> p\n\nAlphaImp\n  ~p\n  p\nExt\n  p\n  ~p\nBasic\n", SqcVerdict::Complete, 0),
        ("p -> p\n\nAlphaImp\n  ~p\n  p\n", SqcVerdict::Incomplete, 1),
        ("p -> p\n\nAlphaImp\n  p\n  ~p\n", SqcVerdict::Invalid, 2),
        ("p ->\n", SqcVerdict::ParseError, 3),
    ];
    for (text, expected, code) in cases {
        let text = CString::new(text).unwrap();
        let (mut verdict, mut steps) = (SqcVerdict::Complete, 0);
        unsafe {
            assert_eq!(sqc_script_check(text.as_ptr(), &mut verdict, &mut steps), SqcStatus::Ok);
        }
        assert_eq!(verdict, expected);
        assert_eq!(verdict as i32, code);
    }
}

#[test]
fn json_matches_the_service() {
    let req = r#"{"script_text": "p -> p\n\nAlphaImp\n  ~p\n  p\n", "mode": "prefix"}"#;
    let creq = CString::new(req).unwrap();
    let mut out = ptr::null_mut();
    let body = unsafe {
        assert_eq!(sqc_check_json(creq.as_ptr(), &mut out), SqcStatus::Ok);
        take(out)
    };
    let direct = sqc_core::service::handle_check(&serde_json::from_str(req).unwrap());
    assert_eq!(body, serde_json::to_string(&direct).unwrap());
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["status"], "incomplete");
    assert_eq!(v["open_goals"], serde_json::json!(["~p, p"]));
    assert_eq!(v["applicable"], serde_json::json!(["Ext"]));

    let bad = CString::new(r#"{"script": 1}"#).unwrap();
    unsafe {
        assert_eq!(sqc_check_json(bad.as_ptr(), &mut out), SqcStatus::InvalidJson);
        assert!(out.is_null());
        let parse = CString::new(r#"{"formula": "p & (q | r)"}"#).unwrap();
        assert_eq!(sqc_parse_json(parse.as_ptr(), &mut out), SqcStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v["status"], "ok");
        assert_eq!(v["formula"], "p & (q | r)");
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/sqc.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["sqc_check_json", "sqc_formula_parse", "sqc_last_error", "SQC_STATUS_OK", "SQC_VERDICT_PARSE_ERROR"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-std=c99", "-Wall", "-Werror", "-x", "c"]).arg(&header).status()
    else {
        eprintln!("no C compiler; skipped syntax check");
        return;
    };
    assert!(status.success());
}
