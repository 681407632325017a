use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use defifix_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    defifix_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = defifix_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_str().unwrap().to_string()
}

#[test]
fn field_handles_and_errors() {
    unsafe {
        let mut k = ptr::null_mut();
        assert_eq!(defifix_field_new(c("F2^3").as_ptr(), &mut k), DefifixStatus::Ok);
        assert_eq!(defifix_field_order(k), 8);
        let mut fixed = ptr::null_mut();
        assert_eq!(defifix_fixed_subfield(k, &mut fixed), DefifixStatus::Ok);
        assert_eq!(take(fixed), r#"["[0]","[1]"]"#);
        defifix_field_free(k);

        let mut bad = ptr::null_mut();
        assert_eq!(defifix_field_new(c("F4").as_ptr(), &mut bad), DefifixStatus::Field);
        assert!(bad.is_null());
        assert!(last_error().contains("not prime"));
        assert_eq!(defifix_field_new(ptr::null(), &mut bad), DefifixStatus::NullPointer);
        assert_eq!(defifix_field_order(ptr::null()), 0);
    }
}

#[test]
fn neighbourhood_round_trip() {
    unsafe {
        let mut k = ptr::null_mut();
        defifix_field_new(c("F7").as_ptr(), &mut k);
        let mut a = ptr::null_mut();
        assert_eq!(defifix_neighbourhood_new(k, c("1,2").as_ptr(), c("2").as_ptr(), &mut a), DefifixStatus::Ok);
        assert_eq!(defifix_is_neighbourhood(a, ptr::null_mut()), DefifixStatus::Ok);

        let mut f = ptr::null_mut();
        assert_eq!(defifix_neighbourhood_to_formula(a, &mut f), DefifixStatus::Ok);
        let mut text = ptr::null_mut();
        defifix_formula_to_string(f, &mut text);
        assert_eq!(take(text), "exists x2. (x2 = 1 & x2 + x2 = x)");

        let mut back = ptr::null_mut();
        assert_eq!(defifix_formula_to_neighbourhood(k, f, &mut back), DefifixStatus::Ok);
        assert_eq!(defifix_is_neighbourhood(back, ptr::null_mut()), DefifixStatus::Ok);
        let mut json = ptr::null_mut();
        defifix_neighbourhood_to_json(back, &mut json);
        assert!(take(json).contains(r#""target":"[2]""#));

        let mut moved = ptr::null_mut();
        defifix_neighbourhood_new(k, c("2,4").as_ptr(), c("2").as_ptr(), &mut moved);
        let mut witness = ptr::null_mut();
        assert_eq!(defifix_is_neighbourhood(moved, &mut witness), DefifixStatus::No);
        assert!(take(witness).contains("pairs"));

        for h in [a, back, moved] {
            defifix_neighbourhood_free(h);
        }
        defifix_formula_free(f);
        defifix_field_free(k);
    }
}

#[test]
fn rationals_and_certificates() {
    unsafe {
        let mut q = ptr::null_mut();
        defifix_field_new(c("Q").as_ptr(), &mut q);
        let mut a = ptr::null_mut();
        assert_eq!(defifix_neighbourhood_rational(q, c("-5/3").as_ptr(), &mut a), DefifixStatus::Ok);
        assert_eq!(defifix_certify(a), DefifixStatus::Ok);
        assert_eq!(defifix_is_neighbourhood(a, ptr::null_mut()), DefifixStatus::Neighbourhood);
        let msg = last_error();
        assert!(msg.contains("finite"), "{msg}");
        defifix_neighbourhood_free(a);
        defifix_field_free(q);
    }
}

#[test]
fn formulas_and_schemas() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(defifix_formula_parse(c("exists y. ~(y=0) & x*y=1").as_ptr(), &mut f), DefifixStatus::Ok);
        let mut listing = ptr::null_mut();
        assert_eq!(defifix_normalize(f, c("x").as_ptr(), &mut listing), DefifixStatus::Ok);
        assert!(take(listing).contains("negations 1, fresh vars 1"));
        let mut k = ptr::null_mut();
        defifix_field_new(c("F5").as_ptr(), &mut k);
        let mut set = ptr::null_mut();
        defifix_definable_set(k, f, c("x").as_ptr(), &mut set);
        assert_eq!(take(set), r#"["[1]","[2]","[3]","[4]"]"#);
        defifix_formula_free(f);
        defifix_field_free(k);

        let mut bad = ptr::null_mut();
        assert_eq!(defifix_formula_parse(c("x = ").as_ptr(), &mut bad), DefifixStatus::Parse);

        let mut s = ptr::null_mut();
        assert_eq!(defifix_schema_emit(c("theorem7_def").as_ptr(), -2, &mut s), DefifixStatus::Ok);
        let mut text = ptr::null_mut();
        defifix_formula_to_string(s, &mut text);
        assert_eq!(take(text), "exists t. exists y. (x + t^2 = 0 & x = y + 1 + 1 & U(y))");
        defifix_formula_free(s);
        assert_eq!(defifix_schema_emit(c("theorem7_def").as_ptr(), 0, &mut s), DefifixStatus::Schema);
    }
}

#[test]
fn cli_in_process() {
    unsafe {
        let args = [c("fixed-field"), c("--field"), c("F2^2"), c("--format"), c("json")];
        let ptrs: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
        let (mut out, mut err) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(defifix_cli_run(ptrs.len() as i32, ptrs.as_ptr(), &mut out, &mut err), 0);
        assert_eq!(take(out).trim(), r#"{"fixed":["[0]","[1]"]}"#);
        assert_eq!(take(err), "");
    }
}

#[test]
fn header_lists_every_entry_point() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/defifix.h")).unwrap();
    let source = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    let exported: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exported.len() >= 20);
    for name in exported {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct DefifixField DefifixField;"));
    assert!(header.contains("DEFIFIX_STATUS_NO = 1"));
}

#[test]
fn c_program_links_against_static_library() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile = exe.parent().and_then(|d| d.parent()).unwrap();
    // cargo test leaves the archive beside the test binary; cargo build uplifts it
    let lib = [profile.join("deps/libdefifix_ffi.a"), profile.join("libdefifix_ffi.a")]
        .into_iter()
        .find(|p| p.exists())
        .unwrap_or_else(|| profile.join("libdefifix_ffi.a"));
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let out = std::env::temp_dir().join(format!("defifix_smoke_{}", std::process::id()));
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg(dir.join("examples/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.starts_with("exists x2. (x2 = 1 & x2 + x2 = x)"), "{stdout}");
}
