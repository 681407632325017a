//! C interface to `defifix`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_parse`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`DefifixStatus`]; on failure a message is kept per thread and
//! can be read with [`defifix_last_error`]. Strings handed out by the library
//! are owned by the caller and released with [`defifix_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use defifix::compile::{formula_to_neighbourhood, neighbourhood_to_formula, CompileError};
use defifix::field::FieldDescriptor;
use defifix::formula::{definable_set, parse, Formula};
use defifix::neighbourhood::{
    certify_by_propagation, fixed_subfield, is_neighbourhood, nbhd_rational, Certificate, Neighbourhood, Verdict,
    DEFAULT_MAP_CAP,
};
use defifix::normalize::{normalize_for, NormalizeOptions};
use defifix::schemas::{emit, SchemaParams};
use defifix::Error;

/// Result of a call. Non-negative values are answers, negative ones errors.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefifixStatus {
    Ok = 0,
    /// A negative answer: not a neighbourhood, not certified, not a singleton.
    No = 1,
    NullPointer = -1,
    InvalidUtf8 = -2,
    Field = -3,
    Parse = -4,
    Eval = -5,
    Normalize = -6,
    Neighbourhood = -7,
    Compile = -8,
    Schema = -9,
    CapExceeded = -10,
    Input = -11,
    Panic = -99,
}

/// A field: `Q`, `F<p>` or `F<p>^<k>`.
pub struct DefifixField(FieldDescriptor);

/// A parsed formula.
pub struct DefifixFormula(Formula);

/// A finite set of field elements with a distinguished member.
pub struct DefifixNeighbourhood(Neighbourhood);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DefifixStatus {
    match e.code() {
        "field" => DefifixStatus::Field,
        "parse" | "term" => DefifixStatus::Parse,
        "eval" => DefifixStatus::Eval,
        "normalize" => DefifixStatus::Normalize,
        "neighbourhood" => DefifixStatus::Neighbourhood,
        "compile" | "curve" => DefifixStatus::Compile,
        "schema" => DefifixStatus::Schema,
        "cap" => DefifixStatus::CapExceeded,
        _ => DefifixStatus::Input,
    }
}

enum Fail {
    Status(DefifixStatus, String),
    Lib(Error),
}

impl<E: Into<Error>> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail::Lib(e.into())
    }
}

type Outcome = Result<DefifixStatus, Fail>;

/// Runs `body`, turning errors and panics into status codes.
fn guard(body: impl FnOnce() -> Outcome) -> DefifixStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(s)) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            s
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            DefifixStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(DefifixStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Status(DefifixStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = CString::new(s).expect("no interior nul").into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn defifix_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn defifix_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `spec` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn defifix_field_new(spec: *const c_char, out: *mut *mut DefifixField) -> DefifixStatus {
    guard(|| {
        let k = FieldDescriptor::parse(text(spec, "spec")?)?;
        put(out, DefifixField(k))?;
        Ok(DefifixStatus::Ok)
    })
}

/// # Safety
/// `field` must come from [`defifix_field_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn defifix_field_free(field: *mut DefifixField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of elements, or 0 for the rationals.
///
/// # Safety
/// `field` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn defifix_field_order(field: *const DefifixField) -> u64 {
    field.as_ref().and_then(|k| k.0.order()).unwrap_or(0)
}

/// # Safety
/// `source` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn defifix_formula_parse(source: *const c_char, out: *mut *mut DefifixFormula) -> DefifixStatus {
    guard(|| {
        let f = parse(text(source, "source")?)?;
        put(out, DefifixFormula(f))?;
        Ok(DefifixStatus::Ok)
    })
}

/// # Safety
/// `formula` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn defifix_formula_free(formula: *mut DefifixFormula) {
    if !formula.is_null() {
        drop(Box::from_raw(formula));
    }
}

/// Canonical text of a formula.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn defifix_formula_to_string(
    formula: *const DefifixFormula,
    out: *mut *mut c_char,
) -> DefifixStatus {
    guard(|| {
        let f = handle(formula, "formula")?;
        put_string(out, f.0.to_string())?;
        Ok(DefifixStatus::Ok)
    })
}

/// JSON array of the elements satisfying `formula` in `var`.
///
/// # Safety
/// Handles must be live; `var` nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn defifix_definable_set(
    field: *const DefifixField,
    formula: *const DefifixFormula,
    var: *const c_char,
    out: *mut *mut c_char,
) -> DefifixStatus {
    guard(|| {
        let (k, f, var) = (handle(field, "field")?, handle(formula, "formula")?, text(var, "var")?);
        let set = definable_set(&f.0, &k.0, var)?;
        put_string(out, serde_json::to_string(&set).expect("serializable"))?;
        Ok(DefifixStatus::Ok)
    })
}

/// Three-address listing of an existential formula with free variable `var`.
///
/// # Safety
/// Handles must be live; `var` nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn defifix_normalize(
    formula: *const DefifixFormula,
    var: *const c_char,
    out: *mut *mut c_char,
) -> DefifixStatus {
    guard(|| {
        let (f, var) = (handle(formula, "formula")?, text(var, "var")?);
        let n = normalize_for(&f.0, var, NormalizeOptions::default())?;
        put_string(out, n.to_text())?;
        Ok(DefifixStatus::Ok)
    })
}

/// # Safety
/// `field` must be live; strings nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn defifix_neighbourhood_new(
    field: *const DefifixField,
    elements: *const c_char,
    target: *const c_char,
    out: *mut *mut DefifixNeighbourhood,
) -> DefifixStatus {
    guard(|| {
        let k = &handle(field, "field")?.0;
        let elements = k.parse_element_list(text(elements, "elements")?)?;
        let target = k.parse_element(text(target, "target")?)?;
        put(out, DefifixNeighbourhood(Neighbourhood::new(k.clone(), elements, &target)?))?;
        Ok(DefifixStatus::Ok)
    })
}

/// Neighbourhood of a rational number such as `-5/3`.
///
/// # Safety
/// `field` must be live; `value` nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn defifix_neighbourhood_rational(
    field: *const DefifixField,
    value: *const c_char,
    out: *mut *mut DefifixNeighbourhood,
) -> DefifixStatus {
    guard(|| {
        let k = &handle(field, "field")?.0;
        let v = text(value, "value")?;
        let q = v.trim().parse().map_err(|_| Error::Input(format!("not a rational number: `{v}`")))?;
        put(out, DefifixNeighbourhood(nbhd_rational(&q, k)?))?;
        Ok(DefifixStatus::Ok)
    })
}

/// # Safety
/// `a` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn defifix_neighbourhood_free(a: *mut DefifixNeighbourhood) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// JSON object with `field`, `elements` and `target`.
///
/// # Safety
/// `a` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn defifix_neighbourhood_to_json(
    a: *const DefifixNeighbourhood,
    out: *mut *mut c_char,
) -> DefifixStatus {
    guard(|| {
        let a = handle(a, "neighbourhood")?;
        put_string(out, serde_json::to_string(&a.0).expect("serializable"))?;
        Ok(DefifixStatus::Ok)
    })
}

/// `Ok` when every arithmetic map fixes the target, `No` otherwise. When
/// `witness` is not null it receives a JSON map moving the target, or null.
///
/// # Safety
/// `a` must be live; `witness` null or writable.
#[no_mangle]
pub unsafe extern "C" fn defifix_is_neighbourhood(
    a: *const DefifixNeighbourhood,
    witness: *mut *mut c_char,
) -> DefifixStatus {
    guard(|| {
        let a = handle(a, "neighbourhood")?;
        let v = is_neighbourhood(&a.0)?;
        if !witness.is_null() {
            *witness = ptr::null_mut();
        }
        Ok(match v {
            Verdict::Yes => DefifixStatus::Ok,
            Verdict::No(m) => {
                if !witness.is_null() {
                    put_string(witness, serde_json::to_string(&m).expect("serializable"))?;
                }
                DefifixStatus::No
            }
        })
    })
}

/// Propagation certificate; works over the rationals too.
///
/// # Safety
/// `a` must be live.
#[no_mangle]
pub unsafe extern "C" fn defifix_certify(a: *const DefifixNeighbourhood) -> DefifixStatus {
    guard(|| {
        let a = handle(a, "neighbourhood")?;
        Ok(match certify_by_propagation(&a.0) {
            Certificate::Certified => DefifixStatus::Ok,
            Certificate::Unknown => DefifixStatus::No,
        })
    })
}

/// Existential formula defining the target; `No` when the target takes part
/// in no relation of the set.
///
/// # Safety
/// `a` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn defifix_neighbourhood_to_formula(
    a: *const DefifixNeighbourhood,
    out: *mut *mut DefifixFormula,
) -> DefifixStatus {
    guard(|| {
        let a = handle(a, "neighbourhood")?;
        match neighbourhood_to_formula(&a.0) {
            Ok(f) => {
                put(out, DefifixFormula(f))?;
                Ok(DefifixStatus::Ok)
            }
            Err(e @ CompileError::NotDefining(_)) => Err(Fail::Status(DefifixStatus::No, e.to_string())),
            Err(e) => Err(e.into()),
        }
    })
}

/// Neighbourhood of the element a formula defines; `No` when it does not
/// define exactly one element.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn defifix_formula_to_neighbourhood(
    field: *const DefifixField,
    formula: *const DefifixFormula,
    out: *mut *mut DefifixNeighbourhood,
) -> DefifixStatus {
    guard(|| {
        let (k, f) = (handle(field, "field")?, handle(formula, "formula")?);
        match formula_to_neighbourhood(&f.0, &k.0) {
            Ok(r) => {
                put(out, DefifixNeighbourhood(r.neighbourhood))?;
                Ok(DefifixStatus::Ok)
            }
            Err(e @ CompileError::NotSingleton(_)) => Err(Fail::Status(DefifixStatus::No, e.to_string())),
            Err(e) => Err(e.into()),
        }
    })
}

/// JSON array of the elements fixed by every endomorphism.
///
/// # Safety
/// `field` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn defifix_fixed_subfield(field: *const DefifixField, out: *mut *mut c_char) -> DefifixStatus {
    guard(|| {
        let k = handle(field, "field")?;
        let fixed = fixed_subfield(&k.0, DEFAULT_MAP_CAP)?;
        put_string(out, serde_json::to_string(&fixed).expect("serializable"))?;
        Ok(DefifixStatus::Ok)
    })
}

/// Emits a named template. `offset` is the integer parameter `i`; pass 0
/// when the template does not take one.
///
/// # Safety
/// `name` nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn defifix_schema_emit(
    name: *const c_char,
    offset: i64,
    out: *mut *mut DefifixFormula,
) -> DefifixStatus {
    guard(|| {
        let params = SchemaParams { offset: (offset != 0).then_some(offset), ..Default::default() };
        put(out, DefifixFormula(emit(text(name, "name")?, &params)?))?;
        Ok(DefifixStatus::Ok)
    })
}

/// Runs the command-line tool in-process. Returns its exit status; `out` and
/// `err` (each may be null) receive its standard output and error.
///
/// # Safety
/// `argv` must hold `argc` nul-terminated strings, not counting the program name.
#[no_mangle]
pub unsafe extern "C" fn defifix_cli_run(
    argc: c_int,
    argv: *const *const c_char,
    out: *mut *mut c_char,
    err: *mut *mut c_char,
) -> c_int {
    let mut args = vec!["defifix".to_string()];
    for i in 0..argc.max(0) as usize {
        match text(*argv.add(i), "argument") {
            Ok(a) => args.push(a.to_string()),
            Err(_) => {
                set_error("argument is null or not UTF-8".into());
                return 2;
            }
        }
    }
    let o = match catch_unwind(|| defifix::cli::run(args)) {
        Ok(o) => o,
        Err(_) => {
            set_error("internal panic".into());
            return 2;
        }
    };
    if !out.is_null() {
        *out = CString::new(o.stdout).expect("no interior nul").into_raw();
    }
    if !err.is_null() {
        *err = CString::new(o.stderr).expect("no interior nul").into_raw();
    }
    o.code
}
