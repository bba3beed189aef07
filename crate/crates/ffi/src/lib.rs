//! C ABI for the sqc proof checker.
//!
//! Every fallible call returns an [`SqcStatus`]; on failure a message is
//! available from [`sqc_last_error`] until the next call on the same thread.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`sqc_string_free`]. Handles are released with their
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sqc_core::service::{self, CheckRequest, Mode, ParseRequest, Status};
use sqc_core::{check_validity, parse_formula, print_formula, print_script, prove_bounded, Formula, Limits, Validity};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqcStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidJson = 4,
    /// The prover gave up or the model search was refused.
    SearchFailed = 5,
    InvalidLimits = 6,
    /// A bug inside the library; the call had no effect.
    Internal = 99,
}

/// Outcome of checking a whole script; numerically equal to the CLI exit code.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqcVerdict {
    Complete = 0,
    Incomplete = 1,
    Invalid = 2,
    ParseError = 3,
}

/// A parsed, closed or open, first-order formula.
pub struct SqcFormula {
    formula: Formula,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `f`, turning panics into [`SqcStatus::Internal`].
fn guard(f: impl FnOnce() -> Result<(), (SqcStatus, String)>) -> SqcStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SqcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            SqcStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, (SqcStatus, String)> {
    if p.is_null() {
        return Err((SqcStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|e| (SqcStatus::InvalidUtf8, e.to_string()))
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior nuls replaced").into_raw()
}

fn null_out<T>(p: *mut T) -> Result<(), (SqcStatus, String)> {
    if p.is_null() {
        Err((SqcStatus::NullArgument, "null out-parameter".into()))
    } else {
        Ok(())
    }
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// is valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn sqc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn sqc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a formula. On success `*out` receives a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqc_formula_parse(text: *const c_char, out: *mut *mut SqcFormula) -> SqcStatus {
    guard(|| {
        null_out(out)?;
        *out = ptr::null_mut();
        let text = read_str(text)?;
        let formula = parse_formula(text).map_err(|ds| {
            let msg = ds.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n");
            (SqcStatus::ParseError, msg)
        })?;
        *out = Box::into_raw(Box::new(SqcFormula { formula }));
        Ok(())
    })
}

/// # Safety
/// `f` must be NULL or a handle from [`sqc_formula_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sqc_formula_free(f: *mut SqcFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Canonical printing of a formula.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqc_formula_print(f: *const SqcFormula, out: *mut *mut c_char) -> SqcStatus {
    guard(|| {
        null_out(out)?;
        let f = f.as_ref().ok_or((SqcStatus::NullArgument, "null formula".to_string()))?;
        *out = to_c(print_formula(&f.formula));
        Ok(())
    })
}

/// Searches interpretations with domains up to `max_domain`. Sets `*found`
/// to 1 and `*model` to a printed countermodel, or `*found` to 0 and
/// `*model` to NULL when none exists within the bound.
///
/// # Safety
/// `f` must be a live handle; `found` and `model` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqc_formula_countermodel(
    f: *const SqcFormula,
    max_domain: usize,
    found: *mut i32,
    model: *mut *mut c_char,
) -> SqcStatus {
    guard(|| {
        null_out(found)?;
        null_out(model)?;
        *found = 0;
        *model = ptr::null_mut();
        let f = f.as_ref().ok_or((SqcStatus::NullArgument, "null formula".to_string()))?;
        let limits = Limits { max_domain, ..Limits::default() };
        limits.validate().map_err(|e| (SqcStatus::InvalidLimits, e.to_string()))?;
        match check_validity(&f.formula, &limits).map_err(|e| (SqcStatus::SearchFailed, e.to_string()))? {
            Validity::Countermodel(m) => {
                *found = 1;
                *model = to_c(m.to_string());
            }
            Validity::ValidUpTo(_) => {}
        }
        Ok(())
    })
}

/// Runs the bounded prover; on success `*script` receives the proof script.
///
/// # Safety
/// `f` must be a live handle; `script` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqc_formula_prove(
    f: *const SqcFormula,
    gamma_depth: usize,
    max_steps: usize,
    script: *mut *mut c_char,
) -> SqcStatus {
    guard(|| {
        null_out(script)?;
        *script = ptr::null_mut();
        let f = f.as_ref().ok_or((SqcStatus::NullArgument, "null formula".to_string()))?;
        let limits = Limits { gamma_depth, max_steps, ..Limits::default() };
        limits.validate().map_err(|e| (SqcStatus::InvalidLimits, e.to_string()))?;
        let proof = prove_bounded(&f.formula, &limits).map_err(|e| (SqcStatus::SearchFailed, e.to_string()))?;
        *script = to_c(print_script(&proof));
        Ok(())
    })
}

/// Checks a whole script, reporting the verdict and number of valid steps.
///
/// # Safety
/// `text` must be a NUL-terminated string; `verdict` and `steps_validated`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqc_script_check(
    text: *const c_char,
    verdict: *mut SqcVerdict,
    steps_validated: *mut usize,
) -> SqcStatus {
    guard(|| {
        null_out(verdict)?;
        null_out(steps_validated)?;
        let text = read_str(text)?;
        let resp = service::handle_check(&CheckRequest { script_text: text.to_string(), mode: Mode::Full });
        *verdict = match resp.status {
            Status::Complete => SqcVerdict::Complete,
            Status::Incomplete => SqcVerdict::Incomplete,
            Status::Invalid => SqcVerdict::Invalid,
            Status::ParseError => SqcVerdict::ParseError,
        };
        *steps_validated = resp.steps_validated;
        Ok(())
    })
}

/// The check service without HTTP: `request` is a CheckRequest JSON object,
/// `*response` receives the CheckResponse JSON.
///
/// # Safety
/// `request` must be a NUL-terminated string; `response` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqc_check_json(request: *const c_char, response: *mut *mut c_char) -> SqcStatus {
    guard(|| {
        null_out(response)?;
        *response = ptr::null_mut();
        let req: CheckRequest = serde_json::from_str(read_str(request)?)
            .map_err(|e| (SqcStatus::InvalidJson, format!("malformed request: {e}")))?;
        let body = serde_json::to_string(&service::handle_check(&req)).expect("responses serialize");
        *response = to_c(body);
        Ok(())
    })
}

/// Like [`sqc_check_json`] for `{"formula": ...}` parse requests.
///
/// # Safety
/// `request` must be a NUL-terminated string; `response` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqc_parse_json(request: *const c_char, response: *mut *mut c_char) -> SqcStatus {
    guard(|| {
        null_out(response)?;
        *response = ptr::null_mut();
        let req: ParseRequest = serde_json::from_str(read_str(request)?)
            .map_err(|e| (SqcStatus::InvalidJson, format!("malformed request: {e}")))?;
        let body = serde_json::to_string(&service::handle_parse(&req)).expect("responses serialize");
        *response = to_c(body);
        Ok(())
    })
}
