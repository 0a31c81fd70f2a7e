//! C ABI for the lmhs verification library.
//!
//! The interface is deliberately narrow: parse a JSON problem file into an
//! opaque handle, run a named command against it, get the deterministic
//! JSON report back as a C string.  Status codes mirror the CLI exit codes
//! (0 pass, 1 mathematical failure, 2 invalid input) with extra codes for
//! null arguments and caught panics.  Error details for the last failing
//! call on the current thread are available via [`lmhs_last_error`].
//!
//! Memory rules: every `char*` returned by this library is owned by the
//! caller and must be released with [`lmhs_string_free`]; every
//! `LmhsProblem*` must be released with [`lmhs_problem_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lmhs_core::problem::{self, ProblemFile};

/// Opaque handle to a parsed problem file.
pub struct LmhsProblem {
    raw: Vec<u8>,
    parsed: ProblemFile,
}

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LmhsStatus {
    /// The operation succeeded and every mathematical check passed.
    Ok = 0,
    /// The operation ran, but a mathematically meaningful check said no.
    CheckFailed = 1,
    /// The input could not be parsed or violates a precondition.
    InvalidInput = 2,
    /// A required pointer argument was null.
    NullArgument = 3,
    /// An internal panic was caught; this is a bug in the library.
    Panic = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("error message had NUL").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Message describing the last failure on this thread, or null when the
/// last call succeeded.  The pointer stays valid until the next lmhs call
/// on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn lmhs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(ptr::null())
    })
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn lmhs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parse a JSON problem document into an opaque handle.
///
/// # Safety
/// `json` must be a valid NUL-terminated C string and `out` a valid
/// pointer; on success `*out` owns the handle.
#[no_mangle]
pub unsafe extern "C" fn lmhs_problem_parse(
    json: *const c_char,
    out: *mut *mut LmhsProblem,
) -> LmhsStatus {
    clear_error();
    if json.is_null() || out.is_null() {
        set_error("null argument".into());
        return LmhsStatus::NullArgument;
    }
    let bytes = CStr::from_ptr(json).to_bytes().to_vec();
    let result = catch_unwind(AssertUnwindSafe(|| ProblemFile::parse(&bytes)));
    match result {
        Ok(Ok(parsed)) => {
            *out = Box::into_raw(Box::new(LmhsProblem { raw: bytes, parsed }));
            LmhsStatus::Ok
        }
        Ok(Err(e)) => {
            *out = ptr::null_mut();
            set_error(e.to_string());
            LmhsStatus::InvalidInput
        }
        Err(_) => {
            *out = ptr::null_mut();
            set_error("internal panic during parse".into());
            LmhsStatus::Panic
        }
    }
}

/// Release a problem handle.  Null is a no-op.
///
/// # Safety
/// `problem` must have been produced by [`lmhs_problem_parse`] and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn lmhs_problem_free(problem: *mut LmhsProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Run one verification command against a parsed problem.  On `Ok` and
/// `CheckFailed` the deterministic JSON report is written to `report_out`
/// (caller frees it with [`lmhs_string_free`]); the two statuses mirror the
/// report's overall pass flag.
///
/// # Safety
/// `problem` must be a live handle, `command` a NUL-terminated C string,
/// and `report_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lmhs_run(
    problem: *const LmhsProblem,
    command: *const c_char,
    report_out: *mut *mut c_char,
) -> LmhsStatus {
    clear_error();
    if problem.is_null() || command.is_null() || report_out.is_null() {
        set_error("null argument".into());
        return LmhsStatus::NullArgument;
    }
    *report_out = ptr::null_mut();
    let handle = &*problem;
    let command = match CStr::from_ptr(command).to_str() {
        Ok(s) => s,
        Err(_) => {
            set_error("command is not valid UTF-8".into());
            return LmhsStatus::InvalidInput;
        }
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        problem::run(command, &handle.parsed, &handle.raw)
    }));
    match outcome {
        Ok(Ok(outcome)) => {
            let rendered =
                serde_json::to_string_pretty(&outcome.report).expect("report serializes");
            match CString::new(rendered) {
                Ok(c) => *report_out = c.into_raw(),
                Err(_) => {
                    set_error("report contained NUL".into());
                    return LmhsStatus::Panic;
                }
            }
            if outcome.exit == 0 {
                LmhsStatus::Ok
            } else {
                LmhsStatus::CheckFailed
            }
        }
        Ok(Err(e)) => {
            set_error(e.to_string());
            match problem::error_exit(&e) {
                1 => LmhsStatus::CheckFailed,
                _ => LmhsStatus::InvalidInput,
            }
        }
        Err(_) => {
            set_error("internal panic during run".into());
            LmhsStatus::Panic
        }
    }
}

/// Canonical problem JSON for one of the built-in fixtures
/// ("a", "a_prime", "b", "c", "d"); caller frees the string.
///
/// # Safety
/// `name` must be a NUL-terminated C string and `json_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lmhs_fixture(
    name: *const c_char,
    json_out: *mut *mut c_char,
) -> LmhsStatus {
    clear_error();
    if name.is_null() || json_out.is_null() {
        set_error("null argument".into());
        return LmhsStatus::NullArgument;
    }
    *json_out = ptr::null_mut();
    let name = match CStr::from_ptr(name).to_str() {
        Ok(s) => s,
        Err(_) => {
            set_error("fixture name is not valid UTF-8".into());
            return LmhsStatus::InvalidInput;
        }
    };
    let Some(fx) = lmhs_core::fixtures::all_fixtures()
        .into_iter()
        .find(|fx| fx.name == name)
    else {
        set_error(format!("unknown fixture {name:?}"));
        return LmhsStatus::InvalidInput;
    };
    let value = problem::fixture_problem_json(&fx);
    let rendered = serde_json::to_string_pretty(&value).expect("fixture serializes");
    match CString::new(rendered) {
        Ok(c) => {
            *json_out = c.into_raw();
            LmhsStatus::Ok
        }
        Err(_) => {
            set_error("fixture contained NUL".into());
            LmhsStatus::Panic
        }
    }
}

/// Release a string returned by this library.  Null is a no-op.
///
/// # Safety
/// `s` must have been returned by an lmhs function and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lmhs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
