//! C ABI over `semiband`.
//!
//! Conventions:
//! - every fallible call returns an [`SbStatus`] and writes results through
//!   out-pointers, which are left untouched on failure;
//! - the message for the last failure on the calling thread is available
//!   from [`sb_last_error_message`];
//! - strings returned by the library are owned by the caller and released
//!   with [`sb_string_free`]; operators are released with
//!   [`sb_operator_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use semiband::cli::{cmd_interval_text, cmd_probe_text, cmd_selftest, Config};
use semiband::io::parse_operator_json;
use semiband::predicates::{is_sbp, is_scp};
use semiband::report::analyze_operator;
use semiband::{Error, Operator};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed input or a violated precondition.
    Input = 3,
    Budget = 4,
    Internal = 5,
    /// The self-test ran and at least one criterion failed.
    SelftestFailed = 6,
    Panic = 7,
}

/// Opaque handle to a parsed operator.
pub struct SbOperator {
    inner: Operator,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: SbStatus, msg: &str) -> SbStatus {
    set_error(msg);
    status
}

fn from_error(e: &Error) -> SbStatus {
    let status = match e {
        Error::Budget(_) => SbStatus::Budget,
        Error::Internal(_) | Error::Indeterminate(_) => SbStatus::Internal,
        _ => SbStatus::Input,
    };
    fail(status, &e.to_string())
}

/// Runs `f`, mapping panics to [`SbStatus::Panic`].
fn guard(f: impl FnOnce() -> SbStatus) -> SbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == SbStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            s
        }
        Err(_) => fail(SbStatus::Panic, "panic inside semiband"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, SbStatus> {
    if p.is_null() {
        return Err(fail(SbStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(SbStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> SbStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            SbStatus::Ok
        }
        Err(_) => fail(SbStatus::Internal, "output contains a nul byte"),
    }
}

/// Parses an operator from its JSON description.
///
/// # Safety
/// `json` must be a valid nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_operator_from_json(json: *const c_char, out: *mut *mut SbOperator) -> SbStatus {
    guard(|| {
        if out.is_null() {
            return fail(SbStatus::NullPointer, "null output pointer");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_operator_json(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(SbOperator { inner }));
                SbStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Releases an operator; null is ignored.
///
/// # Safety
/// `op` must come from [`sb_operator_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sb_operator_free(op: *mut SbOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

unsafe fn with_op(op: *const SbOperator, f: impl FnOnce(&Operator) -> SbStatus) -> SbStatus {
    guard(|| match op.as_ref() {
        None => fail(SbStatus::NullPointer, "null operator"),
        Some(o) => f(&o.inner),
    })
}

/// Number of atoms.
///
/// # Safety
/// `op` must be a live operator handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_operator_dim(op: *const SbOperator, out: *mut usize) -> SbStatus {
    with_op(op, |t| {
        if out.is_null() {
            return fail(SbStatus::NullPointer, "null output pointer");
        }
        *out = t.dim();
        SbStatus::Ok
    })
}

unsafe fn predicate(
    op: *const SbOperator,
    out: *mut bool,
    f: impl FnOnce(&Operator) -> semiband::Result<bool>,
) -> SbStatus {
    with_op(op, |t| {
        if out.is_null() {
            return fail(SbStatus::NullPointer, "null output pointer");
        }
        match f(t) {
            Ok(b) => {
                *out = b;
                SbStatus::Ok
            }
            Err(e) => from_error(&e),
        }
    })
}

/// # Safety
/// `op` must be a live operator handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_operator_is_sbp(op: *const SbOperator, out: *mut bool) -> SbStatus {
    predicate(op, out, |t| Ok(is_sbp(t)?.holds))
}

/// # Safety
/// `op` must be a live operator handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_operator_is_scp(op: *const SbOperator, out: *mut bool) -> SbStatus {
    predicate(op, out, |t| Ok(is_scp(t)?.holds))
}

/// # Safety
/// `op` must be a live operator handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_operator_is_projection(op: *const SbOperator, out: *mut bool) -> SbStatus {
    predicate(op, out, |t| Ok(t.is_projection()))
}

/// The full analysis report as JSON, identical to the `analyze` command.
///
/// # Safety
/// `op` must be a live operator handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_operator_analyze_json(
    op: *const SbOperator,
    max_atoms: usize,
    out_json: *mut *mut c_char,
) -> SbStatus {
    with_op(op, |t| {
        if out_json.is_null() {
            return fail(SbStatus::NullPointer, "null output pointer");
        }
        match analyze_operator(t, max_atoms) {
            Ok(r) => {
                let mut s = serde_json::to_string_pretty(&r).expect("report serializes");
                s.push('\n');
                write_string(out_json, s)
            }
            Err(e) => from_error(&e),
        }
    })
}

/// Interval report for a finite-rank operator given as JSON.
///
/// # Safety
/// `json` must be a valid nul-terminated string and `out_json` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_interval_analyze_json(json: *const c_char, out_json: *mut *mut c_char) -> SbStatus {
    guard(|| {
        if out_json.is_null() {
            return fail(SbStatus::NullPointer, "null output pointer");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cmd_interval_text(text, &Config::default()) {
            Ok(s) => write_string(out_json, s),
            Err(e) => from_error(&e),
        }
    })
}

/// Probe report for exponent `p` (e.g. `"1"`, `"3/2"`) over the
/// unweighted spaces with `dim_lo..=dim_hi` atoms.
///
/// # Safety
/// `p` must be a valid nul-terminated string and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_probe_json(
    p: *const c_char,
    dim_lo: usize,
    dim_hi: usize,
    budget: usize,
    seed: u64,
    out_json: *mut *mut c_char,
) -> SbStatus {
    guard(|| {
        if out_json.is_null() {
            return fail(SbStatus::NullPointer, "null output pointer");
        }
        let p = match read_str(p) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let cfg = Config {
            budget,
            seed,
            ..Config::default()
        };
        match cmd_probe_text(p, dim_lo..=dim_hi, &cfg) {
            Ok(s) => write_string(out_json, s),
            Err(e) => from_error(&e),
        }
    })
}

/// Runs the acceptance campaign. The summary is written even when a
/// criterion fails, in which case the status is
/// [`SbStatus::SelftestFailed`].
///
/// # Safety
/// `out_summary` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sb_selftest(seed: u64, out_summary: *mut *mut c_char) -> SbStatus {
    guard(|| {
        if out_summary.is_null() {
            return fail(SbStatus::NullPointer, "null output pointer");
        }
        let outcome = cmd_selftest(seed, false);
        let status = write_string(out_summary, outcome.stdout);
        if status == SbStatus::Ok && outcome.code != 0 {
            return fail(SbStatus::SelftestFailed, outcome.stderr.trim_end());
        }
        status
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn sb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
