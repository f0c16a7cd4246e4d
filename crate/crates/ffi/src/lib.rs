//! C interface to mechlab.
//!
//! Instances live behind an opaque `MechlabInstance` handle. Every call
//! returns a `MechlabStatus`; on failure `mechlab_last_error` describes the
//! problem. Results are JSON documents in strings owned by the caller and
//! released with `mechlab_string_free`. Rationals appear in JSON as "p/q"
//! strings.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mechlab::audit::{audit, AuditLimits, SpMode, SpSemantics};
use mechlab::instances::{paper_instance, parse_instance, render_instance};
use mechlab::mechanisms::MechanismError;
use mechlab::solver::{solve_opt, SolverError};
use mechlab::{Instance, Mechanism};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed or invalid instance, unknown name, bad parameter.
    InvalidInput = 3,
    /// The instance exceeds a size guard.
    SizeGuard = 4,
    /// The mechanism does not apply to the instance.
    Inapplicable = 5,
    /// A panic was caught at the boundary.
    Internal = 6,
}

/// Opaque instance handle.
pub struct MechlabInstance {
    inner: Instance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(MechlabStatus, String);

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure(MechlabStatus::InvalidInput, message.to_string())
    }
}

impl From<MechanismError> for Failure {
    fn from(e: MechanismError) -> Self {
        let status = match e {
            MechanismError::Solver(_) => MechlabStatus::SizeGuard,
            _ => MechlabStatus::Inapplicable,
        };
        Failure(status, e.to_string())
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        Failure(MechlabStatus::SizeGuard, e.to_string())
    }
}

/// Runs `body` with panics and errors mapped to a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> MechlabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MechlabStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal error");
            MechlabStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(MechlabStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(MechlabStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

unsafe fn read_instance<'a>(p: *const MechlabInstance) -> Result<&'a Instance, Failure> {
    p.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Failure(MechlabStatus::NullPointer, "null instance handle".into()))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(MechlabStatus::NullPointer, "null output pointer".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_json(out: *mut *mut c_char, text: String) -> Result<(), Failure> {
    let c = CString::new(text).map_err(|_| Failure(MechlabStatus::Internal, "nul in output".into()))?;
    write_out(out, c.into_raw())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string(value).map_err(|e| Failure(MechlabStatus::Internal, e.to_string()))
}

unsafe fn store_instance(inst: Instance, out: *mut *mut MechlabInstance) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(MechlabStatus::NullPointer, "null output pointer".into()));
    }
    out.write(Box::into_raw(Box::new(MechlabInstance { inner: inst })));
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn mechlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn mechlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses an instance document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mechlab_instance_from_json(
    json: *const c_char,
    out: *mut *mut MechlabInstance,
) -> MechlabStatus {
    guard(|| {
        let text = read_str(json)?;
        let inst = parse_instance(text).map_err(Failure::input)?;
        store_instance(inst, out)
    })
}

/// Loads a named catalog instance such as "figure1".
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mechlab_instance_from_catalog(
    name: *const c_char,
    out: *mut *mut MechlabInstance,
) -> MechlabStatus {
    guard(|| {
        let inst = paper_instance(read_str(name)?).map_err(Failure::input)?;
        store_instance(inst, out)
    })
}

/// # Safety
/// `instance` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mechlab_instance_free(instance: *mut MechlabInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// # Safety
/// `instance` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mechlab_instance_item_count(
    instance: *const MechlabInstance,
    out: *mut usize,
) -> MechlabStatus {
    guard(|| write_out(out, read_instance(instance)?.len()))
}

/// The instance as a JSON document in the file format.
///
/// # Safety
/// `instance` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mechlab_instance_to_json(
    instance: *const MechlabInstance,
    out: *mut *mut c_char,
) -> MechlabStatus {
    guard(|| write_json(out, render_instance(read_instance(instance)?)))
}

/// Exact optimum as `{"packed": [...], "value": "p/q", "size": "p/q"}`.
///
/// # Safety
/// `instance` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mechlab_solve(instance: *const MechlabInstance, out: *mut *mut c_char) -> MechlabStatus {
    guard(|| {
        let inst = read_instance(instance)?;
        let opt = solve_opt(inst.items(), inst.capacity())?;
        write_json(out, to_json(&opt)?)
    })
}

fn parse_mechanism(name: &str) -> Result<Mechanism, Failure> {
    name.parse().map_err(Failure::input)
}

/// Outcome distribution of a mechanism such as "greedy" or
/// "fit_two:987/1597", as `{"branches": [{"probability", "outcome", "label"}]}`.
///
/// # Safety
/// `instance` must be a live handle, `mechanism` a NUL-terminated string
/// and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mechlab_run(
    instance: *const MechlabInstance,
    mechanism: *const c_char,
    out: *mut *mut c_char,
) -> MechlabStatus {
    guard(|| {
        let inst = read_instance(instance)?;
        let mech = parse_mechanism(read_str(mechanism)?)?;
        let dist = mech.run(inst)?;
        write_json(out, to_json(&dist)?)
    })
}

/// Strategyproofness and ratio audit. `mode` is "full_subsets" or
/// "single_item_closure"; `semantics` is "universal" or "expectation".
/// Problems met during the audit are reported in the document's `error`
/// field, not through the status.
///
/// # Safety
/// `instance` must be a live handle, the strings NUL-terminated and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mechlab_audit(
    instance: *const MechlabInstance,
    mechanism: *const c_char,
    mode: *const c_char,
    semantics: *const c_char,
    out: *mut *mut c_char,
) -> MechlabStatus {
    guard(|| {
        let inst = read_instance(instance)?;
        let mech = parse_mechanism(read_str(mechanism)?)?;
        let mode: SpMode = read_str(mode)?.parse().map_err(Failure::input)?;
        let semantics: SpSemantics = read_str(semantics)?.parse().map_err(Failure::input)?;
        let report = audit(&mech, inst, "ffi", mode, semantics, AuditLimits::default());
        write_json(out, to_json(&report)?)
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mechlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
