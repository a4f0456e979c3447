//! C ABI over `porlab`.
//!
//! Handles are opaque pointers owned by the caller and released with the
//! matching `*_free`. Every fallible call returns a [`PorlabStatus`]; on a
//! non-zero status `porlab_last_error` describes the failure. Strings
//! returned through `char **` out-parameters are owned by the caller and
//! released with `porlab_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use porlab::config::RunConfig;
use porlab::pipeline;
use porlab::sets::{ASetSpec, Strategy, Verdict};
use porlab::{Error, ExactDecimal, LemmaScaffold, PorositySequence};

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PorlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    Unresolved = 5,
    Depth = 6,
    Budget = 7,
    Config = 8,
    Io = 9,
    Json = 10,
    OutOfRange = 11,
    Panic = 12,
}

/// Three-valued membership answer.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PorlabVerdict {
    Out = -1,
    Unknown = 0,
    In = 1,
}

/// Exact nonnegative decimal.
pub struct PorlabDecimal(ExactDecimal);

/// Control sequence built from a run configuration.
pub struct PorlabSequence(PorositySequence);

/// Closed digit-density set built from a run configuration.
pub struct PorlabSet(ASetSpec);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> PorlabStatus {
    match e {
        Error::Parse(_) => PorlabStatus::Parse,
        Error::Domain(_) => PorlabStatus::Domain,
        Error::Unresolved(_) => PorlabStatus::Unresolved,
        Error::Depth(_) => PorlabStatus::Depth,
        Error::Budget(_) => PorlabStatus::Budget,
        Error::Config(_) => PorlabStatus::Config,
        Error::Io(_) => PorlabStatus::Io,
        Error::Json(_) => PorlabStatus::Json,
    }
}

struct Fail(PorlabStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> PorlabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PorlabStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside porlab".into());
            PorlabStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(PorlabStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(PorlabStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(PorlabStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(PorlabStatus::NullPointer, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(PorlabStatus::NullPointer, "output pointer is null".into()));
    }
    *out = CString::new(s).map_err(|_| Fail(PorlabStatus::InvalidUtf8, "string contains nul".into()))?.into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn porlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from a `char **` out-parameter of this library.
#[no_mangle]
pub unsafe extern "C" fn porlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `literal` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porlab_decimal_parse(literal: *const c_char, out: *mut *mut PorlabDecimal) -> PorlabStatus {
    guard(|| {
        let d = ExactDecimal::parse(text(literal, "literal")?)?;
        put(out, PorlabDecimal(d))
    })
}

/// # Safety
/// `d` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn porlab_decimal_free(d: *mut PorlabDecimal) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Canonical decimal text of `d`.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porlab_decimal_to_string(d: *const PorlabDecimal, out: *mut *mut c_char) -> PorlabStatus {
    guard(|| put_string(out, handle(d, "decimal")?.0.to_string()))
}

/// Sign of `a − b` as -1, 0 or 1.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porlab_decimal_cmp(a: *const PorlabDecimal, b: *const PorlabDecimal, out: *mut i32) -> PorlabStatus {
    guard(|| {
        let o = handle(a, "a")?.0.cmp(&handle(b, "b")?.0) as i32;
        if out.is_null() {
            return Err(Fail(PorlabStatus::NullPointer, "output pointer is null".into()));
        }
        *out = o;
        Ok(())
    })
}

/// Arithmetic operator for [`porlab_decimal_arith`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PorlabOp {
    Add = 0,
    Sub = 1,
    Mul = 2,
}

/// `a op b` as a new handle. Subtraction below zero is a domain error.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porlab_decimal_arith(
    op: PorlabOp,
    a: *const PorlabDecimal,
    b: *const PorlabDecimal,
    out: *mut *mut PorlabDecimal,
) -> PorlabStatus {
    guard(|| {
        let (a, b) = (&handle(a, "a")?.0, &handle(b, "b")?.0);
        let r = match op {
            PorlabOp::Add => a.add(b),
            PorlabOp::Sub => a.sub(b)?,
            PorlabOp::Mul => a.mul(b),
        };
        put(out, PorlabDecimal(r))
    })
}

/// Builds `count` terms of the control sequence described by a TOML run
/// configuration (`[f]` and `[sequence]` tables).
///
/// # Safety
/// `config_toml` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porlab_sequence_build(config_toml: *const c_char, count: usize, out: *mut *mut PorlabSequence) -> PorlabStatus {
    guard(|| {
        let cfg = RunConfig::from_toml(text(config_toml, "config")?)?;
        let scaffold = LemmaScaffold::build(cfg.f.clone())?;
        let seq = PorositySequence::construct(scaffold, cfg.sequence.x1.clone(), count)?;
        put(out, PorlabSequence(seq))
    })
}

/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn porlab_sequence_free(s: *mut PorlabSequence) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of terms, or 0 for null.
///
/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn porlab_sequence_len(s: *const PorlabSequence) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// Term `x_n`, 1-based, as a new decimal handle.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porlab_sequence_term(s: *const PorlabSequence, n: usize, out: *mut *mut PorlabDecimal) -> PorlabStatus {
    guard(|| {
        let s = handle(s, "sequence")?;
        let t = s.0.term(n).ok_or_else(|| Fail(PorlabStatus::OutOfRange, format!("term {n} of {}", s.0.len())))?;
        put(out, PorlabDecimal(t.clone()))
    })
}

/// Builds the set of the `[expansion]` and `[set]` tables of a TOML run
/// configuration.
///
/// # Safety
/// `config_toml` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porlab_set_build(config_toml: *const c_char, out: *mut *mut PorlabSet) -> PorlabStatus {
    guard(|| {
        let cfg = RunConfig::from_toml(text(config_toml, "config")?)?;
        let spec = cfg.set.spec(cfg.expansion.explicit()?)?;
        put(out, PorlabSet(spec))
    })
}

/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn porlab_set_free(s: *mut PorlabSet) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Membership of `x` checked through range `depth`.
///
/// # Safety
/// `s` and `x` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn porlab_set_membership(
    s: *const PorlabSet,
    x: *const PorlabDecimal,
    depth: usize,
    out: *mut PorlabVerdict,
) -> PorlabStatus {
    guard(|| {
        let v = match handle(s, "set")?.0.membership(&handle(x, "x")?.0, depth) {
            Verdict::In { .. } => PorlabVerdict::In,
            Verdict::Out { .. } => PorlabVerdict::Out,
            Verdict::Unknown { .. } => PorlabVerdict::Unknown,
        };
        if out.is_null() {
            return Err(Fail(PorlabStatus::NullPointer, "output pointer is null".into()));
        }
        *out = v;
        Ok(())
    })
}

/// A point of the set that is In through range `depth`. `strategy` is
/// `"max-C"`, `"min-C"` or `"seeded-random"`.
///
/// # Safety
/// `s` must be a live handle; `strategy` a nul-terminated string; `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn porlab_set_witness(
    s: *const PorlabSet,
    depth: usize,
    strategy: *const c_char,
    seed: u64,
    out: *mut *mut PorlabDecimal,
) -> PorlabStatus {
    guard(|| {
        let st: Strategy = text(strategy, "strategy")?.parse()?;
        let w = handle(s, "set")?.0.generate_witness(depth, st, seed)?;
        put(out, PorlabDecimal(w.x))
    })
}

/// Runs a pipeline command (`"sequence"`, `"construct"`, `"verify"` or
/// `"metrics"`) on a TOML configuration. On success `report_json` receives
/// the JSON report and `exit_code` the command-line exit code (0 pass,
/// 2 falsified, 3 unresolved).
///
/// # Safety
/// String arguments must be nul-terminated; out-parameters writable.
#[no_mangle]
pub unsafe extern "C" fn porlab_run(
    command: *const c_char,
    config_toml: *const c_char,
    report_json: *mut *mut c_char,
    exit_code: *mut i32,
) -> PorlabStatus {
    guard(|| {
        let cfg = RunConfig::from_toml(text(config_toml, "config")?)?;
        let (json, code) = match text(command, "command")? {
            "sequence" => pipeline::cmd_sequence(&cfg).and_then(|r| Ok((r.json()?, r.status.exit_code())))?,
            "construct" => pipeline::cmd_construct(&cfg).and_then(|r| Ok((r.json()?, r.status.exit_code())))?,
            "verify" => pipeline::cmd_verify(&cfg).and_then(|r| Ok((r.json()?, r.status.exit_code())))?,
            "metrics" => pipeline::cmd_metrics(&cfg).and_then(|r| Ok((r.json()?, r.status.exit_code())))?,
            other => return Err(Fail(PorlabStatus::Config, format!("unknown command {other:?}"))),
        };
        if exit_code.is_null() {
            return Err(Fail(PorlabStatus::NullPointer, "exit_code is null".into()));
        }
        put_string(report_json, json)?;
        *exit_code = code;
        Ok(())
    })
}
