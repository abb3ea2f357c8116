//! C ABI for qcat.
//!
//! Monads and algebra results cross the boundary as opaque handles owned by
//! the caller and released with the matching `_free`. Every call returns a
//! [`QcatStatus`]; on anything but `QCAT_STATUS_OK` (or a verdict status) the
//! message is available from [`qcat_last_error`] on the same thread. Strings
//! handed out are released with [`qcat_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use qcat::algebras::{em_compare, evaluate_algebras, report, AlgebraConfig, AlgebraResult};
use qcat::cli::load_shape;
use qcat::fincat::DEFAULT_MORPHISM_CAP;
use qcat::limits::{creation_suite, Status, DEFAULT_CHECK_DIM};
use qcat::monad::Monad;
use qcat::squiggle::{Level, Squiggle};
use qcat::Error;

/// Outcome of a call. The first three double as verdicts.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcatStatus {
    Ok = 0,
    Fail = 1,
    Inapplicable = 2,
    Schema = 3,
    SizeCap = 4,
    NoStabilization = 5,
    NullArgument = 6,
    Panic = 7,
}

/// A validated monad on a finite category.
pub struct QcatMonad {
    inner: Arc<Monad>,
}

/// The algebras of a monad together with the comparison to Eilenberg-Moore.
pub struct QcatAlgebras {
    result: AlgebraResult,
    iso: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn code_of(e: &Error) -> QcatStatus {
    match e {
        Error::SizeCap { .. } => QcatStatus::SizeCap,
        Error::NoStabilization(_) => QcatStatus::NoStabilization,
        _ => QcatStatus::Schema,
    }
}

fn guard(f: impl FnOnce() -> Result<QcatStatus, Error>) -> QcatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => {
            set_error(e.to_string());
            code_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            QcatStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Error> {
    if p.is_null() {
        return Err(Error::Invalid("null string".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error::Schema("string is not UTF-8".into()))
}

fn give_string(s: String, out: *mut *mut c_char) {
    let c = CString::new(s.replace('\0', " ")).unwrap_or_default();
    unsafe { *out = c.into_raw() };
}

macro_rules! nonnull {
    ($($p:expr),+) => {
        if $($p.is_null())||+ {
            set_error("null argument");
            return QcatStatus::NullArgument;
        }
    };
}

fn verdict(s: Status) -> QcatStatus {
    match s {
        Status::Pass => QcatStatus::Ok,
        Status::Fail => QcatStatus::Fail,
        Status::Inapplicable => QcatStatus::Inapplicable,
    }
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn qcat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qcat_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qcat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a monad from its JSON description. Category references resolve
/// against the bundled examples.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qcat_monad_from_json(
    json: *const c_char,
    out: *mut *mut QcatMonad,
) -> QcatStatus {
    nonnull!(json, out);
    guard(|| {
        let m = Monad::from_json_str(str_arg(json)?, None, DEFAULT_MORPHISM_CAP)?;
        m.ensure_valid()?;
        *out = Box::into_raw(Box::new(QcatMonad { inner: Arc::new(m) }));
        Ok(QcatStatus::Ok)
    })
}

/// # Safety
/// `m` must come from [`qcat_monad_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qcat_monad_free(m: *mut QcatMonad) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of Eilenberg-Moore algebras.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qcat_monad_em_count(m: *const QcatMonad, out: *mut usize) -> QcatStatus {
    nonnull!(m, out);
    guard(|| {
        *out = (*m).inner.em_category()?.algebras.len();
        Ok(QcatStatus::Ok)
    })
}

/// Runs the tower with cells up to `width` and simplices up to `degree`.
/// Returns `QCAT_STATUS_NO_STABILIZATION` (with the handle still written) when
/// the last two width classes changed something.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qcat_algebras_evaluate(
    m: *const QcatMonad,
    width: usize,
    degree: usize,
    out: *mut *mut QcatAlgebras,
) -> QcatStatus {
    nonnull!(m, out);
    guard(|| {
        let cfg = AlgebraConfig {
            width_max: width,
            degree_max: degree,
            ..Default::default()
        };
        let result = evaluate_algebras(&(*m).inner, &cfg)?;
        let iso = em_compare(&result)?.iso;
        let stabilized = result.stabilized;
        *out = Box::into_raw(Box::new(QcatAlgebras { result, iso }));
        if !stabilized {
            set_error("the tower did not stabilize");
            return Ok(QcatStatus::NoStabilization);
        }
        Ok(QcatStatus::Ok)
    })
}

/// # Safety
/// `a` must come from [`qcat_algebras_evaluate`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qcat_algebras_free(a: *mut QcatAlgebras) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Number of algebra simplices of a degree.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qcat_algebras_count(
    a: *const QcatAlgebras,
    degree: usize,
    out: *mut usize,
) -> QcatStatus {
    nonnull!(a, out);
    let alg = &(*a).result.algebras;
    if degree > alg.bound() {
        set_error(format!("degree {degree} above the bound {}", alg.bound()));
        return QcatStatus::Schema;
    }
    *out = alg.count(degree);
    QcatStatus::Ok
}

/// Whether the comparison with the Eilenberg-Moore nerve is an isomorphism.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qcat_algebras_em_iso(
    a: *const QcatAlgebras,
    out: *mut bool,
) -> QcatStatus {
    nonnull!(a, out);
    *out = (*a).iso;
    QcatStatus::Ok
}

/// The JSON report of a run; free with [`qcat_string_free`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qcat_algebras_report_json(
    a: *const QcatAlgebras,
    out: *mut *mut c_char,
) -> QcatStatus {
    nonnull!(a, out);
    guard(|| {
        let r = report(&(*a).result)?;
        give_string(serde_json::to_string(&r)?, out);
        Ok(QcatStatus::Ok)
    })
}

/// Classifies a level sequence as JSON; malformed sequences give
/// `QCAT_STATUS_SCHEMA` with the offending position in the error.
///
/// # Safety
/// `levels` must point to `len` bytes and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn qcat_squiggle_classify(
    dim: usize,
    levels: *const u8,
    len: usize,
    out: *mut *mut c_char,
) -> QcatStatus {
    nonnull!(levels, out);
    guard(|| {
        let seq: Vec<Level> = std::slice::from_raw_parts(levels, len).to_vec();
        let c = Squiggle::new(dim, seq)?.classify();
        give_string(serde_json::to_string(&c)?, out);
        Ok(QcatStatus::Ok)
    })
}

/// Runs the creation suite for a diagram shape (a bundled category name,
/// `empty` or `delta1`) and writes the JSON report. The status is the verdict.
///
/// # Safety
/// Pointers must be valid; `shape` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qcat_verify_creation(
    m: *const QcatMonad,
    shape: *const c_char,
    width: usize,
    out: *mut *mut c_char,
) -> QcatStatus {
    nonnull!(m, shape, out);
    guard(|| {
        let cfg = AlgebraConfig {
            width_max: width,
            ..Default::default()
        };
        let x = load_shape(str_arg(shape)?, cfg.degree_max)?;
        let r = creation_suite(&(*m).inner, &x, &cfg, DEFAULT_CHECK_DIM)?;
        give_string(serde_json::to_string(&r)?, out);
        Ok(verdict(r.status))
    })
}
