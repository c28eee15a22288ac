//! C interface to the `schauder` library.
//!
//! Elements, families and sets are opaque handles built from JSON and
//! released with their `_free` function. Every call returns a
//! [`SchauderStatus`]; on failure [`schauder_last_error`] describes it.
//! Strings handed out by the library must be released with
//! [`schauder_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use schauder::compactness::analyze_set;
use schauder::convergence::analyze;
use schauder::{CheckConfig, Decider, Error, Family, SeqElement, SetDescriptor, Slack};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchauderStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Undetermined = 5,
    Panic = 6,
}

/// Verdict codes, matching the command-line exit statuses.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchauderVerdict {
    /// Converges, or precompact.
    Positive = 0,
    /// Diverges, or not precompact.
    Negative = 1,
    Inconclusive = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchauderDecider {
    General = 0,
    Lp = 1,
    C0 = 2,
    Hilbert = 3,
    C = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchauderInterval {
    pub lo: f64,
    pub hi: f64,
}

pub struct SchauderElement(SeqElement);
pub struct SchauderFamily(Family);
pub struct SchauderSet(SetDescriptor);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SchauderStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Undetermined { .. } => SchauderStatus::Undetermined,
            _ => SchauderStatus::Validation,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        let status = if e.is_data() {
            SchauderStatus::Validation
        } else {
            SchauderStatus::Parse
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SchauderStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SchauderStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            SchauderStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(SchauderStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(SchauderStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn slack_or_default(slack: f64) -> Result<Slack, Failure> {
    if slack > 0.0 {
        Ok(Slack::new(slack)?)
    } else {
        Ok(Slack::DEFAULT)
    }
}

unsafe fn read_config(p: *const c_char) -> Result<CheckConfig, Failure> {
    if p.is_null() {
        return Ok(CheckConfig::default());
    }
    let config: CheckConfig = serde_json::from_str(read_str(p, "config")?)?;
    config.validate()?;
    Ok(config)
}

unsafe fn from_json<T: serde::de::DeserializeOwned, H>(
    json: *const c_char,
    out: *mut *mut H,
    wrap: impl FnOnce(T) -> H,
) -> SchauderStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let value: T = serde_json::from_str(read_str(json, "json")?)?;
        *out = Box::into_raw(Box::new(wrap(value)));
        Ok(())
    })
}

/// Message describing the last failure on this thread, or null. Valid until
/// the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn schauder_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn schauder_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn schauder_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schauder_element_from_json(
    json: *const c_char,
    out: *mut *mut SchauderElement,
) -> SchauderStatus {
    from_json(json, out, SchauderElement)
}

/// # Safety
/// `element` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn schauder_element_free(element: *mut SchauderElement) {
    if !element.is_null() {
        drop(Box::from_raw(element));
    }
}

/// # Safety
/// `element` must be a live handle; `out` must be writable. The string
/// written to `out` is released with `schauder_string_free`.
#[no_mangle]
pub unsafe extern "C" fn schauder_element_to_json(
    element: *const SchauderElement,
    out: *mut *mut c_char,
) -> SchauderStatus {
    guard(|| {
        let x = borrow(element, "element")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = into_c_string(serde_json::to_string(&x.0)?);
        Ok(())
    })
}

/// Enclosure of `||x||`. A nonpositive `slack` selects the default.
///
/// # Safety
/// `element` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schauder_element_norm(
    element: *const SchauderElement,
    slack: f64,
    out: *mut SchauderInterval,
) -> SchauderStatus {
    guard(|| {
        let x = borrow(element, "element")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let b = x.0.norm_bounds(slack_or_default(slack)?);
        *out = SchauderInterval { lo: b.lo, hi: b.hi };
        Ok(())
    })
}

/// Enclosure of `||R_K x||`.
///
/// # Safety
/// `element` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schauder_element_tail_norm(
    element: *const SchauderElement,
    k: usize,
    slack: f64,
    out: *mut SchauderInterval,
) -> SchauderStatus {
    guard(|| {
        let x = borrow(element, "element")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let b = x.0.tail_norm_bounds(k, slack_or_default(slack)?);
        *out = SchauderInterval { lo: b.lo, hi: b.hi };
        Ok(())
    })
}

/// Enclosure of the coordinate `c_k(x)`; `k = 0` is the limit in `c`.
///
/// # Safety
/// `element` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schauder_element_coordinate(
    element: *const SchauderElement,
    k: usize,
    out: *mut SchauderInterval,
) -> SchauderStatus {
    guard(|| {
        let x = borrow(element, "element")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let c = x.0.coordinate(k)?;
        *out = SchauderInterval { lo: c.lo, hi: c.hi };
        Ok(())
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schauder_family_from_json(
    json: *const c_char,
    out: *mut *mut SchauderFamily,
) -> SchauderStatus {
    from_json(json, out, SchauderFamily)
}

/// # Safety
/// `family` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn schauder_family_free(family: *mut SchauderFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn schauder_set_from_json(json: *const c_char, out: *mut *mut SchauderSet) -> SchauderStatus {
    from_json(json, out, SchauderSet)
}

/// # Safety
/// `set` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn schauder_set_free(set: *mut SchauderSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

unsafe fn write_outputs(
    verdict_out: *mut SchauderVerdict,
    report_out: *mut *mut c_char,
    verdict: SchauderVerdict,
    report: String,
) {
    if let Some(v) = verdict_out.as_mut() {
        *v = verdict;
    }
    if !report_out.is_null() {
        *report_out = into_c_string(report);
    }
}

/// Decides whether `family` converges to `candidate`. `config_json` may be
/// null for the defaults. The JSON report written to `report_out` (if not
/// null) is released with `schauder_string_free`.
///
/// # Safety
/// Handles must be live; `config_json` null or NUL-terminated; output
/// pointers null or writable.
#[no_mangle]
pub unsafe extern "C" fn schauder_decide_convergence(
    family: *const SchauderFamily,
    candidate: *const SchauderElement,
    decider: SchauderDecider,
    config_json: *const c_char,
    verdict_out: *mut SchauderVerdict,
    report_out: *mut *mut c_char,
) -> SchauderStatus {
    guard(|| {
        let family = borrow(family, "family")?;
        let candidate = borrow(candidate, "candidate")?;
        let config = read_config(config_json)?;
        let decider = match decider {
            SchauderDecider::General => Decider::General,
            SchauderDecider::Lp => Decider::Lp,
            SchauderDecider::C0 => Decider::C0,
            SchauderDecider::Hilbert => Decider::Hilbert,
            SchauderDecider::C => Decider::C,
        };
        let report = analyze(decider, &family.0, &candidate.0, &config)?;
        let verdict = match report.verdict.tag() {
            "converges" => SchauderVerdict::Positive,
            "diverges" => SchauderVerdict::Negative,
            _ => SchauderVerdict::Inconclusive,
        };
        write_outputs(verdict_out, report_out, verdict, serde_json::to_string(&report)?);
        Ok(())
    })
}

/// Decides whether `set` is precompact.
///
/// # Safety
/// As for `schauder_decide_convergence`.
#[no_mangle]
pub unsafe extern "C" fn schauder_check_precompact(
    set: *const SchauderSet,
    config_json: *const c_char,
    verdict_out: *mut SchauderVerdict,
    report_out: *mut *mut c_char,
) -> SchauderStatus {
    guard(|| {
        let set = borrow(set, "set")?;
        let config = read_config(config_json)?;
        let report = analyze_set(&set.0, &config)?;
        let verdict = match report.verdict.tag() {
            "precompact" => SchauderVerdict::Positive,
            "not_precompact" => SchauderVerdict::Negative,
            _ => SchauderVerdict::Inconclusive,
        };
        write_outputs(verdict_out, report_out, verdict, serde_json::to_string(&report)?);
        Ok(())
    })
}
