//! C interface to `dinat`.
//!
//! Every call returns a [`DinatStatus`]. On anything but `DINAT_STATUS_OK`
//! the reason can be read with [`dinat_last_error`] until the next call on the
//! same thread. Handles come back through out-pointers and are released with
//! [`dinat_transformation_free`]; strings with [`dinat_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dinat::cli::document::{self, Loaded};
use dinat::cli::{component_report, render, witness_json};
use dinat::dinat::{hcompose, witness, DinatError};
use dinat::finset_oracle::check_prediction;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DinatStatus {
    Ok = 0,
    /// A well-formed question with a negative answer: no witness exists or
    /// the oracle found a counterexample.
    Negative = 1,
    NullPointer = 2,
    InvalidUtf8 = 3,
    /// The JSON does not describe a valid transformation.
    InvalidDocument = 4,
    /// Out-of-range index, mismatched interfaces, missing semantics.
    InvalidArgument = 5,
    /// A bug on the Rust side; the message says where.
    Internal = 6,
}

/// Verdict for one connected component.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DinatCheck {
    pub acyclic: bool,
    /// The discriminant: acyclic and every constituent variable in the
    /// component is dinatural.
    pub guaranteed: bool,
}

/// A transformation together with the document it was loaded from.
pub struct DinatTransformation {
    loaded: Loaded,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail(DinatStatus, String);

impl From<DinatError> for Fail {
    fn from(e: DinatError) -> Self {
        Fail(DinatStatus::InvalidArgument, e.to_string())
    }
}

fn set_error(msg: Option<String>) {
    let c = msg.map(|m| CString::new(m.replace('\0', " ")).expect("no interior nul"));
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DinatStatus {
    set_error(None);
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(Fail(DinatStatus::Internal, msg))
    });
    match result {
        Ok(()) => DinatStatus::Ok,
        Err(Fail(status, msg)) => {
            set_error(Some(msg));
            status
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(DinatStatus::NullPointer, format!("{what} is null"))
}

unsafe fn handle<'a>(t: *const DinatTransformation, what: &str) -> Result<&'a DinatTransformation, Fail> {
    t.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Fail(DinatStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn give_handle(out: *mut *mut DinatTransformation, loaded: Loaded) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(DinatTransformation { loaded }));
    Ok(())
}

unsafe fn give_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    let c = CString::new(s).map_err(|e| Fail(DinatStatus::Internal, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

fn invalid_document(e: document::DocumentError) -> Fail {
    Fail(DinatStatus::InvalidDocument, e.to_string())
}

fn invalid_argument(e: impl ToString) -> Fail {
    Fail(DinatStatus::InvalidArgument, e.to_string())
}

/// Parses and checks a JSON document.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dinat_transformation_from_json(json: *const c_char, out: *mut *mut DinatTransformation) -> DinatStatus {
    guard(|| {
        let loaded = document::parse(text(json, "json")?).map_err(invalid_document)?;
        give_handle(out, loaded)
    })
}

/// # Safety
/// `t` must come from this library and not be used afterwards. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn dinat_transformation_free(t: *mut DinatTransformation) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// The document for `t`, with its graph, as pretty-printed JSON.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dinat_transformation_to_json(t: *const DinatTransformation, out: *mut *mut c_char) -> DinatStatus {
    guard(|| {
        let t = handle(t, "t")?;
        let l = &t.loaded;
        let full = document::to_document(&l.transformation, l.constituents.clone(), l.document.semantics.clone());
        give_string(out, document::to_json(&full))
    })
}

/// Number of variables, i.e. of connected components.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dinat_transformation_vars(t: *const DinatTransformation, out: *mut usize) -> DinatStatus {
    guard(|| {
        let t = handle(t, "t")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = t.loaded.transformation.vars();
        Ok(())
    })
}

/// The discriminant of `component` (1-based).
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dinat_transformation_delta(t: *const DinatTransformation, component: usize, out: *mut bool) -> DinatStatus {
    guard(|| {
        let t = handle(t, "t")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let delta = t.loaded.transformation.delta();
        if component == 0 || component > delta.len() {
            return Err(invalid_argument(format!("component {component} is outside 1..={}", delta.len())));
        }
        *out = delta[component - 1];
        Ok(())
    })
}

/// `second ∘ first`. Neither input is consumed.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dinat_vcompose(
    first: *const DinatTransformation,
    second: *const DinatTransformation,
    out: *mut *mut DinatTransformation,
) -> DinatStatus {
    guard(|| {
        let (a, b) = (handle(first, "first")?, handle(second, "second")?);
        let c = document::compose_loaded(&a.loaded, &b.loaded).map_err(invalid_argument)?;
        give_handle(out, c)
    })
}

/// Substitutes `first` into variable `var` (1-based) of `second`.
///
/// # Safety
/// Both handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dinat_hcompose(
    first: *const DinatTransformation,
    second: *const DinatTransformation,
    var: usize,
    out: *mut *mut DinatTransformation,
) -> DinatStatus {
    guard(|| {
        let (a, b) = (handle(first, "first")?, handle(second, "second")?);
        let h = hcompose(&a.loaded.transformation, &b.loaded.transformation, var)?;
        let loaded = document::load(document::to_document(&h, Vec::new(), None)).map_err(invalid_document)?;
        give_handle(out, loaded)
    })
}

/// Acyclicity and guarantee for `component` (1-based).
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dinat_check(t: *const DinatTransformation, component: usize, out: *mut DinatCheck) -> DinatStatus {
    guard(|| {
        let t = handle(t, "t")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = component_report(&t.loaded.transformation, component)?;
        *out = DinatCheck {
            acyclic: r.acyclic,
            guaranteed: r.guaranteed,
        };
        Ok(())
    })
}

/// The firing sequence proving `component` dinatural, as JSON. Returns
/// `DINAT_STATUS_NEGATIVE` when the component is cyclic or uses a
/// constituent variable that is not dinatural.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dinat_witness_json(t: *const DinatTransformation, component: usize, out: *mut *mut c_char) -> DinatStatus {
    guard(|| {
        let t = handle(t, "t")?;
        match witness(&t.loaded.transformation, component) {
            Ok(w) => give_string(out, serde_json::to_string_pretty(&witness_json(&w)).expect("json")),
            Err(e @ (DinatError::ComponentCyclic { .. } | DinatError::MissingDinaturality { .. })) => Err(Fail(DinatStatus::Negative, e.to_string())),
            Err(e) => Err(e.into()),
        }
    })
}

/// The graph as Graphviz DOT.
///
/// # Safety
/// `t` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dinat_render_dot(t: *const DinatTransformation, out: *mut *mut c_char) -> DinatStatus {
    guard(|| {
        let t = handle(t, "t")?;
        give_string(out, render::to_dot(&t.loaded.transformation))
    })
}

/// Brute-forces every guaranteed variable over sets of size up to
/// `max_size`. Returns `DINAT_STATUS_NEGATIVE` on a counterexample and
/// `DINAT_STATUS_INVALID_ARGUMENT` if the document has no semantics.
///
/// # Safety
/// `t` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dinat_oracle_check(t: *const DinatTransformation, max_size: usize) -> DinatStatus {
    guard(|| {
        let t = handle(t, "t")?;
        let ct = t
            .loaded
            .semantics()
            .map_err(invalid_document)?
            .ok_or_else(|| invalid_argument(format!("{} has no semantics attached", t.loaded.document.name)))?;
        let report = check_prediction(&t.loaded.transformation, &ct, max_size).map_err(invalid_argument)?;
        if report.all_pass() {
            Ok(())
        } else {
            let bad: Vec<String> = report.checked.iter().filter(|(_, r)| !r.passed()).map(|(i, _)| i.to_string()).collect();
            Err(Fail(DinatStatus::Negative, format!("counterexample in variable {}", bad.join(", "))))
        }
    })
}

/// Message for the last failed call on this thread, or null. Owned by the
/// library; valid until the next call.
#[no_mangle]
pub extern "C" fn dinat_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn dinat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
