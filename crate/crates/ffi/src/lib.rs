//! C ABI over the core library.  Specs and elements travel as opaque handles,
//! every entry point returns a status code, and the last error message is kept
//! per thread for retrieval with [`vt_last_error`].  All functions catch
//! panics at the boundary.
//!
//! Memory contract: every `*_new`/`*_parse`/output-handle function transfers
//! ownership to the caller, who must release it with the matching `vt_*_free`;
//! strings returned through `char**` are released with [`vt_string_free`].
//! Handles are not thread-safe; guard them externally when sharing.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use virtensor::analysis::rank_invariant;
use virtensor::certify::{certify_irreducible, replay};
use virtensor::element::{format_element, parse_element};
use virtensor::rational::rat;
use virtensor::specfile::{spec_from_json, spec_to_json};
use virtensor::suites::{run_suite, Bounds, Suite};
use virtensor::sweep::bracket_box_check;
use virtensor::tensor::{act, enumerate_box, omega_op, TensorElement, TensorSpec};
use virtensor::Error;

/// Status of a call. Anything other than `Ok` leaves a message for
/// [`vt_last_error`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VtStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Spec JSON or element text failed to parse.
    Parse = 3,
    /// Structurally valid input describing an invalid module.
    BadModuleData = 4,
    /// A hypothesis of the requested computation does not hold here.
    Hypothesis = 5,
    /// Certification or verification found a genuine failure.
    Failed = 6,
    /// Any other computational error.
    Compute = 7,
    /// The call panicked; the library state is still usable.
    Panic = 8,
}

/// Opaque module description: the factor list and the optional
/// highest-weight factor.
pub struct VtSpec(TensorSpec);

/// Opaque element of the tensor module a spec describes.
pub struct VtElement(TensorElement);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: Vec<u8> = msg.bytes().map(|b| if b == 0 { b' ' } else { b }).collect();
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).expect("NUL bytes stripped");
    });
}

fn status_of(err: &Error) -> VtStatus {
    match err {
        Error::Parse { .. } | Error::Json(_) => VtStatus::Parse,
        Error::BadModuleData(_) | Error::Io(_) => VtStatus::BadModuleData,
        Error::Hypothesis(_) => VtStatus::Hypothesis,
        Error::CertificationFailed(_) => VtStatus::Failed,
        _ => VtStatus::Compute,
    }
}

fn fail(err: &Error) -> VtStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Runs `body` with panics converted to `VtStatus::Panic`.
fn guarded(body: impl FnOnce() -> VtStatus) -> VtStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic with non-string payload".into());
            set_error(&msg);
            VtStatus::Panic
        }
    }
}

/// # Safety contract helpers
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, VtStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(VtStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        VtStatus::InvalidUtf8
    })
}

unsafe fn read_handle<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, VtStatus> {
    if ptr.is_null() {
        set_error(&format!("null {name} handle"));
        return Err(VtStatus::NullArgument);
    }
    Ok(&*ptr)
}

fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), VtStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(VtStatus::NullArgument);
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

fn write_string(out: *mut *mut c_char, value: String) -> Result<(), VtStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(VtStatus::NullArgument);
    }
    let sanitized: Vec<u8> = value.bytes().map(|b| if b == 0 { b' ' } else { b }).collect();
    let c = CString::new(sanitized).expect("NUL bytes stripped");
    unsafe { *out = c.into_raw() };
    Ok(())
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// ABI revision; bump on any breaking change to this surface.
#[no_mangle]
pub extern "C" fn vt_abi_version() -> u32 {
    1
}

/// Message for the most recent non-`Ok` status on this thread.  The pointer
/// stays valid until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn vt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string obtained from any `vt_*` output parameter.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn vt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a spec handle from its JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vt_spec_from_json(json: *const c_char, out: *mut *mut VtSpec) -> VtStatus {
    guarded(|| {
        let text = try_ffi!(read_str(json));
        match spec_from_json(text) {
            Ok(spec) => {
                try_ffi!(write_out(out, VtSpec(spec)));
                VtStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Serializes a spec back to its JSON document.
///
/// # Safety
/// `spec` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vt_spec_to_json(spec: *const VtSpec, out: *mut *mut c_char) -> VtStatus {
    guarded(|| {
        let spec = try_ffi!(read_handle(spec, "spec"));
        try_ffi!(write_string(out, spec_to_json(&spec.0)));
        VtStatus::Ok
    })
}

/// # Safety
/// `spec` must come from `vt_spec_from_json` and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn vt_spec_free(spec: *mut VtSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Parses an element expression (grammar in the README) against a spec.
///
/// # Safety
/// `spec` must be a live handle, `text` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn vt_element_parse(
    spec: *const VtSpec,
    text: *const c_char,
    out: *mut *mut VtElement,
) -> VtStatus {
    guarded(|| {
        let spec = try_ffi!(read_handle(spec, "spec"));
        let text = try_ffi!(read_str(text));
        match parse_element(text, &spec.0) {
            Ok(f) => {
                try_ffi!(write_out(out, VtElement(f)));
                VtStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Canonical text of an element.
///
/// # Safety
/// `spec` and `element` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vt_element_format(
    spec: *const VtSpec,
    element: *const VtElement,
    out: *mut *mut c_char,
) -> VtStatus {
    guarded(|| {
        let spec = try_ffi!(read_handle(spec, "spec"));
        let element = try_ffi!(read_handle(element, "element"));
        try_ffi!(write_string(out, format_element(&element.0, &spec.0)));
        VtStatus::Ok
    })
}

/// # Safety
/// `element` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn vt_element_free(element: *mut VtElement) {
    if !element.is_null() {
        drop(Box::from_raw(element));
    }
}

/// `d_k` applied to an element; writes a new handle.
///
/// # Safety
/// `spec` and `element` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vt_act(
    spec: *const VtSpec,
    k: i64,
    element: *const VtElement,
    out: *mut *mut VtElement,
) -> VtStatus {
    guarded(|| {
        let spec = try_ffi!(read_handle(spec, "spec"));
        let element = try_ffi!(read_handle(element, "element"));
        match act(&spec.0, k, &element.0) {
            Ok(g) => {
                try_ffi!(write_out(out, VtElement(g)));
                VtStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// The alternating quadratic operator `ω^(s)_{l,m}` applied to an element.
///
/// # Safety
/// `spec` and `element` must be live handles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vt_omega(
    spec: *const VtSpec,
    s: u32,
    l: i64,
    m: i64,
    element: *const VtElement,
    out: *mut *mut VtElement,
) -> VtStatus {
    guarded(|| {
        let spec = try_ffi!(read_handle(spec, "spec"));
        let element = try_ffi!(read_handle(element, "element"));
        match omega_op(&spec.0, s, l, m, &element.0) {
            Ok(g) => {
                try_ffi!(write_out(out, VtElement(g)));
                VtStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Stabilized rank of `{d_k f : k > K}`; `stabilized` reports whether the
/// value was unchanged over a shifted window.
///
/// # Safety
/// `spec` and `element` must be live handles; `rank` and `stabilized` must be
/// valid pointers.
#[no_mangle]
pub unsafe extern "C" fn vt_rank(
    spec: *const VtSpec,
    element: *const VtElement,
    rank: *mut u64,
    stabilized: *mut bool,
) -> VtStatus {
    guarded(|| {
        let spec = try_ffi!(read_handle(spec, "spec"));
        let element = try_ffi!(read_handle(element, "element"));
        if rank.is_null() || stabilized.is_null() {
            set_error("null output pointer");
            return VtStatus::NullArgument;
        }
        match rank_invariant(&spec.0, &element.0) {
            Ok(rr) => {
                *rank = rr.value as u64;
                *stabilized = rr.stabilized;
                VtStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Produces an irreducibility certificate for `element` with the given bounds
/// and replays it.  `Ok` means certified and replayed exactly;
/// `Hypothesis` means the spec is outside the certifiable regime.
///
/// # Safety
/// `spec` and `element` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn vt_certify(
    spec: *const VtSpec,
    element: *const VtElement,
    degree: u32,
    level: u32,
) -> VtStatus {
    guarded(|| {
        let spec = try_ffi!(read_handle(spec, "spec"));
        let element = try_ffi!(read_handle(element, "element"));
        match certify_irreducible(&spec.0, &element.0, degree, level)
            .and_then(|cert| replay(&spec.0, &cert, &element.0))
        {
            Ok(()) => VtStatus::Ok,
            Err(e) => fail(&e),
        }
    })
}

/// Verifies the defining relation `[d_i,d_j] = (j−i)d_{i+j} +
/// δ_{i,−j}((i³−i)/12)c` on every basis vector with slot exponents ≤
/// `max_exp`, V-level ≤ `max_level`, and induced tails below `tails`, for all
/// pairs in `[−window, window]`.  Returns `Failed` with a witness message if
/// any defect is nonzero.
///
/// # Safety
/// `spec` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn vt_check_relations(
    spec: *const VtSpec,
    window: i64,
    max_exp: u32,
    max_level: u32,
    tails: u32,
) -> VtStatus {
    guarded(|| {
        let spec = try_ffi!(read_handle(spec, "spec"));
        let basis = enumerate_box(&spec.0, max_exp, max_level, tails);
        match bracket_box_check(&spec.0, &basis, window) {
            Ok(None) => VtStatus::Ok,
            Ok(Some(cx)) => {
                set_error(&format!(
                    "defining relation fails at (i, j) = ({}, {}) on {}",
                    cx.i,
                    cx.j,
                    format_element(&TensorElement::from_monomial(cx.monomial, rat(1)), &spec.0)
                ));
                VtStatus::Failed
            }
            Err(e) => fail(&e),
        }
    })
}

/// Runs a verification suite (`bracket`, `determinant`, `submodule`,
/// `quotient`, `extraction`, `rank`, `irreducible`, `omega`, `classify-self`,
/// or `all`) and writes the JSON report.  `Ok` covers reports with unknown
/// entries; `Failed` signals at least one failed check.
///
/// # Safety
/// `spec` must be a live handle, `suite` NUL-terminated, `report_json` valid.
#[no_mangle]
pub unsafe extern "C" fn vt_run_suite(
    spec: *const VtSpec,
    suite: *const c_char,
    seed: u64,
    max_index: i64,
    max_exp: u32,
    max_level: u32,
    samples: u32,
    report_json: *mut *mut c_char,
) -> VtStatus {
    guarded(|| {
        let spec = try_ffi!(read_handle(spec, "spec"));
        let name = try_ffi!(read_str(suite));
        let suite = match Suite::parse(name) {
            Ok(s) => s,
            Err(e) => return fail(&e),
        };
        let bounds = Bounds {
            max_index,
            max_exp,
            max_level,
            samples,
            ..Bounds::default()
        };
        let report = run_suite(&spec.0, suite, seed, &bounds);
        let code = report.exit_code();
        try_ffi!(write_string(report_json, report.to_json()));
        if code == 0 {
            VtStatus::Ok
        } else {
            set_error("at least one suite check failed; see the report");
            VtStatus::Failed
        }
    })
}
