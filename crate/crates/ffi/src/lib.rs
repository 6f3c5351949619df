//! C interface to `siegel-theta`.
//!
//! Forms and theta specifications are opaque handles. Every fallible call
//! returns an [`StStatus`]; on failure the message is available from
//! [`st_last_error_message`] on the same thread. Strings returned through
//! `char **` out-parameters are owned by the caller and released with
//! [`st_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nalgebra::DMatrix;
use siegel_theta::io::{basis_json, cosets_json, decomposition_json, parse_form};
use siegel_theta::quadform::{decompose, QuadForm};
use siegel_theta::siegel::SiegelPoint;
use siegel_theta::theta::{theta_eval, SpecFile, ThetaSpec};
use siegel_theta::verify::{run_suite, Suite, SuiteOptions};
use siegel_theta::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StStatus {
    Ok = 0,
    InvalidInput = 1,
    CheckFailed = 2,
    ResourceCap = 3,
    NullPointer = 4,
    Panic = 5,
}

/// Integral symmetric matrix `A` with nonzero determinant.
pub struct StForm {
    form: QuadForm,
}

/// Theta series data together with its default evaluation point.
pub struct StSpec {
    spec: ThetaSpec,
    z: SiegelPoint,
    eps: Option<f64>,
}

const DEFAULT_EPS: f64 = 1e-10;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type FfiResult<T> = std::result::Result<T, Failure>;

fn guard(f: impl FnOnce() -> FfiResult<()>) -> StStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            StStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            match e {
                Error::ResourceLimit(_) => StStatus::ResourceCap,
                _ => StStatus::InvalidInput,
            }
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            StStatus::NullPointer
        }
        Ok(Err(Failure::Check(msg))) => {
            set_error(&msg);
            StStatus::CheckFailed
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            StStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &'static str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Lib(Error::Parse(format!("{what} is not UTF-8"))))
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> FfiResult<&'a T> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write_out<T>(out: *mut T, v: T, what: &'static str) -> FfiResult<()> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> FfiResult<()> {
    let c = CString::new(s).map_err(|_| Failure::Lib(Error::Invalid("interior NUL in output".into())))?;
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = c.into_raw();
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> FfiResult<String> {
    Ok(serde_json::to_string(v).map_err(Error::from)?)
}

/// Message of the last call on this thread; empty after a successful call.
///
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn st_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn st_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Looks up a named form such as `"e8"`, `"h2"` or `"diag:2,-2"`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn st_form_from_name(name: *const c_char, out: *mut *mut StForm) -> StStatus {
    guard(|| {
        let form = QuadForm::from_name(read_str(name, "name")?)?;
        write_out(out, Box::into_raw(Box::new(StForm { form })), "out")
    })
}

/// Parses a form from JSON: a matrix, a name, or `{"A": ..}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn st_form_from_json(json: *const c_char, out: *mut *mut StForm) -> StStatus {
    guard(|| {
        let form = parse_form(read_str(json, "json")?)?;
        write_out(out, Box::into_raw(Box::new(StForm { form })), "out")
    })
}

/// # Safety
/// `form` must be null or a handle from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn st_form_free(form: *mut StForm) {
    if !form.is_null() {
        drop(Box::from_raw(form));
    }
}

/// Size of the matrix `A`.
///
/// # Safety
/// `form` must be a live handle and `dim` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn st_form_dim(form: *const StForm, dim: *mut usize) -> StStatus {
    guard(|| write_out(dim, deref(form, "form")?.form.dim(), "dim"))
}

/// Numbers of positive and negative eigenvalues of `A`.
///
/// # Safety
/// `form` must be a live handle; `r` and `s` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn st_form_signature(form: *const StForm, r: *mut usize, s: *mut usize) -> StStatus {
    guard(|| {
        let (rp, sp) = decompose(&deref(form, "form")?.form)?.signature();
        write_out(r, rp, "r")?;
        write_out(s, sp, "s")
    })
}

/// Splitting `A = A⁺ + A⁻` and majorant as a JSON document.
///
/// # Safety
/// `form` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn st_form_decompose_json(form: *const StForm, out: *mut *mut c_char) -> StStatus {
    guard(|| write_string(out, to_json(&decomposition_json(&deref(form, "form")?.form)?)?))
}

/// Coset representatives of `A⁻¹ℤ^{m×n} / ℤ^{m×n}` as a JSON document.
///
/// # Safety
/// `form` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn st_cosets_json(form: *const StForm, genus: usize, out: *mut *mut c_char) -> StStatus {
    guard(|| write_string(out, to_json(&cosets_json(&deref(form, "form")?.form, genus)?)?))
}

/// Basis of the homogeneous polynomials of degree `alpha` in an `m×n` matrix.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn st_basis_json(m: usize, n: usize, alpha: u32, out: *mut *mut c_char) -> StStatus {
    guard(|| write_string(out, to_json(&basis_json(m, n, alpha)?)?))
}

/// Builds a theta series from the same JSON document `siegel-theta eval` reads.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn st_spec_from_json(json: *const c_char, out: *mut *mut StSpec) -> StStatus {
    guard(|| {
        let file = SpecFile::parse(read_str(json, "json")?)?;
        let (spec, z) = file.build()?;
        write_out(out, Box::into_raw(Box::new(StSpec { spec, z, eps: file.eps })), "out")
    })
}

/// # Safety
/// `spec` must be null or a handle from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn st_spec_free(spec: *mut StSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

unsafe fn eval_into(
    spec: &StSpec,
    z: &SiegelPoint,
    eps: f64,
    re: *mut f64,
    im: *mut f64,
    tail: *mut f64,
) -> FfiResult<()> {
    let eps = if eps > 0.0 { eps } else { spec.eps.unwrap_or(DEFAULT_EPS) };
    let v = theta_eval(&spec.spec, z, eps)?;
    write_out(re, v.value.re, "re")?;
    write_out(im, v.value.im, "im")?;
    if !tail.is_null() {
        *tail = v.tail_bound;
    }
    Ok(())
}

/// Evaluates the series at the point stored in the handle.
///
/// A nonpositive `eps` selects the tolerance from the JSON document, or `1e-10`.
/// `tail_bound` may be null.
///
/// # Safety
/// `spec` must be a live handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn st_theta_eval(
    spec: *const StSpec,
    eps: f64,
    re: *mut f64,
    im: *mut f64,
    tail_bound: *mut f64,
) -> StStatus {
    guard(|| {
        let s = deref(spec, "spec")?;
        eval_into(s, &s.z, eps, re, im, tail_bound)
    })
}

/// Evaluates the series at `Z = X + iY`, both given row-major as `n×n` arrays.
///
/// # Safety
/// `spec` must be a live handle; `x` and `y` must point to `n*n` doubles;
/// `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn st_theta_eval_at(
    spec: *const StSpec,
    n: usize,
    x: *const f64,
    y: *const f64,
    eps: f64,
    re: *mut f64,
    im: *mut f64,
    tail_bound: *mut f64,
) -> StStatus {
    guard(|| {
        let s = deref(spec, "spec")?;
        if x.is_null() || y.is_null() {
            return Err(Failure::Null("x, y"));
        }
        let len = n.checked_mul(n).ok_or(Failure::Lib(Error::Invalid("genus too large".into())))?;
        let xm = DMatrix::from_row_slice(n, n, std::slice::from_raw_parts(x, len));
        let ym = DMatrix::from_row_slice(n, n, std::slice::from_raw_parts(y, len));
        eval_into(s, &SiegelPoint::new(xm, ym)?, eps, re, im, tail_bound)
    })
}

/// Runs a verification suite and writes its reports as a JSON array.
///
/// `form` may be null for the built-in forms and `genus` zero for the default
/// genera. Returns `CheckFailed` when any report fails; the array is still
/// written.
///
/// # Safety
/// `suite` must be a NUL-terminated string, `form` null or a live handle,
/// and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn st_verify_suite_json(
    suite: *const c_char,
    form: *const StForm,
    genus: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> StStatus {
    guard(|| {
        let suite: Suite = read_str(suite, "suite")?.parse()?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let opts = SuiteOptions {
            form: form.as_ref().map(|f| f.form.clone()),
            genus: (genus > 0).then_some(genus),
            seed,
        };
        let reports = run_suite(suite, &opts);
        write_string(out, to_json(&reports)?)?;
        let failed = reports.iter().filter(|r| !r.passed).count();
        if failed > 0 {
            return Err(Failure::Check(format!("{failed} of {} checks failed", reports.len())));
        }
        Ok(())
    })
}

