//! C ABI over the qlaurent library.
//!
//! Handles are opaque pointers created and released through paired
//! new/free functions; every fallible call returns a [`QlStatus`] code and
//! leaves a human-readable message retrievable with
//! [`ql_last_error_message`]. Strings returned by the library must be
//! released with [`ql_string_free`].

use libc::{c_char, c_double, c_int};
use qlaurent::bases::{self, Family};
use qlaurent::laurent::LaurentPoly;
use qlaurent::params::ParameterSet;
use qlaurent::precision::PrecisionBudget;
use qlaurent::report::{self, SuiteKind, SuiteOptions};
use qlaurent::Error;
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::ptr;

/// Status codes for every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum QlStatus {
    Ok = 0,
    InvalidArgument = 1,
    DegenerateParameters = 2,
    PoleInSeries = 3,
    BalanceViolation = 4,
    NonTerminating = 5,
    InexactDivision = 6,
    NearSingularPoint = 7,
    NoConvergence = 8,
    InsufficientDecay = 9,
    DegenerateWeight = 10,
    DomainViolation = 11,
    /// One or more suite assertions failed; the CSV report is still
    /// returned.
    VerificationFailed = 12,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<Vec<u8>>) {
    let text = CString::new(message).unwrap_or_else(|_| CString::new("invalid message").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn status_from(err: &Error) -> QlStatus {
    match err {
        Error::InvalidParameters(_) => QlStatus::InvalidArgument,
        Error::DegenerateParameters(_) => QlStatus::DegenerateParameters,
        Error::PoleInSeries(_) => QlStatus::PoleInSeries,
        Error::BalanceViolation(_) => QlStatus::BalanceViolation,
        Error::NonTerminating => QlStatus::NonTerminating,
        Error::InexactDivision { .. } => QlStatus::InexactDivision,
        Error::NearSingularPoint => QlStatus::NearSingularPoint,
        Error::NoConvergence(_) => QlStatus::NoConvergence,
        Error::InsufficientDecay { .. } => QlStatus::InsufficientDecay,
        Error::DegenerateWeight(_) => QlStatus::DegenerateWeight,
        Error::DomainViolation(_) => QlStatus::DomainViolation,
    }
}

fn fail(err: Error) -> QlStatus {
    let code = status_from(&err);
    set_error(err.to_string());
    code
}

/// Opaque parameter handle: the tuple (q, t1..t4) at a working precision.
pub struct QlParams {
    params: ParameterSet,
    budget: PrecisionBudget,
}

/// Opaque Laurent polynomial handle.
pub struct QlPoly {
    poly: LaurentPoly,
}

/// Message for the most recent error on this thread, or NULL when the last
/// call succeeded. The pointer stays valid until the next failing call on
/// the same thread.
#[no_mangle]
pub extern "C" fn ql_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|s| s.as_ptr())
            .unwrap_or(ptr::null())
    })
}

/// Create a parameter handle for 0 < q < 1 and |t_i| < 1 at
/// `working_digits` decimal digits (minimum 30). On success writes the new
/// handle to `out`.
///
/// # Safety
/// `t` must point to four readable doubles and `out` to a writable pointer
/// slot.
#[no_mangle]
pub unsafe extern "C" fn ql_params_new(
    q: c_double,
    t: *const c_double,
    working_digits: u32,
    out: *mut *mut QlParams,
) -> QlStatus {
    if t.is_null() || out.is_null() {
        set_error("null pointer argument");
        return QlStatus::InvalidArgument;
    }
    let defaults = PrecisionBudget::default();
    let budget = match PrecisionBudget::new(
        working_digits,
        defaults.product_eps(),
        defaults.quad_nodes_initial(),
        defaults.quad_max_doublings(),
        defaults.verify_tol(),
    ) {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    let tv = std::slice::from_raw_parts(t, 4);
    let params = match ParameterSet::new(q, [tv[0], tv[1], tv[2], tv[3]], &budget) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    *out = Box::into_raw(Box::new(QlParams { params, budget }));
    QlStatus::Ok
}

/// Release a parameter handle. NULL is ignored.
///
/// # Safety
/// `handle` must be NULL or a pointer returned by [`ql_params_new`] that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ql_params_free(handle: *mut QlParams) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// The circle-weight normalization constant for this parameter set.
///
/// # Safety
/// `handle` must be a live parameter handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ql_mu(handle: *const QlParams, out: *mut c_double) -> QlStatus {
    if handle.is_null() || out.is_null() {
        set_error("null pointer argument");
        return QlStatus::InvalidArgument;
    }
    let h = &*handle;
    match qlaurent::qcore::aw_mu(&h.params, &h.budget) {
        Ok(v) => {
            *out = v.to_f64();
            QlStatus::Ok
        }
        Err(e) => fail(e),
    }
}

fn family_from_char(family: c_char) -> Option<Family> {
    match family as u8 {
        b'R' | b'r' => Some(Family::R),
        b'S' | b's' => Some(Family::S),
        b'T' | b't' => Some(Family::T),
        b'U' | b'u' => Some(Family::U),
        b'X' | b'x' => Some(Family::X),
        b'Y' | b'y' => Some(Family::Y),
        b'P' | b'p' => Some(Family::P),
        b'Q' | b'q' => Some(Family::PPrime),
        _ => None,
    }
}

/// Build one member of a polynomial family. `family` is one of
/// 'R','S','T','U','X','Y','P' (or 'Q' for the parameter-inverted partner of
/// 'P'); negative indices are valid for the X/Y/P families.
///
/// # Safety
/// `handle` must be a live parameter handle and `out` a writable pointer
/// slot.
#[no_mangle]
pub unsafe extern "C" fn ql_poly_build(
    handle: *const QlParams,
    family: c_char,
    index: i64,
    out: *mut *mut QlPoly,
) -> QlStatus {
    if handle.is_null() || out.is_null() {
        set_error("null pointer argument");
        return QlStatus::InvalidArgument;
    }
    let h = &*handle;
    let fam = match family_from_char(family) {
        Some(f) => f,
        None => {
            set_error("unknown family code");
            return QlStatus::InvalidArgument;
        }
    };
    match bases::build(bases::BasisId { family: fam, index }, &h.params, &h.budget) {
        Ok(poly) => {
            *out = Box::into_raw(Box::new(QlPoly { poly }));
            QlStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Release a polynomial handle. NULL is ignored.
///
/// # Safety
/// `handle` must be NULL or a pointer returned by [`ql_poly_build`] that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ql_poly_free(handle: *mut QlPoly) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Lowest stored exponent.
///
/// # Safety
/// `handle` must be a live polynomial handle.
#[no_mangle]
pub unsafe extern "C" fn ql_poly_min_exp(handle: *const QlPoly) -> i64 {
    (*handle).poly.min_exp()
}

/// Number of stored coefficients (zero for the zero polynomial).
///
/// # Safety
/// `handle` must be a live polynomial handle.
#[no_mangle]
pub unsafe extern "C" fn ql_poly_len(handle: *const QlPoly) -> usize {
    (*handle).poly.coeffs().len()
}

/// Coefficient on z^(min_exp + i), rounded to double precision.
///
/// # Safety
/// `handle` must be a live polynomial handle; `re` and `im` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ql_poly_coeff(
    handle: *const QlPoly,
    i: usize,
    re: *mut c_double,
    im: *mut c_double,
) -> QlStatus {
    if handle.is_null() || re.is_null() || im.is_null() {
        set_error("null pointer argument");
        return QlStatus::InvalidArgument;
    }
    let poly = &(*handle).poly;
    match poly.coeffs().get(i) {
        Some(c) => {
            *re = c.real().to_f64();
            *im = c.imag().to_f64();
            QlStatus::Ok
        }
        None => {
            set_error("coefficient index out of range");
            QlStatus::InvalidArgument
        }
    }
}

/// Full-precision JSON of the polynomial ({min_exp, digits, coeffs}).
/// The returned string must be released with [`ql_string_free`].
///
/// # Safety
/// `handle` must be a live polynomial handle.
#[no_mangle]
pub unsafe extern "C" fn ql_poly_to_json(handle: *const QlPoly) -> *mut c_char {
    if handle.is_null() {
        return ptr::null_mut();
    }
    let json = (*handle).poly.to_json().to_string();
    CString::new(json)
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from a qlaurent string-returning
/// function that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ql_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Run one verification suite and return its CSV report through `csv_out`
/// (release with [`ql_string_free`]). `suite` is one of the CLI suite names
/// ("cher-orthogonality", "operators", "recurrences", "connections",
/// "sears", "racah", "nonsymmetric", "aw-cross") or "selftest" for the
/// scalar identity battery. Returns `Ok` when every assertion passed,
/// `VerificationFailed` (with the report still written) otherwise.
///
/// # Safety
/// `handle` must be a live parameter handle, `suite` a NUL-terminated
/// string, and `csv_out` writable (it may be NULL to discard the report).
#[no_mangle]
pub unsafe extern "C" fn ql_verify_suite(
    handle: *const QlParams,
    suite: *const c_char,
    max_n: u32,
    racah_n: u32,
    racah_pair: u32,
    csv_out: *mut *mut c_char,
) -> QlStatus {
    if handle.is_null() || suite.is_null() {
        set_error("null pointer argument");
        return QlStatus::InvalidArgument;
    }
    let h = &*handle;
    let name = match CStr::from_ptr(suite).to_str() {
        Ok(s) => s,
        Err(_) => {
            set_error("suite name is not valid UTF-8");
            return QlStatus::InvalidArgument;
        }
    };
    let opts = SuiteOptions {
        max_n: max_n.max(1),
        racah_n: racah_n.max(1),
        racah_pair: racah_pair.clamp(3, 4) as u8,
        ..SuiteOptions::default()
    };
    let rows = if name == "selftest" {
        report::selftest_battery(&h.budget, &opts)
    } else {
        match SuiteKind::parse(name) {
            Some(kind) => report::run_suite(kind, &h.params, &h.budget, &opts),
            None => {
                set_error("unknown suite name");
                return QlStatus::InvalidArgument;
            }
        }
    };
    match rows {
        Ok(rows) => {
            if !csv_out.is_null() {
                let csv = report::to_csv(&rows);
                *csv_out = CString::new(csv)
                    .map(CString::into_raw)
                    .unwrap_or(ptr::null_mut());
            }
            let failures = report::failures(&rows);
            if failures.is_empty() {
                QlStatus::Ok
            } else {
                set_error(format!(
                    "{} of {} checks failed; first: {}",
                    failures.len(),
                    rows.len(),
                    failures[0].anchor
                ));
                QlStatus::VerificationFailed
            }
        }
        Err(e) => fail(e),
    }
}

/// Number of suites reachable through [`ql_verify_suite`], excluding the
/// battery.
#[no_mangle]
pub extern "C" fn ql_suite_count() -> c_int {
    SuiteKind::ALL.len() as c_int
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> *mut QlParams {
        let t = [0.4, -0.3, 0.25, -0.15];
        let mut out: *mut QlParams = ptr::null_mut();
        let status = unsafe { ql_params_new(0.35, t.as_ptr(), 60, &mut out) };
        assert_eq!(status, QlStatus::Ok);
        out
    }

    #[test]
    fn params_round_trip_and_mu() {
        let h = params();
        let mut mu = 0.0f64;
        assert_eq!(unsafe { ql_mu(h, &mut mu) }, QlStatus::Ok);
        // frozen from the independent circle-quadrature route
        assert!((mu - 0.8080612438).abs() < 1e-9);
        unsafe { ql_params_free(h) };
    }

    #[test]
    fn rejects_bad_parameters() {
        let t = [1.4, 0.3, 0.25, 0.15];
        let mut out: *mut QlParams = ptr::null_mut();
        let status = unsafe { ql_params_new(0.35, t.as_ptr(), 60, &mut out) };
        assert_eq!(status, QlStatus::InvalidArgument);
        let msg = ql_last_error_message();
        assert!(!msg.is_null());
        let text = unsafe { CStr::from_ptr(msg) }.to_str().unwrap();
        assert!(text.contains("t1"));
    }

    #[test]
    fn poly_accessors() {
        let h = params();
        let mut poly: *mut QlPoly = ptr::null_mut();
        let status = unsafe { ql_poly_build(h, b'U' as c_char, 1, &mut poly) };
        assert_eq!(status, QlStatus::Ok);
        unsafe {
            assert_eq!(ql_poly_min_exp(poly), -1);
            assert_eq!(ql_poly_len(poly), 3);
            let (mut re, mut im) = (0.0, 0.0);
            assert_eq!(ql_poly_coeff(poly, 0, &mut re, &mut im), QlStatus::Ok);
            assert!((re - 1.0).abs() < 1e-12); // U_1 starts with 1/z
            assert_eq!(im, 0.0);
            assert_eq!(
                ql_poly_coeff(poly, 7, &mut re, &mut im),
                QlStatus::InvalidArgument
            );
            let json = ql_poly_to_json(poly);
            assert!(!json.is_null());
            let text = CStr::from_ptr(json).to_str().unwrap().to_string();
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert_eq!(v["min_exp"], serde_json::json!(-1));
            ql_string_free(json);
            ql_poly_free(poly);
            ql_params_free(h);
        }
    }

    #[test]
    fn negative_index_family() {
        let h = params();
        let mut poly: *mut QlPoly = ptr::null_mut();
        let status = unsafe { ql_poly_build(h, b'X' as c_char, -2, &mut poly) };
        assert_eq!(status, QlStatus::Ok);
        unsafe {
            // X_-2 spans z^-2 .. z^1 (the top power cancels)
            assert_eq!(ql_poly_min_exp(poly), -2);
            assert_eq!(ql_poly_len(poly), 4);
            ql_poly_free(poly);
        }
        // Y_-2 instead drops the bottom power
        let mut ypoly: *mut QlPoly = ptr::null_mut();
        let status = unsafe { ql_poly_build(h, b'Y' as c_char, -2, &mut ypoly) };
        assert_eq!(status, QlStatus::Ok);
        unsafe {
            assert_eq!(ql_poly_min_exp(ypoly), -1);
            ql_poly_free(ypoly);
            ql_params_free(h);
        }
    }

    #[test]
    fn verify_small_suite_through_abi() {
        let h = params();
        let suite = CString::new("connections").unwrap();
        let mut csv: *mut c_char = ptr::null_mut();
        let status = unsafe { ql_verify_suite(h, suite.as_ptr(), 2, 2, 3, &mut csv) };
        assert_eq!(status, QlStatus::Ok);
        let text = unsafe { CStr::from_ptr(csv) }.to_str().unwrap();
        assert!(text.starts_with("suite,identity_anchor"));
        assert!(text.contains("Prop 2.1"));
        unsafe {
            ql_string_free(csv);
            ql_params_free(h);
        }
    }

    #[test]
    fn unknown_suite_is_invalid() {
        let h = params();
        let suite = CString::new("bogus").unwrap();
        let status = unsafe { ql_verify_suite(h, suite.as_ptr(), 2, 2, 3, ptr::null_mut()) };
        assert_eq!(status, QlStatus::InvalidArgument);
        unsafe { ql_params_free(h) };
    }
}
