//! C ABI over the `hpkahler` core. Handles are opaque and owned by the
//! caller, who releases them with the matching `*_free`. Every entry point
//! returns an [`HpkStatus`]; on failure a message is available from
//! [`hpk_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hpkahler::verifier::{self, VerificationConfig, VerificationReport};
use hpkahler::{Error, OdeTolerances, Profile, ProfileSolution};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HpkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    PositivityViolation = 3,
    InvalidProfile = 4,
    NumericalFailure = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// A solved profile `h` on `[-L/4, 5L/4]`.
pub struct HpkProfile {
    inner: ProfileSolution,
}

/// A verification report for one `(α, n)`.
pub struct HpkReport {
    inner: VerificationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HpkStatus {
    match e {
        Error::PositivityViolation { .. } => HpkStatus::PositivityViolation,
        Error::InvalidProfile(_) => HpkStatus::InvalidProfile,
        Error::OutOfRange { .. } => HpkStatus::OutOfRange,
        Error::Config(_) | Error::DimensionMismatch { .. } => HpkStatus::InvalidArgument,
        Error::AtPoint { source, .. } => status_of(source),
        _ => HpkStatus::NumericalFailure,
    }
}

fn guard(f: impl FnOnce() -> Result<(), HpkStatus>) -> HpkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HpkStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            HpkStatus::Panic
        }
    }
}

fn fail(e: Error) -> HpkStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> HpkStatus {
    set_error(format!("{what} is null"));
    HpkStatus::NullPointer
}

fn solve(profile: Result<Profile, Error>, out: *mut *mut HpkProfile) -> HpkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let sol = profile
            .and_then(|p| ProfileSolution::solve(&p, &OdeTolerances::default()))
            .map_err(fail)?;
        // SAFETY: `out` is non-null and points to writable storage per the contract.
        unsafe { *out = Box::into_raw(Box::new(HpkProfile { inner: sol })) };
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hpk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hpk_version() -> *const c_char {
    static V: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(c) => c,
            Err(_) => c"",
        };
    V.as_ptr()
}

/// Solves the profile ODE for the family member `P_α`.
///
/// # Safety
/// `out` must be null or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn hpk_profile_solve_alpha(
    alpha: f64,
    out: *mut *mut HpkProfile,
) -> HpkStatus {
    solve(Profile::p_alpha(alpha), out)
}

/// Solves the profile ODE for raw ascending coefficients.
///
/// # Safety
/// `coeffs` must point to `len` readable doubles; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn hpk_profile_solve_coeffs(
    coeffs: *const f64,
    len: usize,
    out: *mut *mut HpkProfile,
) -> HpkStatus {
    if coeffs.is_null() {
        return null("coeffs");
    }
    let c = std::slice::from_raw_parts(coeffs, len).to_vec();
    let p = Profile::from_coeffs(c);
    let outcome = p.validate();
    let checked = if outcome.passed() {
        Ok(p)
    } else if let Some(w) = outcome.witness {
        Err(Error::PositivityViolation {
            witness_t: w,
            value: p.eval(w),
        })
    } else {
        let failed: Vec<_> = outcome
            .clauses
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.clone())
            .collect();
        Err(Error::InvalidProfile(failed.join(", ")))
    };
    solve(checked, out)
}

/// Writes `L` to `out`.
///
/// # Safety
/// `p` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hpk_profile_length(p: *const HpkProfile, out: *mut f64) -> HpkStatus {
    if p.is_null() {
        return null("profile");
    }
    if out.is_null() {
        return null("out");
    }
    *out = (*p).inner.length();
    HpkStatus::Ok
}

/// Evaluates `h, h', f, φ` at `t ∈ [-L/4, 5L/4]`. Any output pointer may be
/// null to skip it.
///
/// # Safety
/// `p` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn hpk_profile_eval(
    p: *const HpkProfile,
    t: f64,
    h: *mut f64,
    hp: *mut f64,
    f: *mut f64,
    phi: *mut f64,
) -> HpkStatus {
    if p.is_null() {
        return null("profile");
    }
    let sol = &(*p).inner;
    guard(|| {
        let [hv, hpv] = sol.state(t).map_err(fail)?;
        let vals = [
            (h, hv),
            (hp, hpv),
            (f, hv * hpv),
            (phi, sol.phi_at_height(hv)),
        ];
        for (ptr, v) in vals {
            if !ptr.is_null() {
                // SAFETY: non-null outputs are writable per the contract.
                unsafe { *ptr = v };
            }
        }
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hpk_profile_free(p: *mut HpkProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Runs the full verification for `(α, n)` with default tolerances.
///
/// # Safety
/// `out` must be null or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn hpk_verify(
    alpha: f64,
    n: usize,
    samples_t: usize,
    samples_base: usize,
    seed: u64,
    out: *mut *mut HpkReport,
) -> HpkStatus {
    if out.is_null() {
        return null("out");
    }
    guard(|| {
        let mut cfg = VerificationConfig::new(alpha, n);
        cfg.samples_t = samples_t;
        cfg.samples_base = samples_base;
        cfg.seed = seed;
        let r = verifier::run_verification(&cfg).map_err(fail)?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(HpkReport { inner: r })) };
        Ok(())
    })
}

/// Writes whether every check passed.
///
/// # Safety
/// `r` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hpk_report_passed(r: *const HpkReport, out: *mut bool) -> HpkStatus {
    if r.is_null() {
        return null("report");
    }
    if out.is_null() {
        return null("out");
    }
    *out = (*r).inner.passed();
    HpkStatus::Ok
}

/// Largest residual of the named check (for example `"hp"`).
///
/// # Safety
/// `r` must be a live handle, `name` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hpk_report_check_max(
    r: *const HpkReport,
    name: *const c_char,
    out: *mut f64,
) -> HpkStatus {
    if r.is_null() {
        return null("report");
    }
    if name.is_null() {
        return null("name");
    }
    if out.is_null() {
        return null("out");
    }
    let Ok(name) = CStr::from_ptr(name).to_str() else {
        set_error("check name is not UTF-8".into());
        return HpkStatus::InvalidArgument;
    };
    match (*r).inner.check(name) {
        Some(c) => {
            *out = c.max;
            HpkStatus::Ok
        }
        None => {
            set_error(format!("no check named {name}"));
            HpkStatus::InvalidArgument
        }
    }
}

/// Serializes the report as JSON. Release the string with [`hpk_string_free`].
///
/// # Safety
/// `r` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hpk_report_json(r: *const HpkReport, out: *mut *mut c_char) -> HpkStatus {
    if r.is_null() {
        return null("report");
    }
    if out.is_null() {
        return null("out");
    }
    let json = hpkahler::report::render_report(&(*r).inner, hpkahler::report::Format::Json);
    match CString::new(json) {
        Ok(c) => {
            *out = c.into_raw();
            HpkStatus::Ok
        }
        Err(_) => {
            set_error("report contains NUL".into());
            HpkStatus::NumericalFailure
        }
    }
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hpk_report_free(r: *mut HpkReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hpk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
