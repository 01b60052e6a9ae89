//! C interface to the zetamill engine.
//!
//! Objects are passed as opaque handles created by `zm_*_new`/`zm_*_parse`
//! functions and released with the matching `zm_*_free`. Every fallible call
//! returns a [`ZmStatus`]; on failure a description is available from
//! [`zm_last_error`] on the same thread. Strings returned by the library
//! must be released with [`zm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use zetamill::counting;
use zetamill::ffield::FieldDesc;
use zetamill::lattice::LatticePolytope;
use zetamill::laurent::LaurentPoly;
use zetamill::regularity::{is_delta_regular, RegularityVerdict};
use zetamill::zetareconstruct::{recurrence_reconstruct, ZetaFactorization};
use zetamill::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    CapExceeded = 3,
    Inconsistent = 4,
    InvalidUtf8 = 5,
    Overflow = 6,
    Panic = 7,
}

/// A finite field `F_{p^k}`.
pub struct ZmField(FieldDesc);
/// A Laurent polynomial over a finite field.
pub struct ZmPoly(LaurentPoly);
/// A lattice polytope.
pub struct ZmPolytope(LatticePolytope);
/// A rational zeta function `numerator / denominator`.
pub struct ZmZeta(ZetaFactorization);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ZmStatus {
    match e.exit_code() {
        3 => ZmStatus::CapExceeded,
        4 => ZmStatus::Inconsistent,
        _ => ZmStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<(), ZmStatus>) -> ZmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ZmStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            ZmStatus::Panic
        }
    }
}

fn fail(e: Error) -> ZmStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, ZmStatus> {
    if s.is_null() {
        set_error("null string argument".into());
        return Err(ZmStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not UTF-8".into());
        ZmStatus::InvalidUtf8
    })
}

unsafe fn obj<'a, T>(p: *const T) -> Result<&'a T, ZmStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle".into());
        ZmStatus::NullPointer
    })
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), ZmStatus> {
    if out.is_null() {
        set_error("null output pointer".into());
        return Err(ZmStatus::NullPointer);
    }
    out.write(v);
    Ok(())
}

fn string_out(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failed call on this thread, or null. Owned by the
/// library and valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn zm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn zm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates the field `F_{p^k}` with its canonical modulus.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zm_field_new(p: u64, k: u32, out: *mut *mut ZmField) -> ZmStatus {
    guard(|| {
        let f = FieldDesc::new(p, k as usize).map_err(fail)?;
        put(out, Box::into_raw(Box::new(ZmField(f))))
    })
}

/// # Safety
/// `f` must come from [`zm_field_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn zm_field_free(f: *mut ZmField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Parses a Laurent polynomial in `x1..x<nvars>` such as `"x1 + x2 - 3"`.
///
/// # Safety
/// `field` must be a live handle, `text` a NUL-terminated string and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zm_poly_parse(
    field: *const ZmField,
    text: *const c_char,
    nvars: u32,
    out: *mut *mut ZmPoly,
) -> ZmStatus {
    guard(|| {
        let field = obj(field)?;
        let text = str_arg(text)?;
        let f = LaurentPoly::parse(text, nvars as usize, &field.0).map_err(fail)?;
        put(out, Box::into_raw(Box::new(ZmPoly(f))))
    })
}

/// # Safety
/// `f` must come from [`zm_poly_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn zm_poly_free(f: *mut ZmPoly) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of torus points of `f = 0` over `F_{q^k}`.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zm_count_points(f: *const ZmPoly, q: u64, k: u32, cap: u64, out: *mut u64) -> ZmStatus {
    guard(|| {
        let f = obj(f)?;
        let t = counting::count_points_capped(&f.0, q, k as usize, cap as u128).map_err(fail)?;
        let v = u64::try_from(t.count).map_err(|_| {
            set_error("count does not fit in 64 bits".into());
            ZmStatus::Overflow
        })?;
        put(out, v)
    })
}

/// Bounded Δ-regularity search; writes 1 when no common zero was found over
/// `F_{q^j}`, `j ≤ bound`, and 0 when a witness exists.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zm_is_delta_regular(f: *const ZmPoly, bound: u32, cap: u64, out: *mut i32) -> ZmStatus {
    guard(|| {
        let f = obj(f)?;
        let v = is_delta_regular(&f.0, bound as usize, cap as u128).map_err(fail)?;
        put(out, i32::from(matches!(v, RegularityVerdict::RegularUpTo(_))))
    })
}

/// Reconstructs the zeta function from counts `N_1..N_len`.
///
/// # Safety
/// `counts` must point to `len` readable values and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn zm_zeta_reconstruct(
    counts: *const i64,
    len: usize,
    max_order: u32,
    out: *mut *mut ZmZeta,
) -> ZmStatus {
    guard(|| {
        if counts.is_null() && len > 0 {
            set_error("null counts".into());
            return Err(ZmStatus::NullPointer);
        }
        let slice = if len == 0 { &[][..] } else { std::slice::from_raw_parts(counts, len) };
        let big: Vec<_> = slice.iter().map(|&c| c.into()).collect();
        let z = recurrence_reconstruct(&big, max_order as usize).map_err(fail)?;
        put(out, Box::into_raw(Box::new(ZmZeta(z))))
    })
}

/// Degrees of numerator and denominator.
///
/// # Safety
/// `z` must be a live handle; the output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zm_zeta_degrees(z: *const ZmZeta, num_deg: *mut u32, den_deg: *mut u32) -> ZmStatus {
    guard(|| {
        let z = obj(z)?;
        put(num_deg, z.0.numerator.deg() as u32)?;
        put(den_deg, z.0.denominator.deg() as u32)
    })
}

/// Coefficient of `T^i` in the numerator (`which = 0`) or denominator
/// (`which = 1`).
///
/// # Safety
/// `z` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zm_zeta_coeff(z: *const ZmZeta, which: u32, i: u32, out: *mut i64) -> ZmStatus {
    guard(|| {
        let z = obj(z)?;
        let poly = match which {
            0 => &z.0.numerator,
            1 => &z.0.denominator,
            _ => {
                set_error(format!("which = {which} is neither 0 nor 1"));
                return Err(ZmStatus::InvalidInput);
            }
        };
        let c = i64::try_from(poly.coeff(i as usize)).map_err(|_| {
            set_error("coefficient does not fit in 64 bits".into());
            ZmStatus::Overflow
        })?;
        put(out, c)
    })
}

/// JSON rendering of a zeta function; free with [`zm_string_free`].
///
/// # Safety
/// `z` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zm_zeta_to_json(z: *const ZmZeta, out: *mut *mut c_char) -> ZmStatus {
    guard(|| {
        let z = obj(z)?;
        put(out, string_out(z.0.to_json().to_string()))
    })
}

/// # Safety
/// `z` must come from [`zm_zeta_reconstruct`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn zm_zeta_free(z: *mut ZmZeta) {
    if !z.is_null() {
        drop(Box::from_raw(z));
    }
}

/// Reads a polytope from `{"n": int, "vertices": [[int, ...], ...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zm_polytope_from_json(json: *const c_char, out: *mut *mut ZmPolytope) -> ZmStatus {
    guard(|| {
        let text = str_arg(json)?;
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| {
            set_error(format!("polytope JSON: {e}"));
            ZmStatus::InvalidInput
        })?;
        let p = LatticePolytope::from_json(&v).map_err(fail)?;
        put(out, Box::into_raw(Box::new(ZmPolytope(p))))
    })
}

/// Normalized volume `n! Vol(Δ)`.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zm_polytope_volume(p: *const ZmPolytope, out: *mut u64) -> ZmStatus {
    guard(|| {
        let p = obj(p)?;
        put(out, p.0.normalized_volume().map_err(fail)?)
    })
}

/// Hodge data as JSON; free with [`zm_string_free`].
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn zm_polytope_hodge_json(p: *const ZmPolytope, out: *mut *mut c_char) -> ZmStatus {
    guard(|| {
        let p = obj(p)?;
        let h = p.0.hodge_numbers().map_err(fail)?;
        put(out, string_out(h.to_json().to_string()))
    })
}

/// # Safety
/// `p` must come from [`zm_polytope_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn zm_polytope_free(p: *mut ZmPolytope) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}
