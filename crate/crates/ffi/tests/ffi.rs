use std::ffi::{CStr, CString};
use std::ptr;
use zetamill_ffi::*;

fn last_error() -> String {
    let p = zm_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn count_and_regularity_through_handles() {
    unsafe {
        let mut field = ptr::null_mut();
        assert_eq!(zm_field_new(7, 1, &mut field), ZmStatus::Ok);
        let text = CString::new("x1 + x2 + x1^-1*x2^-1").unwrap();
        let mut poly = ptr::null_mut();
        assert_eq!(zm_poly_parse(field, text.as_ptr(), 2, &mut poly), ZmStatus::Ok);
        let mut n = 0u64;
        assert_eq!(zm_count_points(poly, 7, 1, 1 << 30, &mut n), ZmStatus::Ok);
        assert_eq!(n, 6);
        assert_eq!(zm_count_points(poly, 7, 2, 1 << 30, &mut n), ZmStatus::Ok);
        assert_eq!(n, 60);
        let mut regular = -1;
        assert_eq!(zm_is_delta_regular(poly, 2, 1 << 30, &mut regular), ZmStatus::Ok);
        assert_eq!(regular, 1);
        zm_poly_free(poly);

        let singular = CString::new("x1 + x2 + x1^-1*x2^-1 - 6").unwrap();
        let mut poly = ptr::null_mut();
        assert_eq!(zm_poly_parse(field, singular.as_ptr(), 2, &mut poly), ZmStatus::Ok);
        assert_eq!(zm_is_delta_regular(poly, 1, 1 << 30, &mut regular), ZmStatus::Ok);
        assert_eq!(regular, 0);
        zm_poly_free(poly);
        zm_field_free(field);
    }
}

#[test]
fn zeta_round_trip() {
    let counts: Vec<i64> = (1..=4).map(|k| 5i64.pow(k)).collect();
    unsafe {
        let mut z = ptr::null_mut();
        assert_eq!(zm_zeta_reconstruct(counts.as_ptr(), counts.len(), 2, &mut z), ZmStatus::Ok);
        let (mut a, mut b) = (0u32, 0u32);
        assert_eq!(zm_zeta_degrees(z, &mut a, &mut b), ZmStatus::Ok);
        assert_eq!((a, b), (0, 1));
        let mut c = 0i64;
        assert_eq!(zm_zeta_coeff(z, 1, 1, &mut c), ZmStatus::Ok);
        assert_eq!(c, -5);
        assert_eq!(zm_zeta_coeff(z, 2, 0, &mut c), ZmStatus::InvalidInput);
        let mut s = ptr::null_mut();
        assert_eq!(zm_zeta_to_json(z, &mut s), ZmStatus::Ok);
        let json: serde_json::Value = serde_json::from_str(CStr::from_ptr(s).to_str().unwrap()).unwrap();
        assert_eq!(json["denominator"], serde_json::json!([1, -5]));
        zm_string_free(s);
        zm_zeta_free(z);
    }
}

#[test]
fn polytope_queries() {
    let text = CString::new(r#"{"n": 2, "vertices": [[1, 0], [0, 1], [-1, -1]]}"#).unwrap();
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(zm_polytope_from_json(text.as_ptr(), &mut p), ZmStatus::Ok);
        let mut v = 0u64;
        assert_eq!(zm_polytope_volume(p, &mut v), ZmStatus::Ok);
        assert_eq!(v, 3);
        let mut s = ptr::null_mut();
        assert_eq!(zm_polytope_hodge_json(p, &mut s), ZmStatus::Ok);
        let json: serde_json::Value = serde_json::from_str(CStr::from_ptr(s).to_str().unwrap()).unwrap();
        assert_eq!(json["h"], serde_json::json!([1, 1, 1]));
        zm_string_free(s);
        zm_polytope_free(p);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut field = ptr::null_mut();
        assert_eq!(zm_field_new(6, 1, &mut field), ZmStatus::InvalidInput);
        assert!(last_error().contains("not prime"));
        assert_eq!(zm_field_new(7, 1, ptr::null_mut()), ZmStatus::NullPointer);
        let mut n = 0u64;
        assert_eq!(zm_count_points(ptr::null(), 7, 1, 10, &mut n), ZmStatus::NullPointer);

        assert_eq!(zm_field_new(7, 1, &mut field), ZmStatus::Ok);
        let bad = CString::new("x1 +* x2").unwrap();
        let mut poly = ptr::null_mut();
        assert_eq!(zm_poly_parse(field, bad.as_ptr(), 2, &mut poly), ZmStatus::InvalidInput);
        let big = CString::new("x1 + x2 + x3 + 1").unwrap();
        assert_eq!(zm_poly_parse(field, big.as_ptr(), 3, &mut poly), ZmStatus::Ok);
        assert_eq!(zm_count_points(poly, 7, 2, 10, &mut n), ZmStatus::CapExceeded);
        zm_poly_free(poly);
        zm_field_free(field);

        let counts = [1i64, 0, 0, 0];
        let mut z = ptr::null_mut();
        let s = zm_zeta_reconstruct(counts.as_ptr(), counts.len(), 2, &mut z);
        assert_ne!(s, ZmStatus::Ok);
        zm_string_free(ptr::null_mut());
        zm_zeta_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/zetamill.h")).unwrap();
    for name in [
        "zm_last_error",
        "zm_string_free",
        "zm_field_new",
        "zm_poly_parse",
        "zm_count_points",
        "zm_is_delta_regular",
        "zm_zeta_reconstruct",
        "zm_zeta_coeff",
        "zm_polytope_from_json",
        "zm_polytope_hodge_json",
        "ZM_STATUS_CAP_EXCEEDED",
    ] {
        assert!(header.contains(name), "{name} missing from the header");
    }
}
