//! Exercises the C ABI end to end: handle lifecycle, status codes, text
//! round-trip, and agreement with the underlying library.

use std::ffi::{CStr, CString};
use std::ptr;

use erm2_ffi::*;

fn make_truncated() -> *mut Erm2Curve {
    let mut curve = ptr::null_mut();
    let status = unsafe { erm2_curve_truncated_equal_revenue(10.0, &mut curve) };
    assert_eq!(status, Erm2Status::Ok);
    assert!(!curve.is_null());
    curve
}

#[test]
fn curve_lifecycle_and_evaluation() {
    let qs = [0.0, 0.1, 1.0];
    let rs = [0.0, 1.0, 1.0];
    let mut curve = ptr::null_mut();
    let status = unsafe { erm2_curve_new(qs.as_ptr(), rs.as_ptr(), 3, &mut curve) };
    assert_eq!(status, Erm2Status::Ok);

    let mut n = 0usize;
    assert_eq!(
        unsafe { erm2_curve_breakpoint_count(curve, &mut n) },
        Erm2Status::Ok
    );
    assert_eq!(n, 3);

    let mut value = 0.0;
    assert_eq!(
        unsafe { erm2_curve_value_at(curve, 0.5, &mut value) },
        Erm2Status::Ok
    );
    assert_eq!(value, 1.0);
    assert_eq!(
        unsafe { erm2_curve_value_at(curve, 1.5, &mut value) },
        Erm2Status::OutOfRange
    );

    let mut price = 0.0;
    assert_eq!(
        unsafe { erm2_curve_price_at(curve, 0.5, &mut price) },
        Erm2Status::Ok
    );
    assert!((price - 2.0).abs() < 1e-14);

    let (mut q_star, mut opt) = (0.0, 0.0);
    assert_eq!(
        unsafe { erm2_curve_opt(curve, &mut q_star, &mut opt) },
        Erm2Status::Ok
    );
    assert_eq!((q_star, opt), (0.1, 1.0));

    unsafe { erm2_curve_free(curve) };
}

#[test]
fn rejects_invalid_curves_and_null_pointers() {
    let qs = [0.0, 0.5, 0.4];
    let rs = [0.0, 1.0, 1.2];
    let mut curve = ptr::null_mut();
    assert_eq!(
        unsafe { erm2_curve_new(qs.as_ptr(), rs.as_ptr(), 3, &mut curve) },
        Erm2Status::InvalidCurve
    );
    assert_eq!(
        unsafe { erm2_curve_new(ptr::null(), rs.as_ptr(), 3, &mut curve) },
        Erm2Status::NullPointer
    );
    let mut out = 0.0;
    assert_eq!(
        unsafe { erm2_erm1_exact(ptr::null(), &mut out) },
        Erm2Status::NullPointer
    );
    let mut bumped = ptr::null_mut();
    assert_eq!(
        unsafe { erm2_curve_quadrilateral(0.5, 0.4, &mut bumped) },
        Erm2Status::InvalidCurve
    );
}

#[test]
fn text_round_trip_through_the_abi() {
    let curve = make_truncated();
    let mut text = ptr::null_mut();
    assert_eq!(
        unsafe { erm2_curve_to_text(curve, &mut text) },
        Erm2Status::Ok
    );
    let copied = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_owned();
    unsafe { erm2_string_free(text) };

    let c_text = CString::new(copied).unwrap();
    let mut parsed = ptr::null_mut();
    assert_eq!(
        unsafe { erm2_curve_parse(c_text.as_ptr(), &mut parsed) },
        Erm2Status::Ok
    );
    let mut value = 0.0;
    assert_eq!(
        unsafe { erm2_curve_value_at(parsed, 0.05, &mut value) },
        Erm2Status::Ok
    );
    assert!((value - 0.5).abs() < 1e-15);
    unsafe { erm2_curve_free(parsed) };
    unsafe { erm2_curve_free(curve) };

    let bad = CString::new("0 0\nnot a number\n").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { erm2_curve_parse(bad.as_ptr(), &mut out) },
        Erm2Status::ParseError
    );
}

#[test]
fn revenue_computations_match_the_library() {
    let curve = make_truncated();
    let reference = erm2::curve::RevenueCurve::truncated_equal_revenue(10.0).unwrap();

    let mut one = 0.0;
    assert_eq!(unsafe { erm2_erm1_exact(curve, &mut one) }, Erm2Status::Ok);
    assert_eq!(one, erm2::erm::erm1_exact(&reference).value);

    let mut two = 0.0;
    assert_eq!(
        unsafe { erm2_erm2_exact(curve, 1e-9, &mut two) },
        Erm2Status::Ok
    );
    assert!((two - 11.0 / 12.0).abs() < 1e-8);

    let mut region = 0.0;
    assert_eq!(
        unsafe { erm2_erm2_region_exact(curve, Erm2Region::Straddling, 1e-9, &mut region) },
        Erm2Status::Ok
    );
    assert!(region > 0.0 && region < 1.0);

    let (mut value, mut std_error) = (0.0, 0.0);
    assert_eq!(
        unsafe { erm2_erm_mc(curve, 2, 10_000, 7, &mut value, &mut std_error) },
        Erm2Status::Ok
    );
    let direct = erm2::erm::erm_mc(&reference, 2, 10_000, 7).unwrap();
    assert_eq!(value.to_bits(), direct.value.to_bits());
    assert_eq!(std_error.to_bits(), direct.std_error.to_bits());

    let mut rule = 0.0;
    assert_eq!(
        unsafe { erm2_e2(curve, 0.05, 0.15, &mut rule) },
        Erm2Status::Ok
    );
    assert!((rule - 1.0).abs() < 1e-12);

    let samples = [5.0, 3.0, 1.0];
    let mut posted = 0.0;
    assert_eq!(
        unsafe { erm2_erm_price(samples.as_ptr(), 3, &mut posted) },
        Erm2Status::Ok
    );
    assert_eq!(posted, 3.0);

    let mut t = 0.0;
    assert_eq!(
        unsafe { erm2_threshold_upper(curve, 0.3, &mut t) },
        Erm2Status::Ok
    );
    assert!((t - 0.6).abs() < 1e-12);
    assert_eq!(
        unsafe { erm2_threshold_lower(curve, 0.5, &mut t) },
        Erm2Status::Ok
    );
    assert!((t - 0.25).abs() < 1e-12);

    unsafe { erm2_curve_free(curve) };
}

#[test]
fn degenerate_region_surfaces_as_status() {
    let mut identity = ptr::null_mut();
    assert_eq!(
        unsafe { erm2_curve_triangular(1.0, &mut identity) },
        Erm2Status::Ok
    );
    let mut out = 0.0;
    assert_eq!(
        unsafe { erm2_erm2_region_exact(identity, Erm2Region::BothAtOrAbove, 1e-9, &mut out) },
        Erm2Status::DegenerateRegion
    );
    assert_eq!(
        unsafe { erm2_erm2_region_exact(identity, Erm2Region::BothBelow, 1e-9, &mut out) },
        Erm2Status::Ok
    );
    assert!((out - 2.0 / 3.0).abs() < 1e-9);
    unsafe { erm2_curve_free(identity) };
}

#[test]
fn bound_evaluations_through_the_abi() {
    let mut value = 0.0;
    assert_eq!(unsafe { erm2_bound_l(0.15117, &mut value) }, Erm2Status::Ok);
    assert!((value - 0.528344).abs() < 1e-5);
    assert_eq!(unsafe { erm2_bound_r(1.0, &mut value) }, Erm2Status::OutOfRange);
    assert_eq!(unsafe { erm2_trr_bound(0.0, &mut value) }, Erm2Status::Ok);
    assert!((value - 0.375).abs() < 1e-15);

    let mut report = Erm2BoundReport {
        q_star: 0.0,
        delta: 0.0,
        gamma: 0.0,
        bound_r: 0.0,
        bound_l: 0.0,
        bound_b: 0.0,
        combined: 0.0,
    };
    assert_eq!(
        unsafe { erm2_combined_bound(0.713832, &mut report) },
        Erm2Status::Ok
    );
    assert!((report.combined - 0.50922).abs() < 1e-4);

    let (mut q_star, mut bound) = (0.0, 0.0);
    assert_eq!(
        unsafe { erm2_minimize_combined(&mut q_star, &mut bound) },
        Erm2Status::Ok
    );
    assert!((q_star - 0.713832).abs() < 1e-3);
    assert!(bound > 0.509);

    let (mut delta, mut at) = (0.0, 0.0);
    assert_eq!(
        unsafe { erm2_optimize_delta(&mut delta, &mut at) },
        Erm2Status::Ok
    );
    assert!((delta - 0.15117).abs() < 1e-3);

    assert_eq!(
        unsafe { erm2_order_stat(Erm2OrderStat::MaxCondBelow, 0.6, 0.0, &mut value) },
        Erm2Status::Ok
    );
    assert!((value - 0.4).abs() < 1e-15);

    let message = unsafe { CStr::from_ptr(erm2_status_message(Erm2Status::OutOfRange)) };
    assert_eq!(message.to_str().unwrap(), "argument outside its domain");
}
