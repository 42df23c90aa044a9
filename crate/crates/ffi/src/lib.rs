//! C ABI for the revenue analysis library: opaque curve handles, status
//! codes, and flat double outputs.
//!
//! Every function returns an [`Erm2Status`] and writes results through out
//! pointers, which must be non-null and valid for a single write. Curves
//! created by the constructors must be released with [`erm2_curve_free`];
//! strings returned by [`erm2_curve_to_text`] with [`erm2_string_free`].
//! Handles are immutable, so one curve may be shared across threads.
//! Panics are caught at the boundary and surfaced as
//! [`Erm2Status::InternalError`].

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use erm2::bounds::{self, OrderStat};
use erm2::curve::{CurveError, RevenueCurve};
use erm2::erm::{self, ErmError, Region};

/// Opaque curve handle (forward-declared in the generated header).
pub struct Erm2Curve {
    inner: RevenueCurve,
}

/// Result code of every ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Erm2Status {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Breakpoints rejected: non-monotone quantiles, concavity violation,
    /// negative revenue, or nonzero revenue at quantile 0.
    InvalidCurve = 3,
    OutOfRange = 4,
    ToleranceNotMet = 5,
    DegenerateRegion = 6,
    EmptySample = 7,
    ParseError = 8,
    InvalidUtf8 = 9,
    InternalError = 10,
}

/// Region of the quantile square relative to the revenue-maximizing
/// quantile.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Erm2Region {
    BothAtOrAbove = 0,
    BothBelow = 1,
    Straddling = 2,
}

/// Order-statistic quantity selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Erm2OrderStat {
    MinDensity = 0,
    MaxDensity = 1,
    MaxCondBelow = 2,
    MaxCondAbove = 3,
}

/// Evaluated lower-bound components at a given q*, as fractions of the
/// optimal revenue.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Erm2BoundReport {
    pub q_star: f64,
    pub delta: f64,
    pub gamma: f64,
    pub bound_r: f64,
    pub bound_l: f64,
    pub bound_b: f64,
    pub combined: f64,
}

fn curve_status(e: &CurveError) -> Erm2Status {
    match e {
        CurveError::OutOfRange { .. } => Erm2Status::OutOfRange,
        CurveError::NonPositiveScale => Erm2Status::InvalidArgument,
        CurveError::Parse { .. } => Erm2Status::ParseError,
        CurveError::InfeasibleBump => Erm2Status::InvalidCurve,
        _ => Erm2Status::InvalidCurve,
    }
}

fn erm_status(e: &ErmError) -> Erm2Status {
    match e {
        ErmError::OutOfRange { .. } => Erm2Status::OutOfRange,
        ErmError::EmptySample => Erm2Status::EmptySample,
        ErmError::ToleranceNotMet => Erm2Status::ToleranceNotMet,
        ErmError::DegenerateRegion { .. } => Erm2Status::DegenerateRegion,
        ErmError::InvalidParameter(_) => Erm2Status::InvalidArgument,
    }
}

fn bounds_status(e: &bounds::BoundsError) -> Erm2Status {
    match e {
        bounds::BoundsError::OutOfRange { .. } => Erm2Status::OutOfRange,
        bounds::BoundsError::BoundViolated { .. } => Erm2Status::InternalError,
    }
}

fn guarded<F: FnOnce() -> Erm2Status>(f: F) -> Erm2Status {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(Erm2Status::InternalError)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Erm2Status {
    if out.is_null() {
        return Erm2Status::NullPointer;
    }
    unsafe { out.write(value) };
    Erm2Status::Ok
}

unsafe fn curve_ref<'a>(curve: *const Erm2Curve) -> Option<&'a RevenueCurve> {
    unsafe { curve.as_ref().map(|c| &c.inner) }
}

fn boxed(curve: RevenueCurve) -> *mut Erm2Curve {
    Box::into_raw(Box::new(Erm2Curve { inner: curve }))
}

/// Builds a curve from parallel quantile and revenue arrays of length `len`.
///
/// # Safety
/// `quantiles` and `revenues` must point to `len` readable doubles; `out`
/// must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn erm2_curve_new(
    quantiles: *const f64,
    revenues: *const f64,
    len: usize,
    out: *mut *mut Erm2Curve,
) -> Erm2Status {
    if quantiles.is_null() || revenues.is_null() || out.is_null() {
        return Erm2Status::NullPointer;
    }
    let qs = unsafe { std::slice::from_raw_parts(quantiles, len) };
    let rs = unsafe { std::slice::from_raw_parts(revenues, len) };
    guarded(|| {
        let points: Vec<(f64, f64)> = qs.iter().copied().zip(rs.iter().copied()).collect();
        match RevenueCurve::new(points) {
            Ok(c) => unsafe { write_out(out, boxed(c)) },
            Err(e) => curve_status(&e),
        }
    })
}

/// Parses the curve text format (one `q r` pair per line, `#` comments).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_curve_parse(
    text: *const c_char,
    out: *mut *mut Erm2Curve,
) -> Erm2Status {
    if text.is_null() || out.is_null() {
        return Erm2Status::NullPointer;
    }
    let raw = unsafe { CStr::from_ptr(text) };
    guarded(|| {
        let Ok(text) = raw.to_str() else {
            return Erm2Status::InvalidUtf8;
        };
        match RevenueCurve::parse(text) {
            Ok(c) => unsafe { write_out(out, boxed(c)) },
            Err(e) => curve_status(&e),
        }
    })
}

/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn erm2_curve_triangular(
    q_star: f64,
    out: *mut *mut Erm2Curve,
) -> Erm2Status {
    guarded(|| match RevenueCurve::triangular(q_star) {
        Ok(c) => unsafe { write_out(out, boxed(c)) },
        Err(e) => curve_status(&e),
    })
}

/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn erm2_curve_truncated_equal_revenue(
    v_max: f64,
    out: *mut *mut Erm2Curve,
) -> Erm2Status {
    guarded(|| match RevenueCurve::truncated_equal_revenue(v_max) {
        Ok(c) => unsafe { write_out(out, boxed(c)) },
        Err(e) => curve_status(&e),
    })
}

/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn erm2_curve_quadrilateral(
    q_b: f64,
    r_b: f64,
    out: *mut *mut Erm2Curve,
) -> Erm2Status {
    guarded(|| match RevenueCurve::quadrilateral(q_b, r_b) {
        Ok(c) => unsafe { write_out(out, boxed(c)) },
        Err(e) => curve_status(&e),
    })
}

/// Copy of `curve` with every revenue multiplied by `alpha`.
///
/// # Safety
/// `curve` must be a live handle; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn erm2_curve_scale(
    curve: *const Erm2Curve,
    alpha: f64,
    out: *mut *mut Erm2Curve,
) -> Erm2Status {
    let Some(c) = (unsafe { curve_ref(curve) }) else {
        return Erm2Status::NullPointer;
    };
    guarded(|| match c.scale(alpha) {
        Ok(scaled) => unsafe { write_out(out, boxed(scaled)) },
        Err(e) => curve_status(&e),
    })
}

/// Releases a curve handle; a null pointer is a no-op.
///
/// # Safety
/// `curve` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn erm2_curve_free(curve: *mut Erm2Curve) {
    if !curve.is_null() {
        drop(unsafe { Box::from_raw(curve) });
    }
}

/// # Safety
/// `curve` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_curve_breakpoint_count(
    curve: *const Erm2Curve,
    out: *mut usize,
) -> Erm2Status {
    let Some(c) = (unsafe { curve_ref(curve) }) else {
        return Erm2Status::NullPointer;
    };
    unsafe { write_out(out, c.breakpoints().len()) }
}

/// Writes the curve text format as a newly allocated NUL-terminated string;
/// release it with [`erm2_string_free`].
///
/// # Safety
/// `curve` must be a live handle; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn erm2_curve_to_text(
    curve: *const Erm2Curve,
    out: *mut *mut c_char,
) -> Erm2Status {
    let Some(c) = (unsafe { curve_ref(curve) }) else {
        return Erm2Status::NullPointer;
    };
    guarded(|| match CString::new(c.to_text()) {
        Ok(s) => unsafe { write_out(out, s.into_raw()) },
        Err(_) => Erm2Status::InternalError,
    })
}

/// # Safety
/// `text` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn erm2_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}

/// # Safety
/// `curve` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_curve_value_at(
    curve: *const Erm2Curve,
    q: f64,
    out: *mut f64,
) -> Erm2Status {
    let Some(c) = (unsafe { curve_ref(curve) }) else {
        return Erm2Status::NullPointer;
    };
    guarded(|| match c.value_at(q) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => curve_status(&e),
    })
}

/// # Safety
/// `curve` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_curve_price_at(
    curve: *const Erm2Curve,
    q: f64,
    out: *mut f64,
) -> Erm2Status {
    let Some(c) = (unsafe { curve_ref(curve) }) else {
        return Erm2Status::NullPointer;
    };
    guarded(|| match c.price_at(q) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => curve_status(&e),
    })
}

/// Maximum revenue and the smallest quantile attaining it.
///
/// # Safety
/// `curve` must be a live handle; both outs valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn erm2_curve_opt(
    curve: *const Erm2Curve,
    q_star_out: *mut f64,
    opt_out: *mut f64,
) -> Erm2Status {
    let Some(c) = (unsafe { curve_ref(curve) }) else {
        return Erm2Status::NullPointer;
    };
    guarded(|| {
        let opt = c.opt();
        let s = unsafe { write_out(q_star_out, opt.q_star) };
        if s != Erm2Status::Ok {
            return s;
        }
        unsafe { write_out(opt_out, opt.opt) }
    })
}

/// Two-sample decision: expected revenue of the price posted for sampled
/// quantiles `q1`, `q2`.
///
/// # Safety
/// `curve` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_e2(
    curve: *const Erm2Curve,
    q1: f64,
    q2: f64,
    out: *mut f64,
) -> Erm2Status {
    let Some(c) = (unsafe { curve_ref(curve) }) else {
        return Erm2Status::NullPointer;
    };
    guarded(|| match erm::e2(c, q1, q2) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => erm_status(&e),
    })
}

/// Price posted by empirical revenue maximization on raw sample values.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_erm_price(
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> Erm2Status {
    if values.is_null() {
        return Erm2Status::NullPointer;
    }
    let vals = unsafe { std::slice::from_raw_parts(values, len) };
    guarded(|| match erm::erm_price(vals) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => erm_status(&e),
    })
}

/// # Safety
/// `curve` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_threshold_upper(
    curve: *const Erm2Curve,
    q: f64,
    out: *mut f64,
) -> Erm2Status {
    let Some(c) = (unsafe { curve_ref(curve) }) else {
        return Erm2Status::NullPointer;
    };
    guarded(|| match erm::threshold_upper(c, q) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => erm_status(&e),
    })
}

/// # Safety
/// `curve` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_threshold_lower(
    curve: *const Erm2Curve,
    q: f64,
    out: *mut f64,
) -> Erm2Status {
    let Some(c) = (unsafe { curve_ref(curve) }) else {
        return Erm2Status::NullPointer;
    };
    guarded(|| match erm::threshold_lower(c, q) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => erm_status(&e),
    })
}

/// Exact one-sample expected revenue (the integral of the curve).
///
/// # Safety
/// `curve` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_erm1_exact(curve: *const Erm2Curve, out: *mut f64) -> Erm2Status {
    let Some(c) = (unsafe { curve_ref(curve) }) else {
        return Erm2Status::NullPointer;
    };
    guarded(|| unsafe { write_out(out, erm::erm1_exact(c).value) })
}

/// Exact two-sample expected revenue to absolute tolerance `tol`.
///
/// # Safety
/// `curve` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_erm2_exact(
    curve: *const Erm2Curve,
    tol: f64,
    out: *mut f64,
) -> Erm2Status {
    let Some(c) = (unsafe { curve_ref(curve) }) else {
        return Erm2Status::NullPointer;
    };
    guarded(|| match erm::erm2_exact(c, tol) {
        Ok(est) => unsafe { write_out(out, est.value) },
        Err(e) => erm_status(&e),
    })
}

/// Exact two-sample expected revenue conditioned on the sample pair falling
/// in `region`.
///
/// # Safety
/// `curve` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_erm2_region_exact(
    curve: *const Erm2Curve,
    region: Erm2Region,
    tol: f64,
    out: *mut f64,
) -> Erm2Status {
    let Some(c) = (unsafe { curve_ref(curve) }) else {
        return Erm2Status::NullPointer;
    };
    let region = match region {
        Erm2Region::BothAtOrAbove => Region::R,
        Erm2Region::BothBelow => Region::L,
        Erm2Region::Straddling => Region::B,
    };
    guarded(|| match erm::erm2_region_exact(c, region, tol) {
        Ok(est) => unsafe { write_out(out, est.value) },
        Err(e) => erm_status(&e),
    })
}

/// Seeded Monte Carlo estimate of the `n`-sample expected revenue; writes
/// the mean and its standard error.
///
/// # Safety
/// `curve` must be a live handle; both outs valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn erm2_erm_mc(
    curve: *const Erm2Curve,
    n: usize,
    trials: u64,
    seed: u64,
    value_out: *mut f64,
    std_error_out: *mut f64,
) -> Erm2Status {
    let Some(c) = (unsafe { curve_ref(curve) }) else {
        return Erm2Status::NullPointer;
    };
    guarded(|| match erm::erm_mc(c, n, trials, seed) {
        Ok(est) => {
            let s = unsafe { write_out(value_out, est.value) };
            if s != Erm2Status::Ok {
                return s;
            }
            unsafe { write_out(std_error_out, est.std_error) }
        }
        Err(e) => erm_status(&e),
    })
}

/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_bound_r(q_star: f64, out: *mut f64) -> Erm2Status {
    guarded(|| match bounds::bound_r(q_star) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => bounds_status(&e),
    })
}

/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_bound_l(delta: f64, out: *mut f64) -> Erm2Status {
    guarded(|| match bounds::bound_l(delta) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => bounds_status(&e),
    })
}

/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_bound_b(q_star: f64, out: *mut f64) -> Erm2Status {
    guarded(|| match bounds::bound_b(q_star) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => bounds_status(&e),
    })
}

/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_trr_bound(m: f64, out: *mut f64) -> Erm2Status {
    guarded(|| match bounds::trr_bound(m) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => bounds_status(&e),
    })
}

/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_cdec_bound(q: f64, r_q: f64, out: *mut f64) -> Erm2Status {
    guarded(|| match bounds::cdec_bound(q, r_q) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => bounds_status(&e),
    })
}

/// Area-weighted combination of the regional bounds at `q_star`.
///
/// # Safety
/// `out` must be valid for one struct write.
#[no_mangle]
pub unsafe extern "C" fn erm2_combined_bound(
    q_star: f64,
    out: *mut Erm2BoundReport,
) -> Erm2Status {
    guarded(|| match bounds::combined_bound(q_star) {
        Ok(r) => unsafe {
            write_out(
                out,
                Erm2BoundReport {
                    q_star: r.q_star,
                    delta: r.delta,
                    gamma: r.gamma,
                    bound_r: r.bound_r,
                    bound_l: r.bound_l,
                    bound_b: r.bound_b,
                    combined: r.combined,
                },
            )
        },
        Err(e) => bounds_status(&e),
    })
}

/// Minimizes the combined bound over q*; writes the minimizer and the
/// minimum, which is checked to clear 0.509.
///
/// # Safety
/// Both outs must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn erm2_minimize_combined(
    q_star_out: *mut f64,
    bound_out: *mut f64,
) -> Erm2Status {
    guarded(|| match bounds::minimize_combined() {
        Ok((q_star, bound)) => {
            let s = unsafe { write_out(q_star_out, q_star) };
            if s != Erm2Status::Ok {
                return s;
            }
            unsafe { write_out(bound_out, bound) }
        }
        Err(e) => bounds_status(&e),
    })
}

/// Maximizes the both-below bound over its split parameter.
///
/// # Safety
/// Both outs must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn erm2_optimize_delta(
    delta_out: *mut f64,
    bound_out: *mut f64,
) -> Erm2Status {
    guarded(|| {
        let (delta, bound) = bounds::optimize_delta();
        let s = unsafe { write_out(delta_out, delta) };
        if s != Erm2Status::Ok {
            return s;
        }
        unsafe { write_out(bound_out, bound) }
    })
}

/// Order-statistic densities and conditional expectations for two uniform
/// draws; `m` is consulted only by the minimum density.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn erm2_order_stat(
    kind: Erm2OrderStat,
    q: f64,
    m: f64,
    out: *mut f64,
) -> Erm2Status {
    let kind = match kind {
        Erm2OrderStat::MinDensity => OrderStat::MinDensity,
        Erm2OrderStat::MaxDensity => OrderStat::MaxDensity,
        Erm2OrderStat::MaxCondBelow => OrderStat::MaxCondBelow,
        Erm2OrderStat::MaxCondAbove => OrderStat::MaxCondAbove,
    };
    guarded(|| match bounds::order_stat(kind, q, m) {
        Ok(v) => unsafe { write_out(out, v) },
        Err(e) => bounds_status(&e),
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn erm2_status_message(status: Erm2Status) -> *const c_char {
    let msg: &'static CStr = match status {
        Erm2Status::Ok => c"ok",
        Erm2Status::NullPointer => c"null pointer argument",
        Erm2Status::InvalidArgument => c"invalid argument",
        Erm2Status::InvalidCurve => c"breakpoints do not form a valid concave revenue curve",
        Erm2Status::OutOfRange => c"argument outside its domain",
        Erm2Status::ToleranceNotMet => c"quadrature did not reach the requested tolerance",
        Erm2Status::DegenerateRegion => c"region has zero area at this q*",
        Erm2Status::EmptySample => c"empty sample",
        Erm2Status::ParseError => c"malformed curve text",
        Erm2Status::InvalidUtf8 => c"curve text is not valid UTF-8",
        Erm2Status::InternalError => c"internal error",
    };
    msg.as_ptr()
}
