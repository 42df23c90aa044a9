//! Closed-form lower bounds on the two-sample ERM revenue as a fraction of
//! the optimal posted-price revenue, and the one-dimensional optimizations
//! that combine them.
//!
//! The quantile square splits at the revenue-maximizing quantile `q*` into
//! three regions: both samples at or above `q*`, both below, and one on each
//! side. Each region carries its own bound — a two-branch logarithmic
//! expression in `q*`, a constant obtained by optimizing a split parameter
//! `delta`, and a quadratic expression through `m = 1 / (1 + q*)` — and the
//! area-weighted combination stays above 0.509 for every `q*`. All
//! logarithms are natural; that is what makes the two branches of the
//! first bound meet at `q* = 2/3`.

use serde::Serialize;
use thiserror::Error;

use crate::golden::{grid_golden_max, grid_golden_min};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("argument {value} outside the domain of {what}")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("combined bound minimum {bound} at q* = {q_star} fell to 0.509 or below; the evaluator is broken")]
    BoundViolated { q_star: f64, bound: f64 },
}

/// Constant used for the both-below region inside the combined bound.
///
/// The sharper per-`delta` value is [`bound_l`]`(`[`DEFAULT_DELTA`]`)`
/// (about 0.528344); the combination deliberately uses the coarser literal
/// so the published minimum 0.50922 is reproduced digit for digit.
pub const LEFT_REGION_CONSTANT: f64 = 0.528;

/// Split parameter at which the two branches of the both-below bound meet.
pub const DEFAULT_DELTA: f64 = 0.15117;

/// Evaluated lower-bound components at a given `q*`, all as fractions of the
/// optimal revenue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub q_star: f64,
    pub delta: f64,
    pub gamma: f64,
    pub bound_r: f64,
    pub bound_l: f64,
    pub bound_b: f64,
    pub combined: f64,
}

/// Lower bound on the conditional ERM revenue when both samples are at or
/// above `q*` (the falling side of the curve).
///
/// Two branches split at `q* = 2/3`; they agree there. Near `q* = 1` the
/// direct expression cancels catastrophically, so a power series in
/// `1 - q*` takes over.
pub fn bound_r(q_star: f64) -> Result<f64, BoundsError> {
    if !(0.0..1.0).contains(&q_star) {
        return Err(BoundsError::OutOfRange {
            what: "bound_r",
            value: q_star,
        });
    }
    Ok(if q_star >= 2.0 / 3.0 {
        bound_r_upper_branch(q_star)
    } else {
        bound_r_lower_branch(q_star)
    })
}

fn bound_r_upper_branch(q_star: f64) -> f64 {
    let u = 1.0 - q_star;
    if u < 0.25 {
        // 1/2 + sum_{k>=1} u^k / (2 (k + 3)), the series form of the
        // expression below.
        let mut acc = 0.5;
        let mut pow = 1.0;
        for k in 1..=40 {
            pow *= u;
            let term = pow / (2.0 * (k + 3) as f64);
            acc += term;
            if term < 1e-18 {
                break;
            }
        }
        acc
    } else {
        let log_q = (-u).ln_1p();
        1.0 / 3.0 - 1.0 / (4.0 * u) - 1.0 / (2.0 * u * u) - log_q / (2.0 * u * u * u)
    }
}

fn bound_r_lower_branch(q_star: f64) -> f64 {
    let u = 1.0 - q_star;
    let inner = 2.0 / 9.0 - (q_star / 4.0).powi(2)
        + (q_star / 2.0).powi(3) / 3.0
        + (2.0f64 / 3.0).ln() / 2.0;
    2.0 / 3.0 - inner / (u * u * u)
}

/// Lower bound on the conditional ERM revenue when both samples are below
/// `q*`, as a function of the split parameter `delta`: the smaller of a
/// far-from-linear branch `1/2 + 3 delta / 16` and a quintic in
/// `gamma = delta / (1 + delta)`.
pub fn bound_l(delta: f64) -> Result<f64, BoundsError> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(BoundsError::OutOfRange {
            what: "bound_l",
            value: delta,
        });
    }
    let gamma = delta / (1.0 + delta);
    let far_from_linear = 0.5 + 3.0 * delta / 16.0;
    let far_from_constant = left_quintic(gamma);
    Ok(far_from_linear.min(far_from_constant))
}

fn left_quintic(g: f64) -> f64 {
    ((((64.0 / 3.0 * g - 8.0) * g + 8.0 / 3.0) * g - 2.0 / 3.0) * g - 1.0) * g + 2.0 / 3.0
}

/// Maximizes [`bound_l`] over `delta` in `[0, 1]`; returns the maximizer and
/// the value. Grid-seeded golden section, argument tolerance 1e-7.
pub fn optimize_delta() -> (f64, f64) {
    optimize_delta_in(0.0, 1.0)
}

/// Same search restricted to `[lo, hi]`.
pub fn optimize_delta_in(lo: f64, hi: f64) -> (f64, f64) {
    grid_golden_max(|d| bound_l(d).unwrap(), lo, hi, 10_000, 1e-7)
}

/// Lower bound on the conditional ERM revenue when the samples straddle
/// `q*`: `(1 - (q* / (2 (1 + q*)))^2) / 2`, evaluated through
/// [`trr_bound`] at `m = 1 / (1 + q*)`.
pub fn bound_b(q_star: f64) -> Result<f64, BoundsError> {
    if !(0.0..=1.0).contains(&q_star) {
        return Err(BoundsError::OutOfRange {
            what: "bound_b",
            value: q_star,
        });
    }
    trr_bound(1.0 / (1.0 + q_star))
}

/// `(1 + m)/2 - ((1 + m)/2)^2 / 2`: the guarantee of the threshold-coupling
/// argument when the threshold's range is bounded below by `m`.
pub fn trr_bound(m: f64) -> Result<f64, BoundsError> {
    if !(0.0..=1.0).contains(&m) {
        return Err(BoundsError::OutOfRange {
            what: "trr_bound",
            value: m,
        });
    }
    let z = 0.5 * (1.0 + m);
    Ok(z - 0.5 * z * z)
}

/// Lower bound on the conditional ERM revenue given that the better sample
/// of a both-above pair sits at quantile `q` with revenue `r_q`. Two
/// branches split at `q = 2/3` and agree there.
pub fn cdec_bound(q: f64, r_q: f64) -> Result<f64, BoundsError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(BoundsError::OutOfRange {
            what: "cdec_bound",
            value: q,
        });
    }
    let revenue_ok = r_q >= 0.0;
    if !revenue_ok {
        return Err(BoundsError::OutOfRange {
            what: "cdec_bound revenue",
            value: r_q,
        });
    }
    Ok(if q <= 2.0 / 3.0 {
        r_q * (1.0 - q / (16.0 * (1.0 - q)))
    } else {
        r_q * (0.5 + 1.0 / (4.0 * q))
    })
}

/// Area-weighted combination of the three regional bounds at `q*`, using
/// [`LEFT_REGION_CONSTANT`] for the both-below region.
pub fn combined_bound(q_star: f64) -> Result<BoundReport, BoundsError> {
    let r = bound_r(q_star)?;
    let b = bound_b(q_star)?;
    let l = LEFT_REGION_CONSTANT;
    let w = 1.0 - q_star;
    let combined = w * w * r + q_star * q_star * l + 2.0 * q_star * w * b;
    Ok(BoundReport {
        q_star,
        delta: DEFAULT_DELTA,
        gamma: DEFAULT_DELTA / (1.0 + DEFAULT_DELTA),
        bound_r: r,
        bound_l: l,
        bound_b: b,
        combined,
    })
}

/// Minimizes the combined bound over `q*` in `[0, 1)` and checks that the
/// minimum clears 0.509. Grid-seeded golden section, argument tolerance
/// 1e-7; returns the minimizing `q*` and the bound there.
pub fn minimize_combined() -> Result<(f64, f64), BoundsError> {
    let (q_star, bound) = grid_golden_min(
        |q| combined_bound(q).unwrap().combined,
        0.0,
        1.0 - 1e-9,
        10_000,
        1e-7,
    );
    if bound <= 0.509 {
        return Err(BoundsError::BoundViolated { q_star, bound });
    }
    Ok((q_star, bound))
}

/// Order-statistic densities and conditional expectations for two uniform
/// draws, used to weight the regional integrands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderStat {
    /// Density of `min{q1, q2}` for `(q1, q2)` uniform on `[m, 1]^2`.
    MinDensity,
    /// Density of `max{q1, q2}` for `(q1, q2)` uniform on `[0, 1]^2`.
    MaxDensity,
    /// `E[max | max <= q]`.
    MaxCondBelow,
    /// `E[max | max >= q]`.
    MaxCondAbove,
}

/// Evaluates the named density or conditional expectation at `q`; `m` is the
/// lower endpoint and is consulted only by [`OrderStat::MinDensity`].
pub fn order_stat(kind: OrderStat, q: f64, m: f64) -> Result<f64, BoundsError> {
    let check_unit = |x: f64, what: &'static str| {
        if (0.0..=1.0).contains(&x) {
            Ok(())
        } else {
            Err(BoundsError::OutOfRange { what, value: x })
        }
    };
    match kind {
        OrderStat::MinDensity => {
            check_unit(q, "order_stat quantile")?;
            if !(0.0..1.0).contains(&m) || q < m {
                return Err(BoundsError::OutOfRange {
                    what: "order_stat lower endpoint",
                    value: m,
                });
            }
            let w = 1.0 - m;
            Ok(2.0 * (1.0 - q) / (w * w))
        }
        OrderStat::MaxDensity => {
            check_unit(q, "order_stat quantile")?;
            Ok(2.0 * q)
        }
        OrderStat::MaxCondBelow => {
            check_unit(q, "order_stat quantile")?;
            Ok(2.0 / 3.0 * q)
        }
        OrderStat::MaxCondAbove => {
            check_unit(q, "order_stat quantile")?;
            if q == 1.0 {
                Ok(1.0)
            } else {
                Ok(2.0 / 3.0 * (1.0 - q * q * q) / (1.0 - q * q))
            }
        }
    }
}
