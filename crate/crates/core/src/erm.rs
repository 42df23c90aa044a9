//! Empirical revenue maximization: the pricing rule, its two-sample decision
//! function, and exact and Monte Carlo evaluation of its expected revenue.
//!
//! Given sample values, ERM posts the sample value that maximizes revenue
//! against the empirical distribution. For two samples this reduces to a
//! closed rule: post the higher price exactly when it is at least twice the
//! lower one. In quantile space the switch point is captured by threshold
//! functions, which make the expected revenue a one-dimensional integral
//! with a closed-form inner part; the outer integral is handled by adaptive
//! quadrature with subdivision forced at every breakpoint and at every
//! threshold preimage of a breakpoint.
//!
//! Curves with an atom at the top value have a first linear piece on which
//! the price is constant. All expectations here are taken in the atomless
//! smoothing limit of such curves: distinct quantiles on a constant-price
//! piece are ranked by quantile (the larger quantile carries the marginally
//! lower price), and the revenue of posting a sampled price is the revenue
//! at the sampled quantile. This is what makes the sampling estimator agree
//! with the exact integrals on every valid curve.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::curve::{CurveError, RevenueCurve};
use crate::quad::{self, QuadError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ErmError {
    #[error("quantile {q} outside [0, 1]")]
    OutOfRange { q: f64 },
    #[error("empty sample")]
    EmptySample,
    #[error("quadrature did not reach the requested tolerance")]
    ToleranceNotMet,
    #[error("region {region:?} has zero area at q* = {q_star}")]
    DegenerateRegion { region: Region, q_star: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

impl From<QuadError> for ErmError {
    fn from(_: QuadError) -> Self {
        ErmError::ToleranceNotMet
    }
}

impl From<CurveError> for ErmError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::OutOfRange { q } => ErmError::OutOfRange { q },
            _ => ErmError::InvalidParameter("invalid curve argument"),
        }
    }
}

/// How an [`ErmEstimate`] was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErmMethod {
    Exact1,
    Exact2,
    MonteCarlo,
}

impl ErmMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ErmMethod::Exact1 => "exact-1",
            ErmMethod::Exact2 => "exact-2",
            ErmMethod::MonteCarlo => "monte-carlo",
        }
    }
}

/// An expected-revenue value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErmEstimate {
    pub value: f64,
    pub method: ErmMethod,
    /// Standard error of the mean; 0 for exact methods.
    pub std_error: f64,
    /// Monte Carlo trial count; 0 for exact methods.
    pub trials: u64,
    pub n_samples: usize,
}

/// Partition element of the quantile square relative to the
/// revenue-maximizing quantile `q*`: both samples at or above it (`R`),
/// both below it (`L`), or one on each side (`B`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    R,
    L,
    B,
}

/// Two-sample ERM decision: expected revenue of the price the rule posts
/// when the sampled quantiles are `q1` and `q2`.
///
/// Posts the higher of the two sampled prices exactly when it is at least
/// twice the lower one (revenue at the quantile with the larger price), and
/// the lower price otherwise. Equal prices — possible only on the
/// constant-price first piece — resolve to the larger quantile, i.e. the
/// higher revenue, matching the smoothing limit.
///
/// ```
/// use erm2::curve::RevenueCurve;
/// use erm2::erm::e2;
///
/// let curve = RevenueCurve::truncated_equal_revenue(10.0).unwrap();
/// // Prices 10 and ~6.7 are within a factor of two: the lower one is
/// // posted and everyone buys.
/// assert_eq!(e2(&curve, 0.05, 0.15).unwrap(), 1.0);
/// ```
pub fn e2(curve: &RevenueCurve, q1: f64, q2: f64) -> Result<f64, ErmError> {
    check_quantile(q1)?;
    check_quantile(q2)?;
    let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
    let v_lo = curve.price_unchecked(lo);
    let v_hi = curve.price_unchecked(hi);
    if v_lo == v_hi {
        return Ok(curve.value_unchecked(hi));
    }
    if v_lo >= 2.0 * v_hi {
        Ok(curve.value_unchecked(lo))
    } else {
        Ok(curve.value_unchecked(hi))
    }
}

/// Price posted by ERM on a list of sample values: the sample value `p`
/// maximizing `p * |{i : v_i >= p}|`, ties in empirical revenue broken
/// toward the lower price.
pub fn erm_price(values: &[f64]) -> Result<f64, ErmError> {
    if values.is_empty() {
        return Err(ErmError::EmptySample);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    let mut best_price = sorted[0];
    let mut best_score = f64::NEG_INFINITY;
    for i in 0..n {
        if i > 0 && sorted[i] == sorted[i - 1] {
            continue;
        }
        let score = sorted[i] * (n - i) as f64;
        if score > best_score {
            best_score = score;
            best_price = sorted[i];
        }
    }
    Ok(best_price)
}

/// Index into ascending-sorted sample quantiles that ERM's price points at,
/// in the smoothing limit: maximize `v(q_(i)) * i` (the i lowest quantiles
/// carry the i highest prices), exact score ties resolving to the smaller
/// quantile, i.e. the higher price.
fn erm_choice(curve: &RevenueCurve, sorted_quantiles: &[f64]) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, &q) in sorted_quantiles.iter().enumerate() {
        let score = curve.price_unchecked(q) * (i + 1) as f64;
        if score > best_score {
            best_score = score;
            best = i;
        }
    }
    best
}

/// Expected revenue of the price ERM posts for the given sampled quantiles.
/// For two samples this reproduces [`e2`] exactly, tie-breaks included.
pub fn erm_revenue_for_quantiles(
    curve: &RevenueCurve,
    quantiles: &[f64],
) -> Result<f64, ErmError> {
    if quantiles.is_empty() {
        return Err(ErmError::EmptySample);
    }
    for &q in quantiles {
        check_quantile(q)?;
    }
    let mut qs = quantiles.to_vec();
    qs.sort_unstable_by(f64::total_cmp);
    Ok(curve.value_unchecked(qs[erm_choice(curve, &qs)]))
}

/// Largest quantile `x >= q` at which the two-sample rule still posts the
/// lower of the two prices when the better sample sits at `q`:
/// `sup { x >= q : 2 v(x) > v(q) }`, capped at 1.
///
/// On `[q*, 1]` this satisfies `t(q) in [q, min(2q, 1)]` and
/// `v(t(q)) = v(q) / 2` whenever `t(q) < 1`.
pub fn threshold_upper(curve: &RevenueCurve, q: f64) -> Result<f64, ErmError> {
    check_quantile(q)?;
    Ok(threshold_upper_unchecked(curve, q))
}

fn threshold_upper_unchecked(curve: &RevenueCurve, q: f64) -> f64 {
    let vq = curve.price_unchecked(q);
    if vq <= 0.0 {
        // Revenue is identically zero from q on; the threshold degenerates
        // (q = 1 on curves ending at zero revenue).
        return q;
    }
    curve.price_crossing(0.5 * vq).max(q)
}

/// Rightmost quantile `x <= q` whose price is at least twice the price at
/// `q`: `sup { x <= q : v(x) >= 2 v(q) }`, 0 when the set is empty.
///
/// Satisfies `t(q) <= q / 2` on the rising part of the curve and
/// `v(t(q)) = 2 v(q)` whenever `t(q) != 0`.
pub fn threshold_lower(curve: &RevenueCurve, q: f64) -> Result<f64, ErmError> {
    check_quantile(q)?;
    Ok(threshold_lower_unchecked(curve, q))
}

fn threshold_lower_unchecked(curve: &RevenueCurve, q: f64) -> f64 {
    if q == 0.0 {
        return 0.0;
    }
    let vq = curve.price_unchecked(q);
    if vq <= 0.0 {
        return q;
    }
    curve.price_crossing_weak(2.0 * vq).min(q)
}

/// Exact expected two-sample revenue conditioned on the smaller sampled
/// quantile being `q` (the larger one is then uniform on `[q, 1]`).
pub fn e2_given_min(curve: &RevenueCurve, q: f64) -> Result<f64, ErmError> {
    check_quantile(q)?;
    if q >= 1.0 {
        return Ok(curve.value_unchecked(1.0));
    }
    let t = threshold_upper_unchecked(curve, q);
    Ok(
        ((curve.integral_to(t) - curve.integral_to(q)) + (1.0 - t) * curve.value_unchecked(q))
            / (1.0 - q),
    )
}

/// Exact expected two-sample revenue conditioned on the larger sampled
/// quantile being `q` (the smaller one is then uniform on `[0, q]`).
pub fn e2_given_max(curve: &RevenueCurve, q: f64) -> Result<f64, ErmError> {
    check_quantile(q)?;
    if q <= 0.0 {
        return Ok(0.0);
    }
    let t = threshold_lower_unchecked(curve, q);
    Ok((curve.integral_to(t) + (q - t) * curve.value_unchecked(q)) / q)
}

/// Expected ERM revenue from one sample: the integral of the revenue curve.
pub fn erm1_exact(curve: &RevenueCurve) -> ErmEstimate {
    ErmEstimate {
        value: curve.total_area(),
        method: ErmMethod::Exact1,
        std_error: 0.0,
        trials: 0,
        n_samples: 1,
    }
}

/// Expected ERM revenue from two samples, by quadrature to absolute
/// tolerance `tol`.
///
/// Conditioned on the smaller quantile being `q`, the larger one is uniform
/// on `[q, 1]` and the rule posts the lower price below `t(q)` and the
/// higher price above it, so the expectation is
/// `2 * integral of [ integral of r from q to t(q) + (1 - t(q)) r(q) ] dq`
/// with `t` the upper threshold. The inner integral is closed-form.
pub fn erm2_exact(curve: &RevenueCurve, tol: f64) -> Result<ErmEstimate, ErmError> {
    check_tol(tol)?;
    let g = |q: f64| {
        let t = threshold_upper_unchecked(curve, q);
        (curve.integral_to(t) - curve.integral_to(q))
            + (1.0 - t) * curve.value_unchecked(q)
    };
    let forced = upper_threshold_splits(curve);
    let value = 2.0 * quad::integrate(g, 0.0, 1.0, &forced, 0.5 * tol)?;
    Ok(ErmEstimate {
        value,
        method: ErmMethod::Exact2,
        std_error: 0.0,
        trials: 0,
        n_samples: 2,
    })
}

/// Expected two-sample ERM revenue conditioned on the sample pair falling in
/// the given region of the quantile square.
pub fn erm2_region_exact(
    curve: &RevenueCurve,
    region: Region,
    tol: f64,
) -> Result<ErmEstimate, ErmError> {
    check_tol(tol)?;
    let q_star = curve.opt().q_star;
    let value = match region {
        Region::R => {
            if q_star >= 1.0 {
                return Err(ErmError::DegenerateRegion { region, q_star });
            }
            let g = |q: f64| {
                let t = threshold_upper_unchecked(curve, q);
                (curve.integral_to(t) - curve.integral_to(q))
                    + (1.0 - t) * curve.value_unchecked(q)
            };
            let forced = upper_threshold_splits(curve);
            let w = 1.0 - q_star;
            2.0 / (w * w) * quad::integrate(g, q_star, 1.0, &forced, 0.5 * tol * w * w)?
        }
        Region::L => {
            if q_star <= 0.0 {
                return Err(ErmError::DegenerateRegion { region, q_star });
            }
            let g = |q: f64| {
                let t = threshold_lower_unchecked(curve, q);
                curve.integral_to(t) + (q - t) * curve.value_unchecked(q)
            };
            let forced = lower_threshold_splits(curve);
            2.0 / (q_star * q_star)
                * quad::integrate(g, 0.0, q_star, &forced, 0.5 * tol * q_star * q_star)?
        }
        Region::B => {
            if !(q_star > 0.0 && q_star < 1.0) {
                return Err(ErmError::DegenerateRegion { region, q_star });
            }
            // One sample at x < q*, the other uniform on [q*, 1]; below the
            // clamped upper threshold the rule posts the lower price.
            let base = curve.integral_to(q_star);
            let g = |x: f64| {
                let t = threshold_upper_unchecked(curve, x).clamp(q_star, 1.0);
                (curve.integral_to(t) - base) + (1.0 - t) * curve.value_unchecked(x)
            };
            let forced = upper_threshold_splits(curve);
            let area = q_star * (1.0 - q_star);
            1.0 / area * quad::integrate(g, 0.0, q_star, &forced, tol * area)?
        }
    };
    Ok(ErmEstimate {
        value,
        method: ErmMethod::Exact2,
        std_error: 0.0,
        trials: 0,
        n_samples: 2,
    })
}

/// Breakpoints plus every quantile whose upper threshold lands on a
/// breakpoint; between consecutive points the two-sample integrand is smooth.
fn upper_threshold_splits(curve: &RevenueCurve) -> Vec<f64> {
    let mut pts: Vec<f64> = curve.breakpoints().iter().map(|p| p.0).collect();
    for &(bq, _) in curve.breakpoints() {
        let vb = curve.price_unchecked(bq);
        if vb > 0.0 {
            let x = curve.price_crossing_weak(2.0 * vb);
            if x > 0.0 && x < 1.0 {
                pts.push(x);
            }
        }
    }
    pts
}

fn lower_threshold_splits(curve: &RevenueCurve) -> Vec<f64> {
    let mut pts: Vec<f64> = curve.breakpoints().iter().map(|p| p.0).collect();
    for &(bq, _) in curve.breakpoints() {
        let vb = curve.price_unchecked(bq);
        if vb > 0.0 {
            let x = curve.price_crossing_weak(0.5 * vb);
            if x > 0.0 && x < 1.0 {
                pts.push(x);
            }
        }
    }
    pts
}

const MC_SHARD: u64 = 1 << 14;

/// Monte Carlo estimate of the expected ERM revenue from `n` samples.
///
/// Each trial draws `n` sample quantiles plus one fresh buyer quantile from
/// a seeded deterministic generator. The posted price's revenue is recorded
/// through its exact acceptance quantile rather than the fresh draw (the
/// conditional expectation of the same estimator, at lower variance).
/// Trials run in fixed-size shards whose substreams derive from
/// `(seed, shard index)`, and the reduction shape is fixed, so the result is
/// identical for any degree of parallelism.
pub fn erm_mc(
    curve: &RevenueCurve,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<ErmEstimate, ErmError> {
    if n == 0 {
        return Err(ErmError::InvalidParameter("n must be at least 1"));
    }
    if trials == 0 {
        return Err(ErmError::InvalidParameter("trials must be at least 1"));
    }
    let shards = trials.div_ceil(MC_SHARD);
    let partials: Vec<(f64, f64)> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let count = MC_SHARD.min(trials - shard * MC_SHARD);
            let mut qs = vec![0.0f64; n];
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..count {
                for slot in qs.iter_mut() {
                    *slot = rng.random();
                }
                let _fresh: f64 = rng.random();
                qs.sort_unstable_by(f64::total_cmp);
                let revenue = curve.value_unchecked(qs[erm_choice(curve, &qs)]);
                sum += revenue;
                sumsq += revenue * revenue;
            }
            (sum, sumsq)
        })
        .collect();
    let (sum, sumsq) = pairwise_sum(&partials);
    let t = trials as f64;
    let mean = sum / t;
    let std_error = if trials > 1 {
        (((sumsq - sum * mean) / (t - 1.0)).max(0.0) / t).sqrt()
    } else {
        0.0
    };
    Ok(ErmEstimate {
        value: mean,
        method: ErmMethod::MonteCarlo,
        std_error,
        trials,
        n_samples: n,
    })
}

fn pairwise_sum(parts: &[(f64, f64)]) -> (f64, f64) {
    match parts.len() {
        0 => (0.0, 0.0),
        1 => parts[0],
        len => {
            let (a, b) = parts.split_at(len / 2);
            let (s0, q0) = pairwise_sum(a);
            let (s1, q1) = pairwise_sum(b);
            (s0 + s1, q0 + q1)
        }
    }
}

fn check_quantile(q: f64) -> Result<(), ErmError> {
    if q.is_finite() && (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(ErmError::OutOfRange { q })
    }
}

fn check_tol(tol: f64) -> Result<(), ErmError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(ErmError::InvalidParameter("tolerance must be positive"))
    }
}
