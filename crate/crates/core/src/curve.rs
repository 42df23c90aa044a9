//! Concave piecewise-linear revenue curves in quantile space.
//!
//! A [`RevenueCurve`] is an ordered list of breakpoints `(q, r)` with
//! `q_0 = 0`, `q_k = 1` and `r(0) = 0`, interpolated linearly in between.
//! Concavity of the curve is what makes the underlying value distribution
//! regular, and it is validated at construction time rather than repaired:
//! the bound-verification code downstream depends on the invariants holding
//! exactly as stated.
//!
//! The price (value) at quantile `q` is `v(q) = r(q) / q`, the slope of the
//! ray from the origin to the point `(q, r(q))`. Concavity plus `r(0) = 0`
//! make `v` nonincreasing. An atom of the distribution at its top value shows
//! up as the first linear piece, on which `v` is constant; all calculations
//! treat that piece as the limit of an atomless smoothing, so distinct
//! quantiles on it are still ranked by quantile.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Absolute tolerance on slope increases before a curve is rejected as
/// non-concave.
pub const CONCAVITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("breakpoint quantiles must be strictly increasing from 0 to 1")]
    NonMonotoneQuantiles,
    #[error("segment slopes increase at breakpoint {index} (by {excess:e}); curve is not concave")]
    NonConcave { index: usize, excess: f64 },
    #[error("revenue values must be finite and nonnegative")]
    NegativeRevenue,
    #[error("revenue at quantile 0 must be 0")]
    NonzeroOrigin,
    #[error("scale factor must be positive and finite")]
    NonPositiveScale,
    #[error("quantile {q} outside [0, 1]")]
    OutOfRange { q: f64 },
    #[error("bump point violates concavity of the curve")]
    InfeasibleBump,
    #[error("curve file line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Location and value of the maximum of a revenue curve.
///
/// The maximum of a concave piecewise-linear function is attained at a
/// breakpoint; when several breakpoints tie, `q_star` is the smallest
/// maximizing quantile, so flat-topped curves report the left end of the
/// plateau.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptPoint {
    pub q_star: f64,
    pub opt: f64,
}

/// A validated concave piecewise-linear revenue curve on `[0, 1]`.
///
/// ```
/// use erm2::curve::RevenueCurve;
///
/// let curve = RevenueCurve::truncated_equal_revenue(10.0)?;
/// assert_eq!(curve.value_at(0.5)?, 1.0);
/// assert!((curve.price_at(0.5)? - 2.0).abs() < 1e-14);
/// assert_eq!(curve.opt().q_star, 0.1);
/// # Ok::<(), erm2::curve::CurveError>(())
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct RevenueCurve {
    points: Vec<(f64, f64)>,
    slopes: Vec<f64>,
    /// `cum_area[i]` is the integral of the curve from 0 to `points[i].0`.
    cum_area: Vec<f64>,
}

/// Quantiles drawn uniformly for sampling, with the prices they map to.
#[derive(Debug, Clone)]
pub struct SampleDraw {
    pub values: Vec<f64>,
    pub quantiles: Vec<f64>,
}

impl RevenueCurve {
    /// Validates breakpoints and builds a curve.
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self, CurveError> {
        if breakpoints.len() < 2 {
            return Err(CurveError::NonMonotoneQuantiles);
        }
        for &(q, _) in &breakpoints {
            if !q.is_finite() {
                return Err(CurveError::NonMonotoneQuantiles);
            }
        }
        if breakpoints[0].0 != 0.0 || breakpoints[breakpoints.len() - 1].0 != 1.0 {
            return Err(CurveError::NonMonotoneQuantiles);
        }
        if breakpoints.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(CurveError::NonMonotoneQuantiles);
        }
        for &(_, r) in &breakpoints {
            if !r.is_finite() || r < 0.0 {
                return Err(CurveError::NegativeRevenue);
            }
        }
        if breakpoints[0].1 != 0.0 {
            return Err(CurveError::NonzeroOrigin);
        }
        let slopes: Vec<f64> = breakpoints
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        for i in 1..slopes.len() {
            let excess = slopes[i] - slopes[i - 1];
            if excess > CONCAVITY_TOL {
                return Err(CurveError::NonConcave { index: i, excess });
            }
        }
        Ok(Self::assemble(breakpoints, slopes))
    }

    fn assemble(points: Vec<(f64, f64)>, slopes: Vec<f64>) -> Self {
        let mut cum_area = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        cum_area.push(0.0);
        for w in points.windows(2) {
            acc += 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
            cum_area.push(acc);
        }
        RevenueCurve {
            points,
            slopes,
            cum_area,
        }
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub(crate) fn num_pieces(&self) -> usize {
        self.slopes.len()
    }

    /// Index `i` with `points[i].0 <= q <= points[i+1].0`.
    pub(crate) fn piece_containing(&self, q: f64) -> usize {
        let j = self.points.partition_point(|p| p.0 <= q);
        j.clamp(1, self.points.len() - 1) - 1
    }

    /// y-intercept of the extended line of piece `i`; nonnegative for a
    /// concave curve through the origin, and exactly zero on the first piece.
    pub(crate) fn intercept(&self, i: usize) -> f64 {
        let (q, r) = self.points[i];
        r - self.slopes[i] * q
    }

    pub(crate) fn value_unchecked(&self, q: f64) -> f64 {
        let i = self.piece_containing(q);
        let (q1, r1) = self.points[i + 1];
        if q == q1 {
            return r1;
        }
        let (q0, r0) = self.points[i];
        r0 + self.slopes[i] * (q - q0)
    }

    pub(crate) fn price_unchecked(&self, q: f64) -> f64 {
        if q == 0.0 {
            self.slopes[0]
        } else {
            self.value_unchecked(q) / q
        }
    }

    /// Expected revenue `r(q)` of posting the price with acceptance
    /// probability `q`.
    pub fn value_at(&self, q: f64) -> Result<f64, CurveError> {
        check_quantile(q)?;
        Ok(self.value_unchecked(q))
    }

    /// Price `v(q) = r(q) / q`; at `q = 0` the right limit, i.e. the slope of
    /// the first piece.
    pub fn price_at(&self, q: f64) -> Result<f64, CurveError> {
        check_quantile(q)?;
        Ok(self.price_unchecked(q))
    }

    /// Maximum revenue and the smallest quantile attaining it.
    pub fn opt(&self) -> OptPoint {
        let mut best = self.points[0];
        for &(q, r) in &self.points[1..] {
            if r > best.1 {
                best = (q, r);
            }
        }
        OptPoint {
            q_star: best.0,
            opt: best.1,
        }
    }

    /// Multiplies every revenue by `alpha`, leaving quantiles unchanged.
    pub fn scale(&self, alpha: f64) -> Result<RevenueCurve, CurveError> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(CurveError::NonPositiveScale);
        }
        let points: Vec<(f64, f64)> = self.points.iter().map(|&(q, r)| (q, alpha * r)).collect();
        let slopes: Vec<f64> = points
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        Ok(Self::assemble(points, slopes))
    }

    /// Integral of the curve from 0 to `q` (closed form per piece).
    pub(crate) fn integral_to(&self, q: f64) -> f64 {
        let i = self.piece_containing(q);
        let (q0, r0) = self.points[i];
        if q == q0 {
            return self.cum_area[i];
        }
        let r = r0 + self.slopes[i] * (q - q0);
        self.cum_area[i] + 0.5 * (r0 + r) * (q - q0)
    }

    /// Integral of the whole curve, i.e. the expected revenue of posting a
    /// single uniformly sampled quantile's price.
    pub(crate) fn total_area(&self) -> f64 {
        *self.cum_area.last().unwrap()
    }

    /// Rightmost quantile where the price still exceeds `w` (strictly);
    /// 0 when even the opening price does not.
    pub(crate) fn price_crossing(&self, w: f64) -> f64 {
        if self.price_unchecked(1.0) > w {
            return 1.0;
        }
        if self.slopes[0] <= w {
            return 0.0;
        }
        self.crossing_in_pieces(w)
    }

    /// Rightmost quantile where the price is still at least `w` (weakly);
    /// 0 when the set is empty. Differs from [`Self::price_crossing`] only
    /// when the opening piece sits exactly at level `w`.
    pub(crate) fn price_crossing_weak(&self, w: f64) -> f64 {
        if self.price_unchecked(1.0) >= w {
            return 1.0;
        }
        if self.slopes[0] < w {
            return 0.0;
        }
        self.crossing_in_pieces(w)
    }

    fn crossing_in_pieces(&self, w: f64) -> f64 {
        for i in 0..self.num_pieces() {
            let hi = self.points[i + 1].0;
            let v_hi = self.slopes[i] + self.intercept(i) / hi;
            if v_hi >= w {
                continue;
            }
            let ic = self.intercept(i);
            if ic <= 0.0 {
                // Constant-price piece below the level; the crossing is at
                // its left end (reachable only through rounding).
                return self.points[i].0;
            }
            let x = ic / (w - self.slopes[i]);
            return x.clamp(self.points[i].0, hi);
        }
        1.0
    }

    /// Draws `n` i.i.d. uniform quantiles from a seeded generator and maps
    /// them to prices.
    pub fn sample_values(&self, n: usize, seed: u64) -> SampleDraw {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let quantiles: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let values = quantiles.iter().map(|&q| self.price_unchecked(q)).collect();
        SampleDraw { values, quantiles }
    }

    /// Curve that climbs linearly to revenue 1 at `q_star` and falls back to
    /// 0 at quantile 1 (or stays at 1 when `q_star = 1`).
    pub fn triangular(q_star: f64) -> Result<RevenueCurve, CurveError> {
        if !(q_star > 0.0 && q_star <= 1.0) {
            return Err(CurveError::OutOfRange { q: q_star });
        }
        if q_star == 1.0 {
            RevenueCurve::new(vec![(0.0, 0.0), (1.0, 1.0)])
        } else {
            RevenueCurve::new(vec![(0.0, 0.0), (q_star, 1.0), (1.0, 0.0)])
        }
    }

    /// Constant-revenue curve truncated at top value `v_max`: climbs to
    /// revenue 1 on `[0, 1/v_max]` and stays flat at 1 afterwards.
    pub fn truncated_equal_revenue(v_max: f64) -> Result<RevenueCurve, CurveError> {
        if !v_max.is_finite() || v_max <= 1.0 {
            return Err(CurveError::OutOfRange { q: v_max });
        }
        RevenueCurve::new(vec![(0.0, 0.0), (1.0 / v_max, 1.0), (1.0, 1.0)])
    }

    /// Straight climb to `(1, 1)` with a bump at `(q_b, r_b)`.
    ///
    /// Feasible exactly when the bump lies strictly above the diagonal,
    /// which for this three-point family is the concavity condition.
    pub fn quadrilateral(q_b: f64, r_b: f64) -> Result<RevenueCurve, CurveError> {
        if !(q_b > 0.0 && q_b < 1.0) {
            return Err(CurveError::OutOfRange { q: q_b });
        }
        let bump_ok = r_b / q_b > (1.0 - r_b) / (1.0 - q_b);
        if !bump_ok {
            return Err(CurveError::InfeasibleBump);
        }
        RevenueCurve::new(vec![(0.0, 0.0), (q_b, r_b), (1.0, 1.0)])
    }

    /// Triangular curve with peak at `(q_star, 1)` and a bump at `(q_b, r_b)`
    /// on its rising edge.
    pub fn bumped_triangular(q_star: f64, q_b: f64, r_b: f64) -> Result<RevenueCurve, CurveError> {
        if q_star == 1.0 {
            return RevenueCurve::quadrilateral(q_b, r_b);
        }
        if !(q_star > 0.0 && q_star < 1.0) {
            return Err(CurveError::OutOfRange { q: q_star });
        }
        if !(q_b > 0.0 && q_b < q_star) {
            return Err(CurveError::OutOfRange { q: q_b });
        }
        let bump_ok = r_b < 1.0 && r_b / q_b > (1.0 - r_b) / (q_star - q_b);
        if !bump_ok {
            return Err(CurveError::InfeasibleBump);
        }
        RevenueCurve::new(vec![(0.0, 0.0), (q_b, r_b), (q_star, 1.0), (1.0, 0.0)])
    }

    /// Parses the curve text format: one `q r` pair per line, `#` comments
    /// and blank lines ignored, breakpoints ascending in `q`.
    pub fn parse(text: &str) -> Result<RevenueCurve, CurveError> {
        let mut points = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let (qs, rs) = match (it.next(), it.next(), it.next()) {
                (Some(q), Some(r), None) => (q, r),
                _ => {
                    return Err(CurveError::Parse {
                        line: idx + 1,
                        reason: format!("expected two numbers, got {line:?}"),
                    })
                }
            };
            let q: f64 = qs.parse().map_err(|_| CurveError::Parse {
                line: idx + 1,
                reason: format!("invalid quantile {qs:?}"),
            })?;
            let r: f64 = rs.parse().map_err(|_| CurveError::Parse {
                line: idx + 1,
                reason: format!("invalid revenue {rs:?}"),
            })?;
            points.push((q, r));
        }
        RevenueCurve::new(points)
    }

    /// Writes the curve text format. Numbers use the shortest representation
    /// that parses back bit-exactly, so `parse(to_text(c)) == c`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for &(q, r) in &self.points {
            out.push_str(&format!("{q} {r}\n"));
        }
        out
    }
}

fn check_quantile(q: f64) -> Result<(), CurveError> {
    if q.is_finite() && (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(CurveError::OutOfRange { q })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trunc10() -> RevenueCurve {
        RevenueCurve::truncated_equal_revenue(10.0).unwrap()
    }

    fn identity() -> RevenueCurve {
        RevenueCurve::new(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap()
    }

    #[test]
    fn builds_single_linear_piece() {
        let c = identity();
        assert_eq!(c.value_at(0.25).unwrap(), 0.25);
    }

    #[test]
    fn builds_truncated_equal_revenue() {
        let c = trunc10();
        assert_eq!(c.breakpoints(), &[(0.0, 0.0), (0.1, 1.0), (1.0, 1.0)]);
    }

    #[test]
    fn rejects_unsorted_quantiles() {
        let err = RevenueCurve::new(vec![(0.0, 0.0), (0.5, 1.0), (0.4, 1.2)]).unwrap_err();
        assert_eq!(err, CurveError::NonMonotoneQuantiles);
    }

    #[test]
    fn rejects_bad_endpoints_and_origin() {
        assert_eq!(
            RevenueCurve::new(vec![(0.1, 0.0), (1.0, 1.0)]).unwrap_err(),
            CurveError::NonMonotoneQuantiles
        );
        assert_eq!(
            RevenueCurve::new(vec![(0.0, 0.1), (1.0, 1.0)]).unwrap_err(),
            CurveError::NonzeroOrigin
        );
        assert_eq!(
            RevenueCurve::new(vec![(0.0, 0.0), (0.5, -0.1), (1.0, 1.0)]).unwrap_err(),
            CurveError::NegativeRevenue
        );
    }

    #[test]
    fn rejects_convex_kink() {
        let err = RevenueCurve::new(vec![(0.0, 0.0), (0.5, 0.2), (1.0, 1.0)]).unwrap_err();
        assert!(matches!(err, CurveError::NonConcave { index: 1, .. }));
    }

    #[test]
    fn value_at_examples() {
        let c = trunc10();
        assert!((c.value_at(0.05).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(c.value_at(0.5).unwrap(), 1.0);
        assert!(c.value_at(1.5).is_err());
    }

    #[test]
    fn price_at_examples() {
        let c = trunc10();
        assert!((c.price_at(0.5).unwrap() - 2.0).abs() < 1e-14);
        assert!((c.price_at(0.05).unwrap() - 10.0).abs() < 1e-13);
        assert_eq!(identity().price_at(0.0).unwrap(), 1.0);
    }

    #[test]
    fn opt_picks_smallest_maximizer() {
        assert_eq!(
            trunc10().opt(),
            OptPoint {
                q_star: 0.1,
                opt: 1.0
            }
        );
        assert_eq!(
            identity().opt(),
            OptPoint {
                q_star: 1.0,
                opt: 1.0
            }
        );
        let tri = RevenueCurve::triangular(0.5).unwrap();
        assert_eq!(
            tri.opt(),
            OptPoint {
                q_star: 0.5,
                opt: 1.0
            }
        );
    }

    #[test]
    fn scale_examples() {
        let doubled = identity().scale(2.0).unwrap();
        assert_eq!(
            doubled.opt(),
            OptPoint {
                q_star: 1.0,
                opt: 2.0
            }
        );
        assert_eq!(trunc10().scale(1.0).unwrap(), trunc10());
        let halved = trunc10().scale(0.5).unwrap();
        for i in 1..=100 {
            let q = i as f64 / 100.0;
            let ratio = halved.price_at(q).unwrap() / trunc10().price_at(q).unwrap();
            assert!((ratio - 0.5).abs() < 1e-12);
        }
        assert_eq!(
            identity().scale(0.0).unwrap_err(),
            CurveError::NonPositiveScale
        );
    }

    #[test]
    fn sampling_is_deterministic_and_constant_on_identity() {
        let c = identity();
        let draw = c.sample_values(3, 7);
        assert_eq!(draw.values, vec![1.0, 1.0, 1.0]);
        let again = c.sample_values(3, 7);
        assert_eq!(draw.quantiles, again.quantiles);
        assert!(c.sample_values(0, 7).values.is_empty());
    }

    #[test]
    fn sampled_price_frequency_matches_quantile() {
        // The price on the truncated curve is >= 2 exactly when the quantile
        // is <= 0.5, so the empirical frequency is binomial(n, 0.5).
        let c = trunc10();
        let n = 1_000_000;
        let draw = c.sample_values(n, 42);
        let hits = draw.values.iter().filter(|&&v| v >= 2.0).count();
        let frac = hits as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.002, "frac = {frac}");
    }

    #[test]
    fn constructor_examples() {
        assert_eq!(
            RevenueCurve::truncated_equal_revenue(10.0)
                .unwrap()
                .breakpoints(),
            &[(0.0, 0.0), (0.1, 1.0), (1.0, 1.0)]
        );
        assert_eq!(
            RevenueCurve::quadrilateral(0.1, 0.22).unwrap().breakpoints(),
            &[(0.0, 0.0), (0.1, 0.22), (1.0, 1.0)]
        );
        assert_eq!(
            RevenueCurve::triangular(1.0).unwrap().breakpoints(),
            &[(0.0, 0.0), (1.0, 1.0)]
        );
        assert_eq!(
            RevenueCurve::quadrilateral(0.5, 0.4).unwrap_err(),
            CurveError::InfeasibleBump
        );
    }

    #[test]
    fn text_format_round_trips_bit_exactly() {
        let c = RevenueCurve::new(vec![
            (0.0, 0.0),
            (0.1, 0.22),
            (1.0 / 3.0, 0.6066666666666667),
            (1.0, 1.0),
        ])
        .unwrap();
        let text = c.to_text();
        let back = RevenueCurve::parse(&text).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = RevenueCurve::parse("# comment\n0 0\n0.5 oops\n1 1\n").unwrap_err();
        assert!(matches!(err, CurveError::Parse { line: 3, .. }));
    }

    #[test]
    fn price_is_exact_on_flat_first_piece_of_identity() {
        let c = identity();
        for i in 1..100 {
            let q = i as f64 / 100.0;
            assert_eq!(c.price_at(q).unwrap(), 1.0);
        }
    }
}
