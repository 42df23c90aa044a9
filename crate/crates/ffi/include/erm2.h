/* C interface to the erm2 revenue analysis library. */

#ifndef ERM2_H
#define ERM2_H

/* Generated by cbindgen from erm2-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef struct Erm2Curve Erm2Curve;

/**
 * Result code of every ABI call.
 */
typedef enum Erm2Status {
  ERM2_STATUS_OK = 0,
  ERM2_STATUS_NULL_POINTER = 1,
  ERM2_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Breakpoints rejected: non-monotone quantiles, concavity violation,
   * negative revenue, or nonzero revenue at quantile 0.
   */
  ERM2_STATUS_INVALID_CURVE = 3,
  ERM2_STATUS_OUT_OF_RANGE = 4,
  ERM2_STATUS_TOLERANCE_NOT_MET = 5,
  ERM2_STATUS_DEGENERATE_REGION = 6,
  ERM2_STATUS_EMPTY_SAMPLE = 7,
  ERM2_STATUS_PARSE_ERROR = 8,
  ERM2_STATUS_INVALID_UTF8 = 9,
  ERM2_STATUS_INTERNAL_ERROR = 10,
} Erm2Status;

/**
 * Region of the quantile square relative to the revenue-maximizing
 * quantile.
 */
typedef enum Erm2Region {
  ERM2_REGION_BOTH_AT_OR_ABOVE = 0,
  ERM2_REGION_BOTH_BELOW = 1,
  ERM2_REGION_STRADDLING = 2,
} Erm2Region;

/**
 * Order-statistic quantity selector.
 */
typedef enum Erm2OrderStat {
  ERM2_ORDER_STAT_MIN_DENSITY = 0,
  ERM2_ORDER_STAT_MAX_DENSITY = 1,
  ERM2_ORDER_STAT_MAX_COND_BELOW = 2,
  ERM2_ORDER_STAT_MAX_COND_ABOVE = 3,
} Erm2OrderStat;

/**
 * Evaluated lower-bound components at a given q*, as fractions of the
 * optimal revenue.
 */
typedef struct Erm2BoundReport {
  double q_star;
  double delta;
  double gamma;
  double bound_r;
  double bound_l;
  double bound_b;
  double combined;
} Erm2BoundReport;

/**
 * Builds a curve from parallel quantile and revenue arrays of length `len`.
 *
 * # Safety
 * `quantiles` and `revenues` must point to `len` readable doubles; `out`
 * must be valid for one pointer write.
 */
enum Erm2Status erm2_curve_new(const double *quantiles,
                               const double *revenues,
                               size_t len,
                               Erm2Curve **out);

/**
 * Parses the curve text format (one `q r` pair per line, `#` comments).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` valid for one write.
 */
enum Erm2Status erm2_curve_parse(const char *text, Erm2Curve **out);

/**
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum Erm2Status erm2_curve_triangular(double q_star, Erm2Curve **out);

/**
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum Erm2Status erm2_curve_truncated_equal_revenue(double v_max, Erm2Curve **out);

/**
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum Erm2Status erm2_curve_quadrilateral(double q_b, double r_b, Erm2Curve **out);

/**
 * Copy of `curve` with every revenue multiplied by `alpha`.
 *
 * # Safety
 * `curve` must be a live handle; `out` valid for one pointer write.
 */
enum Erm2Status erm2_curve_scale(const Erm2Curve *curve, double alpha, Erm2Curve **out);

/**
 * Releases a curve handle; a null pointer is a no-op.
 *
 * # Safety
 * `curve` must be null or a handle not yet freed.
 */
void erm2_curve_free(Erm2Curve *curve);

/**
 * # Safety
 * `curve` must be a live handle; `out` valid for one write.
 */
enum Erm2Status erm2_curve_breakpoint_count(const Erm2Curve *curve, size_t *out);

/**
 * Writes the curve text format as a newly allocated NUL-terminated string;
 * release it with [`erm2_string_free`].
 *
 * # Safety
 * `curve` must be a live handle; `out` valid for one pointer write.
 */
enum Erm2Status erm2_curve_to_text(const Erm2Curve *curve, char **out);

/**
 * # Safety
 * `text` must be null or a string returned by this library, not yet freed.
 */
void erm2_string_free(char *text);

/**
 * # Safety
 * `curve` must be a live handle; `out` valid for one write.
 */
enum Erm2Status erm2_curve_value_at(const Erm2Curve *curve, double q, double *out);

/**
 * # Safety
 * `curve` must be a live handle; `out` valid for one write.
 */
enum Erm2Status erm2_curve_price_at(const Erm2Curve *curve, double q, double *out);

/**
 * Maximum revenue and the smallest quantile attaining it.
 *
 * # Safety
 * `curve` must be a live handle; both outs valid for one write each.
 */
enum Erm2Status erm2_curve_opt(const Erm2Curve *curve, double *q_star_out, double *opt_out);

/**
 * Two-sample decision: expected revenue of the price posted for sampled
 * quantiles `q1`, `q2`.
 *
 * # Safety
 * `curve` must be a live handle; `out` valid for one write.
 */
enum Erm2Status erm2_e2(const Erm2Curve *curve, double q1, double q2, double *out);

/**
 * Price posted by empirical revenue maximization on raw sample values.
 *
 * # Safety
 * `values` must point to `len` readable doubles; `out` valid for one write.
 */
enum Erm2Status erm2_erm_price(const double *values, size_t len, double *out);

/**
 * # Safety
 * `curve` must be a live handle; `out` valid for one write.
 */
enum Erm2Status erm2_threshold_upper(const Erm2Curve *curve, double q, double *out);

/**
 * # Safety
 * `curve` must be a live handle; `out` valid for one write.
 */
enum Erm2Status erm2_threshold_lower(const Erm2Curve *curve, double q, double *out);

/**
 * Exact one-sample expected revenue (the integral of the curve).
 *
 * # Safety
 * `curve` must be a live handle; `out` valid for one write.
 */
enum Erm2Status erm2_erm1_exact(const Erm2Curve *curve, double *out);

/**
 * Exact two-sample expected revenue to absolute tolerance `tol`.
 *
 * # Safety
 * `curve` must be a live handle; `out` valid for one write.
 */
enum Erm2Status erm2_erm2_exact(const Erm2Curve *curve, double tol, double *out);

/**
 * Exact two-sample expected revenue conditioned on the sample pair falling
 * in `region`.
 *
 * # Safety
 * `curve` must be a live handle; `out` valid for one write.
 */
enum Erm2Status erm2_erm2_region_exact(const Erm2Curve *curve,
                                       enum Erm2Region region,
                                       double tol,
                                       double *out);

/**
 * Seeded Monte Carlo estimate of the `n`-sample expected revenue; writes
 * the mean and its standard error.
 *
 * # Safety
 * `curve` must be a live handle; both outs valid for one write each.
 */
enum Erm2Status erm2_erm_mc(const Erm2Curve *curve,
                            size_t n,
                            uint64_t trials,
                            uint64_t seed,
                            double *value_out,
                            double *std_error_out);

/**
 * # Safety
 * `out` must be valid for one write.
 */
enum Erm2Status erm2_bound_r(double q_star, double *out);

/**
 * # Safety
 * `out` must be valid for one write.
 */
enum Erm2Status erm2_bound_l(double delta, double *out);

/**
 * # Safety
 * `out` must be valid for one write.
 */
enum Erm2Status erm2_bound_b(double q_star, double *out);

/**
 * # Safety
 * `out` must be valid for one write.
 */
enum Erm2Status erm2_trr_bound(double m, double *out);

/**
 * # Safety
 * `out` must be valid for one write.
 */
enum Erm2Status erm2_cdec_bound(double q, double r_q, double *out);

/**
 * Area-weighted combination of the regional bounds at `q_star`.
 *
 * # Safety
 * `out` must be valid for one struct write.
 */
enum Erm2Status erm2_combined_bound(double q_star, struct Erm2BoundReport *out);

/**
 * Minimizes the combined bound over q*; writes the minimizer and the
 * minimum, which is checked to clear 0.509.
 *
 * # Safety
 * Both outs must be valid for one write each.
 */
enum Erm2Status erm2_minimize_combined(double *q_star_out, double *bound_out);

/**
 * Maximizes the both-below bound over its split parameter.
 *
 * # Safety
 * Both outs must be valid for one write each.
 */
enum Erm2Status erm2_optimize_delta(double *delta_out, double *bound_out);

/**
 * Order-statistic densities and conditional expectations for two uniform
 * draws; `m` is consulted only by the minimum density.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum Erm2Status erm2_order_stat(enum Erm2OrderStat kind, double q, double m, double *out);

/**
 * Static description of a status code.
 */
const char *erm2_status_message(enum Erm2Status status);

#endif  /* ERM2_H */
