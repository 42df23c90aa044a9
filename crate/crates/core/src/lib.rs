//! Revenue analysis for sample-based posted pricing on regular distributions.
//!
//! A regular value distribution is modeled by its revenue curve in quantile
//! space: a concave piecewise-linear map from a quantile `q` (the probability
//! that a fresh buyer value meets the price) to the expected revenue `r(q)`
//! of posting the price with that acceptance probability. On top of that
//! model, this crate provides:
//!
//! - [`curve`]: construction, validation, evaluation, sampling and text I/O
//!   for revenue curves;
//! - [`erm`]: the empirical revenue maximization (ERM) pricing rule, its
//!   two-sample decision function, and exact (quadrature) and Monte Carlo
//!   evaluation of its expected revenue from `n` samples;
//! - [`bounds`]: closed-form worst-case lower bounds on the two-sample ERM
//!   revenue as a fraction of the optimal posted-price revenue, split by
//!   where the samples fall relative to the revenue-maximizing quantile,
//!   together with the one-dimensional optimizations that combine them;
//! - [`experiments`]: canned reproductions of the small exact instances that
//!   separate one-sample from two-sample ERM, a random curve generator, and
//!   worst-case searches over curve families.
//!
//! The `erm2` binary exposes all of this on the command line.

pub mod bounds;
pub mod curve;
pub mod erm;
pub mod experiments;
pub mod quad;
pub mod report;

mod golden;
