//! Acceptance suite: every criterion below prints one `[PASS]`/`[FAIL]`
//! line (run with `--nocapture` to see them) and enforces its stated
//! tolerance and runtime budget.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use erm2::bounds::{self, OrderStat};
use erm2::curve::RevenueCurve;
use erm2::erm;
use erm2::experiments::{self, random_regular_curve};
use erm2::quad;

const SEED: u64 = 20260810;

struct Criterion {
    name: &'static str,
    started: Instant,
    failures: Vec<String>,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Criterion {
            name,
            started: Instant::now(),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, what: &str, ok: bool) {
        if !ok {
            self.failures.push(what.to_owned());
        }
    }

    fn check_close(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        if !ok {
            self.failures
                .push(format!("{what}: got {got}, want {want} +/- {tol}"));
        }
    }

    fn finish(mut self, budget_secs: f64) {
        let elapsed = self.started.elapsed().as_secs_f64();
        if elapsed >= budget_secs {
            self.failures
                .push(format!("runtime {elapsed:.2} s exceeded {budget_secs} s"));
        }
        if self.failures.is_empty() {
            println!("[PASS] {} ({elapsed:.2} s)", self.name);
        } else {
            println!("[FAIL] {} ({elapsed:.2} s)", self.name);
            for f in &self.failures {
                println!("       {f}");
            }
            panic!("acceptance criterion failed: {}", self.name);
        }
    }
}

#[test]
fn criterion_1_truncated_equal_revenue_exact_values() {
    let mut c = Criterion::new("truncated equal-revenue exact values (0.95 / 11/12)");
    let curve = RevenueCurve::truncated_equal_revenue(10.0).unwrap();
    let one = erm::erm1_exact(&curve).value;
    c.check_close("one-sample revenue", one, 0.95, 1e-9);
    let two = erm::erm2_exact(&curve, 1e-9).unwrap().value;
    c.check_close("two-sample revenue", two, 11.0 / 12.0, 1e-6);
    c.check("two samples earn strictly less", two < one);
    c.finish(1.0);
}

#[test]
fn criterion_2_bumped_curve_dominates_pointwise_but_loses() {
    let mut c = Criterion::new("pointwise dominance with two-sample reversal (2/3 vs < 0.651)");
    let f = RevenueCurve::quadrilateral(0.1, 0.22).unwrap();
    let g = RevenueCurve::triangular(1.0).unwrap();
    let mut dominated = true;
    for i in 1..10_000 {
        let q = i as f64 / 10_000.0;
        if f.value_at(q).unwrap() <= g.value_at(q).unwrap() {
            dominated = false;
            break;
        }
    }
    c.check("pointwise dominance on the interior grid", dominated);
    c.check_close(
        "straight-climb two-sample revenue",
        erm::erm2_exact(&g, 1e-10).unwrap().value,
        2.0 / 3.0,
        1e-9,
    );
    let erm2_f = erm::erm2_exact(&f, 1e-10).unwrap().value;
    c.check("bumped curve stays below 0.651", erm2_f < 0.651);
    c.check_close(
        "bumped curve one-sample revenue",
        erm::erm1_exact(&f).value,
        0.56,
        1e-9,
    );
    c.finish(1.0);
}

#[test]
fn criterion_3_bound_constants_and_minimum() {
    let mut c = Criterion::new("bound constants (0.528344 / delta 0.15117 / minimum 0.50922)");
    c.check_close(
        "both-below bound at the published delta",
        bounds::bound_l(0.15117).unwrap(),
        0.528344,
        1e-5,
    );
    let (delta, _) = bounds::optimize_delta();
    c.check_close("optimal delta", delta, 0.15117, 1e-3);
    let (q_star, bound) = bounds::minimize_combined().unwrap();
    c.check_close("combined minimizer", q_star, 0.713832, 1e-3);
    c.check_close("combined minimum", bound, 0.50922, 1e-4);
    c.check("combined minimum clears 0.509", bound > 0.509);
    let below = bounds::combined_bound(2.0 / 3.0 - 1e-12).unwrap().combined;
    let above = bounds::combined_bound(2.0 / 3.0).unwrap().combined;
    c.check_close("branch continuity at 2/3", below, above, 1e-9);
    c.finish(1.0);
}

#[test]
fn criterion_4_quadrature_cross_validated_by_monte_carlo() {
    let mut c = Criterion::new("quadrature vs 1e6-trial Monte Carlo on 100 random curves");
    let outliers: usize = (0..100u64)
        .map(|i| {
            let curve = random_regular_curve(SEED + i, 1 + (i as usize % 12));
            let exact = erm::erm2_exact(&curve, 1e-9).unwrap().value;
            let mc = erm::erm_mc(&curve, 2, 1_000_000, SEED + 1000 + i).unwrap();
            usize::from((exact - mc.value).abs() > 4.0 * mc.std_error)
        })
        .sum();
    c.check(
        &format!("at most 1 of 100 curves outside 4 sigma (got {outliers})"),
        outliers <= 1,
    );
    c.finish(120.0);
}

#[test]
fn criterion_5_worst_case_guarantee_on_500_curves() {
    let mut c = Criterion::new("two-sample guarantee and regional floors on 500 random curves");
    let report = experiments::theorem_check(500, SEED);
    for (label, value) in &report.computed {
        match label.as_str() {
            "min_ratio" => c.check(
                &format!("minimum two-sample ratio {value} > 0.509"),
                *value > 0.509,
            ),
            "min_erm1" => c.check(
                &format!("minimum one-sample ratio {value} >= 0.5"),
                *value >= 0.5,
            ),
            "min_margin_r" | "min_margin_l" | "min_margin_b" => c.check(
                &format!("{label} = {value} >= -1e-7"),
                *value >= -1e-7,
            ),
            _ => {}
        }
    }
    c.check("theorem sweep report passes", report.pass);
    c.finish(300.0);
}

#[test]
fn criterion_6_threshold_and_order_statistic_suite() {
    let mut c = Criterion::new("threshold geometry and order-statistic formulas");

    // Threshold properties on 1000-point grids over 50 random curves.
    let threshold_failures: Vec<String> = (0..50u64)
        .into_par_iter()
        .flat_map_iter(|i| {
            let curve = random_regular_curve(SEED + 4000 + i, 1 + (i as usize % 12));
            let q_star = curve.opt().q_star;
            let mut bad = Vec::new();
            let mut prev_upper = 0.0f64;
            let mut prev_lower = 0.0f64;
            for k in 0..=1000 {
                let frac = k as f64 / 1000.0;

                let q = q_star + (1.0 - q_star) * frac;
                let t = erm::threshold_upper(&curve, q).unwrap();
                if !(t >= q - 1e-12 && t <= (2.0 * q).min(1.0) + 1e-12) {
                    bad.push(format!("curve {i}: upper threshold range at q={q}"));
                }
                if t < prev_upper - 1e-12 {
                    bad.push(format!("curve {i}: upper threshold not monotone at q={q}"));
                }
                prev_upper = t;
                if t < 1.0 {
                    let vt = curve.price_at(t).unwrap();
                    let vq = curve.price_at(q).unwrap();
                    if (vt - vq / 2.0).abs() > 1e-9 * vq.max(1.0) {
                        bad.push(format!("curve {i}: half-price identity at q={q}"));
                    }
                }

                let q = q_star * frac;
                let t = erm::threshold_lower(&curve, q).unwrap();
                if t > q / 2.0 + 1e-12 {
                    bad.push(format!("curve {i}: lower threshold above q/2 at q={q}"));
                }
                if t < prev_lower - 1e-12 {
                    bad.push(format!("curve {i}: lower threshold not monotone at q={q}"));
                }
                prev_lower = t;
                if t > 0.0 {
                    let vt = curve.price_at(t).unwrap();
                    let vq = curve.price_at(q).unwrap();
                    if (vt - 2.0 * vq).abs() > 1e-9 * vt.max(1.0) {
                        bad.push(format!("curve {i}: double-price identity at q={q}"));
                    }
                }
            }
            bad
        })
        .collect();
    c.check(
        &format!(
            "threshold grids clean on 50 curves ({} violations)",
            threshold_failures.len()
        ),
        threshold_failures.is_empty(),
    );

    // Densities integrate to 1.
    for m in [0.0, 0.3, 0.7] {
        let mass = quad::integrate(
            |q| bounds::order_stat(OrderStat::MinDensity, q, m).unwrap(),
            m,
            1.0,
            &[],
            1e-12,
        )
        .unwrap();
        c.check_close(&format!("minimum density mass (m = {m})"), mass, 1.0, 1e-10);
    }
    let mass = quad::integrate(
        |q| bounds::order_stat(OrderStat::MaxDensity, q, 0.0).unwrap(),
        0.0,
        1.0,
        &[],
        1e-12,
    )
    .unwrap();
    c.check_close("maximum density mass", mass, 1.0, 1e-10);

    // Conditional expectations of the pair maximum against a million draws.
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9000);
    let maxima: Vec<f64> = (0..1_000_000)
        .map(|_| {
            let a: f64 = rng.random();
            let b: f64 = rng.random();
            a.max(b)
        })
        .collect();
    for q in [0.3, 0.6, 0.85] {
        let below: Vec<f64> = maxima.iter().copied().filter(|&x| x <= q).collect();
        let above: Vec<f64> = maxima.iter().copied().filter(|&x| x >= q).collect();
        for (subset, formula, label) in [
            (
                below,
                bounds::order_stat(OrderStat::MaxCondBelow, q, 0.0).unwrap(),
                "below",
            ),
            (
                above,
                bounds::order_stat(OrderStat::MaxCondAbove, q, 0.0).unwrap(),
                "above",
            ),
        ] {
            let n = subset.len() as f64;
            let mean = subset.iter().sum::<f64>() / n;
            let var = subset.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let sem = (var / n).sqrt();
            c.check(
                &format!(
                    "conditional mean of the maximum {label} {q}: {mean} vs {formula} (sem {sem:.2e})"
                ),
                (mean - formula).abs() <= 4.0 * sem,
            );
        }
    }
    c.finish(120.0);
}
