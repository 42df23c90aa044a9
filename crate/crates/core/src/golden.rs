//! Deterministic one-dimensional minimization: a coarse grid scan to locate
//! the basin, then golden-section refinement inside the bracketing cells.
//! Exact ties on the grid resolve to the smaller index, so results are
//! bit-stable across runs.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes `f` on `[a, b]` to argument tolerance `xtol`, seeding from an
/// `n`-point grid. Returns `(x_min, f_min)`.
pub(crate) fn grid_golden_min<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    n: usize,
    xtol: f64,
) -> (f64, f64) {
    debug_assert!(n >= 2 && a < b);
    let step = (b - a) / n as f64;
    let mut best_i = 0;
    let mut best_f = f64::INFINITY;
    for i in 0..=n {
        let x = if i == n { b } else { a + step * i as f64 };
        let fx = f(x);
        if fx < best_f {
            best_f = fx;
            best_i = i;
        }
    }
    let lo = if best_i == 0 { a } else { a + step * (best_i - 1) as f64 };
    let hi = if best_i >= n - 1 { b } else { a + step * (best_i + 1) as f64 };
    let (x, fx) = golden_min(&f, lo, hi, xtol);
    if fx < best_f {
        (x, fx)
    } else {
        let xg = if best_i == n { b } else { a + step * best_i as f64 };
        (xg, best_f)
    }
}

/// Maximizes `f` on `[a, b]`; same search as [`grid_golden_min`].
pub(crate) fn grid_golden_max<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    n: usize,
    xtol: f64,
) -> (f64, f64) {
    let (x, neg) = grid_golden_min(|x| -f(x), a, b, n, xtol);
    (x, -neg)
}

pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > xtol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
