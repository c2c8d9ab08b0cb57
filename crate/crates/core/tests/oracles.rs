//! Cross-checks of the special functions and weights against independent computations.

use fracfp::fracweights::{fractional_integral_of_power, mittag_leffler, power_kernel, weight_row};
use fracfp::{FractionalOrder, TimeGrid};

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn weights_match_kernel_quadrature() {
    let grid = TimeGrid::graded(12, 1.5, 2.0).unwrap();
    for a in [0.3, 0.6, 0.9] {
        let alpha = FractionalOrder::new(a).unwrap();
        let n = 12;
        let row = weight_row(&grid, alpha, n).unwrap();
        let tn = grid.t(n);
        for j in 1..n {
            let kernel = |s: f64| (tn - s).powf(a - 1.0) / libm::tgamma(a);
            let q = simpson(kernel, grid.t(j - 1), grid.t(j), 2000);
            assert!((row.values[j - 1] - q).abs() <= 1e-10 * q, "a={a} j={j}");
        }
        let last = grid.k(n).powf(a) / libm::tgamma(a + 1.0);
        assert!((row.diagonal() - last).abs() <= 1e-14 * last);
    }
}

#[test]
fn mittag_leffler_integral_branch_matches_direct_series() {
    // pairs where the alternating series loses at most a few digits
    let cases = [
        (0.3, -1.2f64),
        (0.3, -1.6),
        (0.5, -1.2),
        (0.5, -2.0),
        (0.5, -3.0),
        (0.8, -2.0),
        (0.8, -3.0),
        (0.95, -3.0),
    ];
    for (beta, z) in cases {
        let mut direct = 0.0;
        for k in 0..400 {
            let g = libm::tgamma(1.0 + k as f64 * beta);
            if !g.is_finite() {
                break;
            }
            direct += z.powi(k) / g;
        }
        let v = mittag_leffler(beta, z).unwrap();
        assert!(((v - direct) / direct).abs() < 1e-10, "beta={beta} z={z}: {v} vs {direct}");
    }
}

#[test]
fn relaxation_is_monotone() {
    // E_α(-t^α) decreases from 1 and stays positive
    for a in [0.25, 0.5, 0.75] {
        let mut prev = 1.0;
        for i in 1..60 {
            let t = 0.05 * i as f64 * i as f64;
            let v = mittag_leffler(a, -t.powf(a)).unwrap();
            assert!(v > 0.0 && v < prev, "a={a} t={t}");
            prev = v;
        }
    }
}

#[test]
fn semigroup_identity_by_quadrature() {
    // ∫_0^t ω_α(t-s) ω_β(s) ds = ω_{α+β}(t) with smooth kernels
    for (a, b, t) in [(2.5, 3.0, 0.7), (3.5, 2.25, 2.0), (1.0, 3.0, 1.3), (2.0, 2.0, 1.0)] {
        let q = simpson(|s| power_kernel(a, t - s) * power_kernel(b, s), 0.0, t, 4000);
        let exact = fractional_integral_of_power(a, b, t).unwrap();
        assert!((q - exact).abs() <= 1e-8 * exact, "({a},{b},{t}): {q} vs {exact}");
    }
}
