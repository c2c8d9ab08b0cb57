//! Gauss–Legendre rules on reference intervals and an adaptive Gauss–Kronrod integrator.

/// 4-point Gauss–Legendre rule on `[-1, 1]`, exact through degree 7.
pub const GAUSS4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_26,
    0.339_981_043_584_856_26,
    0.861_136_311_594_052_6,
];
pub const GAUSS4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_85,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_85,
];

/// Integrate `f` over `[x0, x1]` with the 4-point rule.
pub fn gauss4<F: Fn(f64) -> f64>(x0: f64, x1: f64, f: F) -> f64 {
    let mid = 0.5 * (x0 + x1);
    let half = 0.5 * (x1 - x0);
    GAUSS4_NODES
        .iter()
        .zip(GAUSS4_WEIGHTS.iter())
        .map(|(&s, &w)| w * f(mid + half * s))
        .sum::<f64>()
        * half
}

// Kronrod 15-point extension of the 7-point Gauss rule (abscissae on [0, 1]).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_47,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let sum = f(c - dx) + f(c + dx);
        k += WGK[i] * sum;
        if i % 2 == 1 {
            g += WG[i / 2] * sum;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod quadrature. Returns `None` if the error target
/// is not met within the subdivision budget.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Option<f64> {
    let mut intervals = vec![(a, b, kronrod15(&f, a, b))];
    for _ in 0..2000 {
        let total: f64 = intervals.iter().map(|iv| iv.2 .0).sum();
        let err: f64 = intervals.iter().map(|iv| iv.2 .1).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Some(total);
        }
        let (worst, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))?;
        let (lo, hi, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        intervals.push((lo, mid, kronrod15(&f, lo, mid)));
        intervals.push((mid, hi, kronrod15(&f, mid, hi)));
    }
    let total: f64 = intervals.iter().map(|iv| iv.2 .0).sum();
    let err: f64 = intervals.iter().map(|iv| iv.2 .1).sum();
    (err <= abs_tol.max(rel_tol * total.abs())).then_some(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss4_exact_through_degree_seven() {
        let f = |x: f64| 3.0 * x.powi(7) - x.powi(6) + 2.0 * x.powi(3) + 1.0;
        let anti = |x: f64| 3.0 / 8.0 * x.powi(8) - x.powi(7) / 7.0 + 0.5 * x.powi(4) + x;
        let exact = anti(1.7) - anti(-0.3);
        assert!((gauss4(-0.3, 1.7, f) - exact).abs() < 1e-13 * exact.abs());
    }

    #[test]
    fn adaptive_smooth_and_peaked() {
        let v = adaptive(f64::exp, 0.0, 1.0, 1e-14, 0.0).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
        let eps = 1e-3;
        let v = adaptive(|x| eps / (x * x + eps * eps), -1.0, 1.0, 1e-13, 0.0).unwrap();
        let exact = 2.0 * (1.0 / eps).atan();
        assert!((v - exact).abs() < 1e-12 * exact);
    }
}
