//! Convolution weights for the Riemann–Liouville memory term.
//!
//! For time levels `t_0 < … < t_N` the weights are
//! `ω_nj = ∫_{t_{j-1}}^{t_j} ω_α(t_n - s) ds = [(t_n - t_{j-1})^α - (t_n - t_j)^α] / Γ(α + 1)`.

pub mod special;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::meshes::TimeGrid;

pub use special::{fractional_integral_of_power, gamma, ln_gamma, mittag_leffler, power_kernel};

/// Below this ratio `k_j / (t_n - t_j)` the weight is formed through `expm1`/`ln_1p`.
const CANCELLATION_SWITCH: f64 = 1e-4;

/// Fractional exponent `0 < α ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(FractionalOrder(alpha))
        } else {
            invalid(format!("fractional order must lie in (0, 1], got {alpha}"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = String;

    fn try_from(v: f64) -> std::result::Result<Self, Self::Error> {
        FractionalOrder::new(v).map_err(|e| e.to_string())
    }
}

impl From<FractionalOrder> for f64 {
    fn from(a: FractionalOrder) -> f64 {
        a.0
    }
}

/// `ω_n1 … ω_nn` for one step index.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightRow {
    pub n: usize,
    pub values: Vec<f64>,
}

impl WeightRow {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `ω_nn`, the weight multiplying the implicit term.
    pub fn diagonal(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

/// Weight row for step `n` (`1 ≤ n ≤ N`).
pub fn weight_row(grid: &TimeGrid, alpha: FractionalOrder, n: usize) -> Result<WeightRow> {
    if n == 0 || n > grid.n_steps() {
        return invalid(format!(
            "step index {n} outside 1..={}",
            grid.n_steps()
        ));
    }
    let mut values = vec![0.0; n];
    fill_weight_row(grid, alpha, n, &mut values);
    Ok(WeightRow { n, values })
}

/// Writes `ω_n1 … ω_nn` into `out[..n]`.
pub(crate) fn fill_weight_row(grid: &TimeGrid, alpha: FractionalOrder, n: usize, out: &mut [f64]) {
    let levels = grid.levels();
    let steps = grid.steps();
    if alpha.is_classical() {
        out[..n].copy_from_slice(&steps[..n]);
        return;
    }
    let a = alpha.value();
    let scale = 1.0 / gamma(a + 1.0);
    let tn = levels[n];
    for j in 1..=n {
        let k = steps[j - 1];
        let near = tn - levels[j];
        let w = if near > 0.0 && k / near < CANCELLATION_SWITCH {
            near.powf(a) * (a * (k / near).ln_1p()).exp_m1()
        } else {
            (tn - levels[j - 1]).powf(a) - near.powf(a)
        };
        out[j - 1] = w * scale;
    }
}

/// History coefficients `c_nj = ω_nj - ω_{n-1,j}` for `1 ≤ j ≤ n-1` (requires `n ≥ 2`).
pub fn history_coefficients(grid: &TimeGrid, alpha: FractionalOrder, n: usize) -> Result<Vec<f64>> {
    if n < 2 || n > grid.n_steps() {
        return invalid(format!(
            "history coefficients need 2 <= n <= {}, got {n}",
            grid.n_steps()
        ));
    }
    let current = weight_row(grid, alpha, n)?;
    let previous = weight_row(grid, alpha, n - 1)?;
    Ok(current
        .values
        .iter()
        .zip(previous.values.iter())
        .map(|(w, p)| w - p)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn half() -> FractionalOrder {
        FractionalOrder::new(0.5).unwrap()
    }

    #[test]
    fn order_bounds() {
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(1.2).is_err());
        assert!(FractionalOrder::new(f64::NAN).is_err());
        assert!(FractionalOrder::new(1.0).unwrap().is_classical());
    }

    #[test]
    fn first_weight_unit_steps() {
        let g = TimeGrid::uniform(4, 4.0).unwrap();
        let row = weight_row(&g, half(), 1).unwrap();
        assert!((row.values[0] - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-14);
        let row4 = weight_row(&g, half(), 4).unwrap();
        assert!((row4.sum() - 2.256_758_334_191_025).abs() < 1e-14);
        assert!((row4.diagonal() - row.values[0]).abs() < 1e-15);
    }

    #[test]
    fn classical_weights_are_steps() {
        let g = TimeGrid::graded(7, 1.3, 2.5).unwrap();
        let one = FractionalOrder::new(1.0).unwrap();
        for n in 1..=7 {
            assert_eq!(weight_row(&g, one, n).unwrap().values, g.steps()[..n].to_vec());
        }
        for n in 2..=7 {
            assert!(history_coefficients(&g, one, n).unwrap().iter().all(|&c| c == 0.0));
        }
    }

    #[test]
    fn second_history_coefficient() {
        let g = TimeGrid::uniform(4, 4.0).unwrap();
        let c = history_coefficients(&g, half(), 2).unwrap();
        assert_eq!(c.len(), 1);
        let expect = (2f64.sqrt() - 2.0) / gamma(1.5);
        assert!((c[0] - expect).abs() < 1e-14);
        assert!((c[0] + 0.660_989_2).abs() < 1e-7);
    }

    #[test]
    fn index_errors() {
        let g = TimeGrid::uniform(4, 1.0).unwrap();
        assert!(weight_row(&g, half(), 0).is_err());
        assert!(weight_row(&g, half(), 5).is_err());
        assert!(history_coefficients(&g, half(), 1).is_err());
    }

    #[test]
    fn uniform_weights_are_toeplitz_and_decreasing() {
        let g = TimeGrid::uniform(50, 1.0).unwrap();
        let a = FractionalOrder::new(0.3).unwrap();
        let r50 = weight_row(&g, a, 50).unwrap();
        let r20 = weight_row(&g, a, 20).unwrap();
        for lag in 0..20 {
            let x = r50.values[49 - lag];
            let y = r20.values[19 - lag];
            assert!((x - y).abs() < 1e-13 * x);
        }
        // decreasing in n - j means increasing in j
        assert!(r50.values.windows(2).all(|w| w[0] < w[1]));
    }

    proptest! {
        #[test]
        fn weights_positive_and_sum_telescopes(
            n_steps in 2usize..400, gamma_exp in 1.0f64..4.0, a in 0.05f64..1.0, t in 0.1f64..10.0
        ) {
            let g = TimeGrid::graded(n_steps, t, gamma_exp).unwrap();
            let alpha = FractionalOrder::new(a).unwrap();
            for n in [1, n_steps / 2 + 1, n_steps] {
                let row = weight_row(&g, alpha, n).unwrap();
                prop_assert!(row.values.iter().all(|&w| w > 0.0));
                let exact = g.t(n).powf(a) / gamma(a + 1.0);
                prop_assert!((row.sum() - exact).abs() <= 1e-12 * exact);
            }
            let c = history_coefficients(&g, alpha, n_steps).unwrap();
            prop_assert!(c.iter().all(|&x| x < 0.0));
        }
    }
}
