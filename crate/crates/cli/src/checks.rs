//! Invariant checks behind `fracfp check`.

use fracfp::assembly::{assemble_mass, assemble_operator, discrete_initial_data, InitMethod, InitialData};
use fracfp::fracweights::{gamma, mittag_leffler, weight_row};
use fracfp::quadrature::gauss4;
use fracfp::{solve_tridiagonal, ExperimentConfig, FractionalOrder, Scheme};

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Hooks for negative controls.
#[derive(Debug, Clone, Copy, Default)]
pub struct Faults {
    /// Added to `ω_n1` of every row before the weight-sum check.
    pub weight_perturbation: f64,
}

const WEIGHT_TOL: f64 = 1e-12;
const CLASSICAL_TOL: f64 = 1e-12;
const ORTHOGONALITY_TOL: f64 = 1e-12;
const ML_TOL: f64 = 1e-10;

pub fn run_checks(cfg: &ExperimentConfig, faults: Faults) -> Result<Vec<CheckOutcome>, CliError> {
    cfg.validate()?;
    Ok(vec![
        weight_sums(cfg, faults)?,
        classical_equivalence(cfg)?,
        projection_orthogonality(cfg)?,
        mittag_leffler_oracle()?,
    ])
}

fn weight_sums(cfg: &ExperimentConfig, faults: Faults) -> Result<CheckOutcome, CliError> {
    let grid = cfg.grid()?;
    let mut worst: f64 = 0.0;
    for a in [cfg.alpha, 0.25, 0.5, 0.75, 1.0] {
        let alpha = FractionalOrder::new(a)?;
        let scale = 1.0 / gamma(a + 1.0);
        for n in 1..=grid.n_steps() {
            let mut row = weight_row(&grid, alpha, n)?;
            row.values[0] += faults.weight_perturbation;
            let exact = grid.t(n).powf(a) * scale;
            worst = worst.max((row.sum() - exact).abs() / exact);
        }
    }
    Ok(CheckOutcome {
        name: "weight sums equal t_n^α/Γ(1+α)",
        passed: worst <= WEIGHT_TOL,
        detail: format!("max relative deviation {worst:.3e} over N = {}", grid.n_steps()),
    })
}

/// α = 1 through the convolution stepper against plain backward Euler.
fn classical_equivalence(cfg: &ExperimentConfig) -> Result<CheckOutcome, CliError> {
    let classical = ExperimentConfig {
        alpha: 1.0,
        ..cfg.clone()
    };
    let scheme = Scheme::from_config(&classical)?;
    let (data, method) = classical.initial_data();
    let u0 = discrete_initial_data(&scheme.mesh, &data, method)?;
    let (hist, _) = scheme.run(u0.clone())?;

    let m = assemble_mass(&scheme.mesh);
    let grid = &scheme.grid;
    let mut u = u0;
    let mut worst: f64 = 0.0;
    let mut size: f64 = 1.0;
    for n in 1..=grid.n_steps() {
        let g = assemble_operator(&scheme.mesh, scheme.kappa, &scheme.drift, grid.t(n))?;
        let a = m.add_scaled(grid.k(n), &g);
        u = solve_tridiagonal(&a, &m.mul_vec(&u))?.x;
        for (x, y) in u.iter().zip(hist.get(n)) {
            worst = worst.max((x - y).abs());
            size = size.max(x.abs());
        }
    }
    Ok(CheckOutcome {
        name: "α = 1 reproduces backward Euler",
        passed: worst <= CLASSICAL_TOL * size,
        detail: format!("max difference {worst:.3e} (solution size {size:.3e})"),
    })
}

/// `⟨P_h u_0 - u_0, φ_i⟩ = 0` for the jump data, with the load vector integrated piecewise.
fn projection_orthogonality(cfg: &ExperimentConfig) -> Result<CheckOutcome, CliError> {
    let mesh = cfg.mesh()?;
    let len = cfg.right - cfg.left;
    let (lo, hi) = (cfg.left + len / 4.0, cfg.left + 3.0 * len / 4.0);
    let p = discrete_initial_data(&mesh, &InitialData::Indicator { lo, hi }, InitMethod::L2Projection)?;
    let mp = assemble_mass(&mesh).mul_vec(&p);

    let x = mesh.nodes();
    let first = mesh.first_free_node();
    let mut worst: f64 = 0.0;
    for (i, &mp_i) in mp.iter().enumerate() {
        let node = first + i;
        let mut b = 0.0;
        for e in [node.wrapping_sub(1), node] {
            if e >= mesh.element_count() {
                continue;
            }
            let (x0, x1) = (x[e], x[e + 1]);
            let (a, c) = (x0.max(lo), x1.min(hi));
            if a < c {
                let hat = |s: f64| if e == node { (x1 - s) / (x1 - x0) } else { (s - x0) / (x1 - x0) };
                b += gauss4(a, c, hat);
            }
        }
        worst = worst.max((mp_i - b).abs());
    }
    let passed = worst <= ORTHOGONALITY_TOL * mesh.h_max();
    Ok(CheckOutcome {
        name: "L2 projection is orthogonal to the finite element space",
        passed,
        detail: format!("max |M P_h u0 - (u0, φ_i)| = {worst:.3e}"),
    })
}

fn mittag_leffler_oracle() -> Result<CheckOutcome, CliError> {
    let mut worst: f64 = 0.0;
    // E_{1/2}(z) = exp(z²) erfc(-z)
    for z in [-0.5f64, -1.0, -2.0, -5.0, -10.0, -30.0, 0.5] {
        let exact = (z * z).exp() * libm::erfc(-z);
        worst = worst.max(((mittag_leffler(0.5, z)? - exact) / exact).abs());
    }
    // E_2(-x²) = cos x
    for x in [0.1f64, 0.5, 0.9] {
        let exact = f64::cos(x);
        worst = worst.max(((mittag_leffler(2.0, -x * x)? - exact) / exact).abs());
    }
    for z in [-3.0f64, -0.2, 2.0] {
        worst = worst.max(((mittag_leffler(1.0, z)? - f64::exp(z)) / f64::exp(z)).abs());
    }
    Ok(CheckOutcome {
        name: "Mittag-Leffler function matches closed forms",
        passed: worst <= ML_TOL,
        detail: format!("max relative deviation {worst:.3e}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            n_steps: 60,
            qh: 15,
            ..Default::default()
        }
    }

    #[test]
    fn default_checks_pass() {
        let out = run_checks(&small(), Faults::default()).unwrap();
        assert_eq!(out.len(), 4);
        for c in &out {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn zero_flux_checks_pass() {
        let cfg = ExperimentConfig {
            n_steps: 64,
            ..ExperimentConfig::resonance()
        };
        for c in run_checks(&cfg, Faults::default()).unwrap() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn perturbed_weights_fail() {
        let faults = Faults {
            weight_perturbation: 1e-9,
        };
        let out = run_checks(&small(), faults).unwrap();
        assert!(!out[0].passed);
        assert!(out[1..].iter().all(|c| c.passed));
    }
}
