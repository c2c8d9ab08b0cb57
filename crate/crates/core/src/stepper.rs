//! Fully-discrete implicit-Euler time stepping with the Riemann–Liouville memory term.
//!
//! Step `n` solves
//! `(M + ω_nn G^n) U^n = M U^{n-1} - G^n Σ_{j<n} (ω_nj - ω_{n-1,j}) U^j`
//! with `G^n` the operator frozen at `t_n`.

use crate::assembly::{self, DriftField};
use crate::config::ExperimentConfig;
use crate::error::{invalid, Error, Result};
use crate::fracweights::{fill_weight_row, FractionalOrder};
use crate::meshes::{SpatialMesh, TimeGrid};
use crate::tridiag::{residual_max_norm, TriDiagMatrix};

/// Growth factors beyond this are treated as a failed factorization.
const MAX_PIVOT_GROWTH: f64 = 1e12;

/// All coefficient vectors `U^0 … U^n` of a run, stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionHistory {
    grid: TimeGrid,
    dofs: usize,
    data: Vec<f64>,
}

impl SolutionHistory {
    pub fn new(grid: TimeGrid, initial: Vec<f64>) -> Self {
        let dofs = initial.len();
        let mut data = Vec::with_capacity(dofs * (grid.n_steps() + 1));
        data.extend_from_slice(&initial);
        SolutionHistory { grid, dofs, data }
    }

    /// Number of stored vectors.
    pub fn len(&self) -> usize {
        self.data.len() / self.dofs
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dofs(&self) -> usize {
        self.dofs
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn get(&self, n: usize) -> &[f64] {
        &self.data[n * self.dofs..(n + 1) * self.dofs]
    }

    pub fn last(&self) -> &[f64] {
        self.get(self.len() - 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dofs)
    }

    fn push(&mut self, v: &[f64]) {
        debug_assert_eq!(v.len(), self.dofs);
        self.data.extend_from_slice(v);
    }
}

/// Diagnostics for one completed step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub n: usize,
    /// `max |A U^n - rhs|` recomputed after the solve.
    pub residual_norm: f64,
    /// `‖rhs‖_∞`, the scale for `residual_norm`.
    pub rhs_norm: f64,
    pub solve_pivot_growth: f64,
    /// `∫_Ω U^n_h`.
    pub mass_total: f64,
}

/// Spatial and temporal discretisation of one problem instance.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub mesh: SpatialMesh,
    pub grid: TimeGrid,
    pub alpha: FractionalOrder,
    pub kappa: f64,
    pub drift: DriftField,
}

impl Scheme {
    pub fn new(
        mesh: SpatialMesh,
        grid: TimeGrid,
        alpha: FractionalOrder,
        kappa: f64,
        drift: DriftField,
    ) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return invalid(format!("kappa must be positive, got {kappa}"));
        }
        Ok(Scheme {
            mesh,
            grid,
            alpha,
            kappa,
            drift,
        })
    }

    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        Scheme::new(
            config.mesh()?,
            config.grid()?,
            config.order()?,
            config.kappa,
            config.drift_field()?,
        )
    }

    pub fn stepper(&self) -> Stepper<'_> {
        Stepper::new(self)
    }

    /// Run all `N` steps from `u0`.
    pub fn run(&self, u0: Vec<f64>) -> Result<(SolutionHistory, Vec<StepReport>)> {
        if u0.len() != self.mesh.free_count() {
            return invalid(format!(
                "initial vector has length {}, mesh has {} free nodes",
                u0.len(),
                self.mesh.free_count()
            ));
        }
        let mut history = SolutionHistory::new(self.grid.clone(), u0);
        let mut stepper = self.stepper();
        let reports = (1..=self.grid.n_steps())
            .map(|n| stepper.step(&mut history, n))
            .collect::<Result<Vec<_>>>()?;
        Ok((history, reports))
    }

    /// `∫_Ω v_h` for a free-node coefficient vector.
    pub fn mass(&self, v: &[f64]) -> f64 {
        dot(&self.mesh.basis_integrals(), v)
    }
}

/// Step-by-step driver holding the per-run work buffers.
pub struct Stepper<'a> {
    scheme: &'a Scheme,
    mass: TriDiagMatrix,
    basis_integrals: Vec<f64>,
    current_row: Vec<f64>,
    previous_row: Vec<f64>,
    /// Step index whose weights are in `previous_row` (0 = none).
    previous_index: usize,
    acc: Vec<f64>,
    comp: Vec<f64>,
    work: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(scheme: &'a Scheme) -> Self {
        let n = scheme.grid.n_steps();
        let q = scheme.mesh.free_count();
        Stepper {
            scheme,
            mass: assembly::assemble_mass(&scheme.mesh),
            basis_integrals: scheme.mesh.basis_integrals(),
            current_row: vec![0.0; n],
            previous_row: vec![0.0; n],
            previous_index: 0,
            acc: vec![0.0; q],
            comp: vec![0.0; q],
            work: vec![0.0; q],
        }
    }

    /// Compute `U^n` from `U^0 … U^{n-1}` and append it to `history`.
    pub fn step(&mut self, history: &mut SolutionHistory, n: usize) -> Result<StepReport> {
        let scheme = self.scheme;
        let grid = &scheme.grid;
        if n == 0 || n > grid.n_steps() {
            return invalid(format!("step index {n} outside 1..={}", grid.n_steps()));
        }
        if history.len() != n {
            return invalid(format!(
                "step {n} needs U^0..U^{} but history holds {} vectors",
                n - 1,
                history.len()
            ));
        }
        if history.dofs() != scheme.mesh.free_count() {
            return invalid("history does not match the mesh");
        }

        if self.previous_index + 1 != n && n > 1 {
            fill_weight_row(grid, scheme.alpha, n - 1, &mut self.previous_row);
        }
        fill_weight_row(grid, scheme.alpha, n, &mut self.current_row);

        let t_n = grid.t(n);
        let g = assembly::assemble_operator(&scheme.mesh, scheme.kappa, &scheme.drift, t_n)?;

        // history sum S = Σ_{j=1}^{n-1} c_nj U^j, compensated per component
        self.acc.iter_mut().for_each(|v| *v = 0.0);
        self.comp.iter_mut().for_each(|v| *v = 0.0);
        if !scheme.alpha.is_classical() {
            for j in 1..n {
                let c = self.current_row[j - 1] - self.previous_row[j - 1];
                let u = history.get(j);
                for ((a, k), &x) in self.acc.iter_mut().zip(self.comp.iter_mut()).zip(u) {
                    let y = c * x - *k;
                    let t = *a + y;
                    *k = (t - *a) - y;
                    *a = t;
                }
            }
        }

        let q = history.dofs();
        let mut rhs = vec![0.0; q];
        self.mass.apply(history.get(n - 1), &mut rhs);
        g.apply(&self.acc, &mut self.work);
        for (r, w) in rhs.iter_mut().zip(&self.work) {
            *r -= w;
        }

        let omega_nn = self.current_row[n - 1];
        let system = self.mass.add_scaled(omega_nn, &g);
        let lu = system.factor().map_err(|e| Error::Solver {
            step: n,
            pivot_growth: f64::NAN,
            detail: e.to_string(),
        })?;
        let growth = lu.pivot_growth();
        let mut u = rhs.clone();
        lu.solve_in_place(&mut u);

        let residual_norm = residual_max_norm(&system, &u, &rhs);
        let rhs_norm = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(growth < MAX_PIVOT_GROWTH) || u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Solver {
                step: n,
                pivot_growth: growth,
                detail: format!(
                    "ill-conditioned system (pivot ratio {:.3e})",
                    lu.pivot_ratio()
                ),
            });
        }

        let mass_total = dot(&self.basis_integrals, &u);
        history.push(&u);
        std::mem::swap(&mut self.current_row, &mut self.previous_row);
        self.previous_index = n;

        Ok(StepReport {
            n,
            residual_norm,
            rhs_norm,
            solve_pivot_growth: growth,
            mass_total,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub scheme: Scheme,
    pub history: SolutionHistory,
    pub reports: Vec<StepReport>,
    pub initial_mass: f64,
}

/// Solve the problem described by `config`.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    let scheme = Scheme::from_config(config)?;
    let (data, method) = config.initial_data();
    let u0 = assembly::discrete_initial_data(&scheme.mesh, &data, method)?;
    let initial_mass = scheme.mass(&u0);
    let (history, reports) = scheme.run(u0)?;
    Ok(RunOutput {
        scheme,
        history,
        reports,
        initial_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{discrete_initial_data, InitMethod, InitialData};
    use crate::config::InitChoice;
    use crate::meshes::BoundaryCondition;
    use std::f64::consts::PI;

    fn scheme(alpha: f64, n: usize, qh: usize, drift: DriftField) -> Scheme {
        Scheme::new(
            SpatialMesh::uniform(0.0, PI, qh, BoundaryCondition::Dirichlet).unwrap(),
            TimeGrid::graded(n, 1.0, 1.0 / alpha).unwrap(),
            FractionalOrder::new(alpha).unwrap(),
            1.0,
            drift,
        )
        .unwrap()
    }

    #[test]
    fn small_run_has_tiny_residuals() {
        let cfg = ExperimentConfig {
            qh: 15,
            n_steps: 16,
            alpha: 0.5,
            ..Default::default()
        };
        let out = run(&cfg).unwrap();
        assert_eq!(out.history.len(), 17);
        assert_eq!(out.reports.len(), 16);
        for r in &out.reports {
            assert!(r.residual_norm <= 1e-10 * (r.rhs_norm + 1.0));
        }
    }

    #[test]
    fn zero_steps_keeps_initial_data() {
        let cfg = ExperimentConfig {
            n_steps: 0,
            qh: 7,
            ..Default::default()
        };
        let out = run(&cfg).unwrap();
        assert_eq!(out.history.len(), 1);
        assert!(out.reports.is_empty());
    }

    #[test]
    fn first_step_matrix() {
        // one step from U^0 reproduces (M + ω_11 G^1) U^1 = M U^0
        let s = scheme(0.5, 4, 7, DriftField::linear_sin());
        let u0: Vec<f64> = (0..7).map(|i| (i as f64 * 0.3).sin()).collect();
        let (hist, _) = s.run(u0.clone()).unwrap();
        let m = assembly::assemble_mass(&s.mesh);
        let g = assembly::assemble_operator(&s.mesh, 1.0, &s.drift, s.grid.t(1)).unwrap();
        let w11 = s.grid.k(1).powf(0.5) / crate::fracweights::gamma(1.5);
        let a = m.add_scaled(w11, &g);
        let lhs = a.mul_vec(hist.get(1));
        let rhs = m.mul_vec(&u0);
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).abs() < 1e-14);
        }
    }

    #[test]
    fn out_of_sequence_step_is_rejected() {
        let s = scheme(0.5, 4, 7, DriftField::zero());
        let mut h = SolutionHistory::new(s.grid.clone(), vec![0.0; 7]);
        let mut st = s.stepper();
        assert!(st.step(&mut h, 2).is_err());
        assert!(st.step(&mut h, 0).is_err());
        st.step(&mut h, 1).unwrap();
        assert_eq!(h.len(), 2);
    }

    #[test]
    fn wrong_initial_length() {
        let s = scheme(0.5, 4, 7, DriftField::zero());
        assert!(s.run(vec![0.0; 3]).is_err());
    }

    #[test]
    fn zero_flux_conserves_mass() {
        let cfg = ExperimentConfig {
            n_steps: 512,
            ..ExperimentConfig::resonance()
        };
        let out = run(&cfg).unwrap();
        assert!((out.initial_mass - 1.0).abs() < 1e-13);
        for r in &out.reports {
            assert!((r.mass_total - 1.0).abs() < 1e-9, "step {}: {}", r.n, r.mass_total);
        }
    }

    #[test]
    fn linear_in_initial_data() {
        let s = scheme(0.6, 40, 15, DriftField::linear_sin());
        let data = InitialData::Indicator {
            lo: PI / 4.0,
            hi: 3.0 * PI / 4.0,
        };
        let u0 = discrete_initial_data(&s.mesh, &data, InitMethod::L2Projection).unwrap();
        let c = -2.75;
        let (a, _) = s.run(u0.clone()).unwrap();
        let (b, _) = s.run(u0.iter().map(|v| c * v).collect()).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            for (p, q) in x.iter().zip(y) {
                assert!((c * p - q).abs() <= 1e-13 * (1.0 + q.abs()));
            }
        }
    }

    #[test]
    fn runs_are_bitwise_deterministic() {
        let cfg = ExperimentConfig {
            n_steps: 100,
            qh: 31,
            init: InitChoice::Random,
            seed: Some(3),
            ..Default::default()
        };
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.history, b.history);
    }
}
