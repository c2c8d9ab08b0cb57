//! Error measurement, convergence tables and the experiment drivers.

use std::f64::consts::{E, PI};

use rayon::prelude::*;

use crate::assembly::{self, DriftField, InitMethod, InitialData};
use crate::config::ExperimentConfig;
use crate::error::{invalid, Result};
use crate::fracweights::{mittag_leffler, FractionalOrder};
use crate::meshes::{BoundaryCondition, SpatialMesh, TimeGrid};
use crate::stepper::{self, Scheme, SolutionHistory};
use crate::tridiag::TriDiagMatrix;

/// Maps a coarse piecewise-linear function onto the nodes of a nested fine mesh.
#[derive(Debug, Clone)]
pub struct NestedMeshPair {
    coarse: SpatialMesh,
    fine: SpatialMesh,
    /// For each fine node: coarse element and local coordinate.
    map: Vec<(usize, f64)>,
    fine_mass: TriDiagMatrix,
}

impl NestedMeshPair {
    pub fn new(coarse: &SpatialMesh, fine: &SpatialMesh) -> Result<Self> {
        let span = fine.right() - fine.left();
        let tol = 1e-12 * span;
        if (coarse.left() - fine.left()).abs() > tol || (coarse.right() - fine.right()).abs() > tol
        {
            return invalid("meshes cover different intervals");
        }
        let fx = fine.nodes();
        for &x in coarse.nodes() {
            let i = fx.partition_point(|&y| y < x - tol);
            if i >= fx.len() || (fx[i] - x).abs() > tol {
                return invalid(format!("coarse node {x} is not a fine node"));
            }
        }
        let cx = coarse.nodes();
        let map = fx
            .iter()
            .map(|&x| {
                let x = x.clamp(coarse.left(), coarse.right());
                let e = coarse.locate(x).expect("inside");
                (e, (x - cx[e]) / coarse.element_sizes()[e])
            })
            .collect();
        Ok(NestedMeshPair {
            coarse: coarse.clone(),
            fine: fine.clone(),
            map,
            fine_mass: assembly::assemble_full_mass(fine),
        })
    }

    /// Exact `‖u_coarse - u_fine‖_{L2}` from free-node coefficients.
    pub fn l2_difference(&self, coarse: &[f64], fine: &[f64]) -> f64 {
        let cf = self.coarse.to_full(coarse);
        let ff = self.fine.to_full(fine);
        let d: Vec<f64> = self
            .map
            .iter()
            .zip(&ff)
            .map(|(&(e, s), &v)| cf[e] * (1.0 - s) + cf[e + 1] * s - v)
            .collect();
        self.fine_mass.quadratic_form(&d).max(0.0).sqrt()
    }
}

/// `‖coarse - fine‖_{L2}` for piecewise-linear functions on nested meshes.
pub fn l2_error_nested(
    coarse_mesh: &SpatialMesh,
    coarse: &[f64],
    fine_mesh: &SpatialMesh,
    fine: &[f64],
) -> Result<f64> {
    if coarse.len() != coarse_mesh.free_count() || fine.len() != fine_mesh.free_count() {
        return invalid("coefficient vectors do not match their meshes");
    }
    Ok(NestedMeshPair::new(coarse_mesh, fine_mesh)?.l2_difference(coarse, fine))
}

/// L2 norm `√(vᵀ M v)` of a finite element function.
pub fn l2_norm(mesh: &SpatialMesh, v: &[f64]) -> f64 {
    assembly::assemble_mass(mesh).quadratic_form(v).max(0.0).sqrt()
}

/// One `(n, t_n, E_n)` sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSample {
    pub n: usize,
    pub t: f64,
    pub error: f64,
}

/// `E_n = ‖U^n_h - U^n_ref‖` for a coarse run measured against a reference run.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    pub entries: Vec<ErrorSample>,
    pub coarse_qh: usize,
    pub reference_qh: usize,
    pub n_steps: usize,
    pub alpha: f64,
}

impl ErrorSeries {
    pub fn from_runs(
        coarse_mesh: &SpatialMesh,
        coarse: &SolutionHistory,
        reference_mesh: &SpatialMesh,
        reference: &SolutionHistory,
        alpha: f64,
    ) -> Result<Self> {
        if coarse.grid() != reference.grid() || coarse.len() != reference.len() {
            return invalid("coarse and reference runs must share the time grid");
        }
        let pair = NestedMeshPair::new(coarse_mesh, reference_mesh)?;
        let grid = coarse.grid();
        let entries = coarse
            .iter()
            .zip(reference.iter())
            .enumerate()
            .map(|(n, (c, r))| ErrorSample {
                n,
                t: grid.t(n),
                error: pair.l2_difference(c, r),
            })
            .collect();
        Ok(ErrorSeries {
            entries,
            coarse_qh: coarse_mesh.free_count(),
            reference_qh: reference_mesh.free_count(),
            n_steps: grid.n_steps(),
            alpha,
        })
    }
}

/// `max_n t_n^{3α/4} E_n / √(ln(e² + 1/t_n))`, skipping `t_n = 0`.
pub fn weighted_error(series: &ErrorSeries, alpha: f64) -> f64 {
    weighted_error_samples(&series.entries, alpha)
}

pub fn weighted_error_samples(samples: &[ErrorSample], alpha: f64) -> f64 {
    samples
        .iter()
        .filter(|s| s.t > 0.0)
        .map(|s| s.t.powf(0.75 * alpha) * s.error / (E * E + 1.0 / s.t).ln().sqrt())
        .fold(0.0, f64::max)
}

/// Observed order `log₂(E_coarse / E_fine)` for a halving of `h`.
pub fn convergence_rate(e_coarse: f64, e_fine: f64) -> Result<f64> {
    if !(e_coarse > 0.0 && e_fine > 0.0) {
        return invalid(format!(
            "errors must be positive (got {e_coarse}, {e_fine})"
        ));
    }
    Ok((e_coarse / e_fine).log2())
}

/// Least-squares slope of `ln E_n` against `ln t_n` for samples with `t` in `window`.
pub fn error_decay_slope(series: &ErrorSeries, window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return invalid(format!("bad window [{lo}, {hi}]"));
    }
    let pts: Vec<(f64, f64)> = series
        .entries
        .iter()
        .filter(|s| s.t >= lo && s.t <= hi && s.error > 0.0)
        .map(|s| (s.t.ln(), s.error.ln()))
        .collect();
    if pts.len() < 10 {
        return invalid(format!(
            "window [{lo}, {hi}] holds {} samples, need at least 10",
            pts.len()
        ));
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), p| {
        (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx) * (p.0 - mx))
    });
    Ok(sxy / sxx)
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub alpha: f64,
    pub qh: usize,
    pub e_star: f64,
    /// `None` on the coarsest level.
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn rows_for(&self, alpha: f64) -> impl Iterator<Item = &ConvergenceRow> {
        self.rows.iter().filter(move |r| r.alpha == alpha)
    }

    pub fn get(&self, alpha: f64, qh: usize) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.alpha == alpha && r.qh == qh)
    }
}

/// Parameters of a spatial convergence study on the Dirichlet example.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub alphas: Vec<f64>,
    pub levels: Vec<usize>,
    pub reference_qh: usize,
    pub n_steps: usize,
    /// Discretisation of the jump data on the coarse levels.
    pub init: InitMethod,
    /// Discretisation of the jump data on the reference mesh.
    pub reference_init: InitMethod,
    pub final_time: f64,
    pub kappa: f64,
    pub drift: String,
}

impl StudyConfig {
    pub fn new(alphas: Vec<f64>, levels: Vec<usize>, reference_qh: usize, n_steps: usize, init: InitMethod) -> Self {
        StudyConfig {
            alphas,
            levels,
            reference_qh,
            n_steps,
            init,
            reference_init: InitMethod::L2Projection,
            final_time: 1.0,
            kappa: 1.0,
            drift: "linear-sin".into(),
        }
    }

    fn validate(&self) -> Result<()> {
        for &q in self.levels.iter().chain(std::iter::once(&self.reference_qh)) {
            if q == 0 {
                return invalid("levels must be positive");
            }
        }
        for &q in &self.levels {
            if !(self.reference_qh + 1).is_multiple_of(q + 1) {
                return invalid(format!(
                    "level {q} is not nested in reference {} ((q+1) must divide q_ref+1)",
                    self.reference_qh
                ));
            }
        }
        for &a in &self.alphas {
            FractionalOrder::new(a)?;
        }
        for m in [self.init, self.reference_init] {
            if !matches!(m, InitMethod::L2Projection | InitMethod::NodalInterpolant) {
                return invalid("convergence studies use the L2 projection or the nodal interpolant");
            }
        }
        Ok(())
    }
}

/// Results of [`run_convergence_study`].
#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub table: ConvergenceTable,
    pub series: Vec<ErrorSeries>,
}

fn dirichlet_scheme(qh: usize, grid: &TimeGrid, alpha: f64, kappa: f64, drift: &DriftField) -> Result<Scheme> {
    Scheme::new(
        SpatialMesh::uniform(0.0, PI, qh, BoundaryCondition::Dirichlet)?,
        grid.clone(),
        FractionalOrder::new(alpha)?,
        kappa,
        drift.clone(),
    )
}

fn jump_data() -> InitialData {
    InitialData::Indicator {
        lo: PI / 4.0,
        hi: 3.0 * PI / 4.0,
    }
}

/// Solve on each level and on the reference mesh with `γ = 1/α`, and tabulate `E*` and rates.
///
/// The reference and all coarse runs share the same time grid. The reference
/// approximates the exact solution, so it uses `reference_init` (the L2
/// projection by default) whatever `init` the coarse levels use.
pub fn run_convergence_study(cfg: &StudyConfig) -> Result<ConvergenceStudy> {
    let mut studies = run_convergence_studies(cfg, &[cfg.init])?;
    Ok(studies.pop().expect("one study"))
}

type StudyPart = (Vec<ConvergenceRow>, Vec<ErrorSeries>);

/// As [`run_convergence_study`] for several coarse-level discretisations of the
/// initial data, sharing one reference run per `α`. `cfg.init` is ignored.
pub fn run_convergence_studies(
    cfg: &StudyConfig,
    coarse_inits: &[InitMethod],
) -> Result<Vec<ConvergenceStudy>> {
    for &init in coarse_inits {
        StudyConfig { init, ..cfg.clone() }.validate()?;
    }
    let drift = DriftField::from_label(&cfg.drift)?;
    let per_alpha: Vec<Result<Vec<StudyPart>>> = cfg
        .alphas
        .par_iter()
        .map(|&alpha| {
            let grid = TimeGrid::graded(cfg.n_steps, cfg.final_time, 1.0 / alpha)?;
            let solve = |qh: usize, init: InitMethod| -> Result<(Scheme, SolutionHistory)> {
                let s = dirichlet_scheme(qh, &grid, alpha, cfg.kappa, &drift)?;
                let u0 = assembly::discrete_initial_data(&s.mesh, &jump_data(), init)?;
                let (h, _) = s.run(u0)?;
                Ok((s, h))
            };
            let (ref_scheme, ref_hist) = solve(cfg.reference_qh, cfg.reference_init)?;
            coarse_inits
                .iter()
                .map(|&init| {
                    let series = cfg
                        .levels
                        .par_iter()
                        .map(|&qh| {
                            let (s, h) = solve(qh, init)?;
                            ErrorSeries::from_runs(&s.mesh, &h, &ref_scheme.mesh, &ref_hist, alpha)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok((tabulate(alpha, &series)?, series))
                })
                .collect()
        })
        .collect();

    let mut studies: Vec<ConvergenceStudy> = coarse_inits
        .iter()
        .map(|_| ConvergenceStudy {
            table: ConvergenceTable::default(),
            series: Vec::new(),
        })
        .collect();
    for per_init in per_alpha {
        for (study, (rows, series)) in studies.iter_mut().zip(per_init?) {
            study.table.rows.extend(rows);
            study.series.extend(series);
        }
    }
    Ok(studies)
}

fn tabulate(alpha: f64, series: &[ErrorSeries]) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::with_capacity(series.len());
    let mut previous: Option<f64> = None;
    for s in series {
        let e_star = weighted_error(s, alpha);
        let sigma = match previous {
            Some(p) => Some(convergence_rate(p, e_star)?),
            None => None,
        };
        rows.push(ConvergenceRow {
            alpha,
            qh: s.coarse_qh,
            e_star,
            sigma,
        });
        previous = Some(e_star);
    }
    Ok(rows)
}

/// Nodal values of `E_α(-m² t^α) sin(m x)` on the free nodes, the exact drift-free
/// solution on `(0, π)` for eigenmode initial data.
pub fn exact_subdiffusion_reference(
    alpha: f64,
    mode: u32,
    t: f64,
    mesh: &SpatialMesh,
    drift: &DriftField,
) -> Result<Vec<f64>> {
    if mesh.bc() != BoundaryCondition::Dirichlet {
        return invalid("the eigenmode solution needs Dirichlet boundary conditions");
    }
    if !drift.is_zero() {
        return invalid("the eigenmode solution needs a zero drift");
    }
    if mesh.left().abs() > 1e-14 || (mesh.right() - PI).abs() > 1e-14 {
        return invalid("the eigenmode solution lives on (0, π)");
    }
    if mode == 0 {
        return invalid("mode index starts at 1");
    }
    if !(t >= 0.0) {
        return invalid("t must be non-negative");
    }
    let m = mode as f64;
    let decay = mittag_leffler(alpha, -m * m * t.powf(alpha))?;
    Ok(mesh.free_nodes().iter().map(|&x| decay * (m * x).sin()).collect())
}

/// Surface samples and mass series of a zero-flux point-mass run.
#[derive(Debug, Clone)]
pub struct ResonanceResult {
    /// `(x, t_n, U^n(x))` for `t_n = 0` or `t_n ≥ t_cut`.
    pub surface: Vec<(f64, f64, f64)>,
    /// `(n, t_n, ∫U^n_h)` including `n = 0`.
    pub mass: Vec<(usize, f64, f64)>,
    pub history: SolutionHistory,
    pub mesh: SpatialMesh,
}

impl ResonanceResult {
    pub fn max_mass_deviation(&self, target: f64) -> f64 {
        self.mass
            .iter()
            .fold(0.0f64, |m, &(_, _, v)| m.max((v - target).abs()))
    }

    /// Sign changes of `U^n` across free nodes within `radius` of `x0`.
    pub fn sign_changes_near(&self, n: usize, x0: f64, radius: f64) -> usize {
        let u = self.history.get(n);
        let vals: Vec<f64> = self
            .mesh
            .free_nodes()
            .iter()
            .zip(u)
            .filter(|(x, _)| (*x - x0).abs() <= radius)
            .map(|(_, &v)| v)
            .filter(|v| *v != 0.0)
            .collect();
        vals.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
    }
}

/// Run a zero-flux point-mass configuration and collect plot and mass data.
pub fn run_resonance_demo(config: &ExperimentConfig) -> Result<ResonanceResult> {
    if config.bc != BoundaryCondition::ZeroFlux {
        return invalid("the resonance demo uses zero-flux boundaries");
    }
    if config.init != crate::config::InitChoice::Delta {
        return invalid("the resonance demo starts from a point mass");
    }
    let out = stepper::run(config)?;
    let grid = out.history.grid().clone();
    let mesh = out.scheme.mesh.clone();
    let mut mass = vec![(0, 0.0, out.initial_mass)];
    mass.extend(out.reports.iter().map(|r| (r.n, grid.t(r.n), r.mass_total)));
    let mut surface = Vec::new();
    for (n, u) in out.history.iter().enumerate() {
        let t = grid.t(n);
        if n % config.stride != 0 && n != grid.n_steps() {
            continue;
        }
        if t > 0.0 && t < config.t_cut {
            continue;
        }
        let full = mesh.to_full(u);
        surface.extend(mesh.nodes().iter().zip(full).map(|(&x, v)| (x, t, v)));
    }
    Ok(ResonanceResult {
        surface,
        mass,
        history: out.history,
        mesh,
    })
}

/// `sup_n ‖U^n‖ / ‖U^0‖` for one fractional order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityRow {
    pub alpha: f64,
    pub max_ratio: f64,
    pub argmax_n: usize,
}

/// Ratio of L2 norms for random nodal initial data, one run per `α` with `γ = 1/α`.
///
/// Mesh, drift, final time and step count come from `base`.
pub fn run_stability_probe(alphas: &[f64], seed: u64, base: &ExperimentConfig) -> Result<Vec<StabilityRow>> {
    let data = InitialData::RandomNodal { seed };
    stability_probe_with(alphas, base, &data, InitMethod::NodalInterpolant)
}

pub fn stability_probe_with(
    alphas: &[f64],
    base: &ExperimentConfig,
    data: &InitialData,
    method: InitMethod,
) -> Result<Vec<StabilityRow>> {
    alphas
        .par_iter()
        .map(|&alpha| {
            let cfg = ExperimentConfig {
                alpha,
                gamma: 1.0 / alpha,
                ..base.clone()
            };
            let scheme = Scheme::from_config(&cfg)?;
            let u0 = assembly::discrete_initial_data(&scheme.mesh, data, method)?;
            let m = assembly::assemble_mass(&scheme.mesh);
            let norm0 = m.quadratic_form(&u0).max(0.0).sqrt();
            if norm0 == 0.0 {
                return Ok(StabilityRow {
                    alpha,
                    max_ratio: 0.0,
                    argmax_n: 0,
                });
            }
            let (hist, _) = scheme.run(u0)?;
            let (argmax_n, max_norm) = hist
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, u)| (n, m.quadratic_form(u).max(0.0).sqrt()))
                .fold((0, 0.0f64), |best, cur| if cur.1 > best.1 { cur } else { best });
            Ok(StabilityRow {
                alpha,
                max_ratio: max_norm / norm0,
                argmax_n,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss4;

    fn sample(n: usize, t: f64, error: f64) -> ErrorSample {
        ErrorSample { n, t, error }
    }

    fn series(entries: Vec<ErrorSample>) -> ErrorSeries {
        ErrorSeries {
            entries,
            coarse_qh: 7,
            reference_qh: 15,
            n_steps: 0,
            alpha: 0.5,
        }
    }

    #[test]
    fn nested_error_trivial_cases() {
        let c = SpatialMesh::uniform(0.0, 1.0, 3, BoundaryCondition::Dirichlet).unwrap();
        let f = SpatialMesh::uniform(0.0, 1.0, 7, BoundaryCondition::Dirichlet).unwrap();
        let uc = vec![0.3, -1.0, 2.0];
        // the same function written on the fine mesh
        let pair = NestedMeshPair::new(&c, &f).unwrap();
        let uf: Vec<f64> = f
            .free_nodes()
            .iter()
            .map(|&x| c.evaluate_full(&c.to_full(&uc), x).unwrap())
            .collect();
        assert!(pair.l2_difference(&uc, &uf) < 1e-15);
        // a single fine hat
        let mut hat = vec![0.0; 7];
        hat[2] = 1.0;
        let e = l2_error_nested(&c, &[0.0; 3], &f, &hat).unwrap();
        assert!((e - (2.0 * 0.125 / 3.0f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn nested_error_rejects_non_nested() {
        let c = SpatialMesh::uniform(0.0, 1.0, 4, BoundaryCondition::Dirichlet).unwrap();
        let f = SpatialMesh::uniform(0.0, 1.0, 7, BoundaryCondition::Dirichlet).unwrap();
        assert!(l2_error_nested(&c, &[0.0; 4], &f, &[0.0; 7]).is_err());
        let g = SpatialMesh::uniform(0.0, 2.0, 7, BoundaryCondition::Dirichlet).unwrap();
        let c3 = SpatialMesh::uniform(0.0, 1.0, 3, BoundaryCondition::Dirichlet).unwrap();
        assert!(l2_error_nested(&c3, &[0.0; 3], &g, &[0.0; 7]).is_err());
    }

    #[test]
    fn nested_error_matches_quadrature() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::ZeroFlux] {
            let c = SpatialMesh::uniform(-1.0, 2.0, 5, bc).unwrap();
            let f = SpatialMesh::uniform(-1.0, 2.0, 23, bc).unwrap();
            let uc: Vec<f64> = (0..c.free_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let uf: Vec<f64> = (0..f.free_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (cf, ff) = (c.to_full(&uc), f.to_full(&uf));
            // composite Gauss on the fine elements, where the difference is linear
            let oracle: f64 = f
                .nodes()
                .windows(2)
                .map(|w| {
                    gauss4(w[0], w[1], |x| {
                        let d = c.evaluate_full(&cf, x).unwrap() - f.evaluate_full(&ff, x).unwrap();
                        d * d
                    })
                })
                .sum::<f64>()
                .sqrt();
            let e = l2_error_nested(&c, &uc, &f, &uf).unwrap();
            assert!((e - oracle).abs() < 1e-12 * oracle);
        }
    }

    #[test]
    fn weighted_error_properties() {
        assert_eq!(weighted_error(&series(vec![sample(1, 0.5, 0.0)]), 0.5), 0.0);
        let base = vec![sample(1, 0.01, 0.3), sample(2, 0.2, 0.1), sample(3, 1.0, 0.05)];
        let e = weighted_error(&series(base.clone()), 0.5);
        let mut with_zero = vec![sample(0, 0.0, 7.0)];
        with_zero.extend(base.clone());
        assert_eq!(weighted_error(&series(with_zero), 0.5), e);
        let scaled: Vec<ErrorSample> = base.iter().map(|s| sample(s.n, s.t, 3.0 * s.error)).collect();
        assert!((weighted_error(&series(scaled), 0.5) - 3.0 * e).abs() < 1e-15);
        // by hand for the t = 1 entry
        let last = 0.05 / (E * E + 1.0f64).ln().sqrt();
        assert!(e >= last);
    }

    #[test]
    fn rates() {
        assert_eq!(convergence_rate(4.0e-3, 1.0e-3).unwrap(), 2.0);
        assert_eq!(convergence_rate(0.3, 0.3).unwrap(), 0.0);
        assert!((convergence_rate(7.98e-3, 1.96e-3).unwrap() - 2.025).abs() < 1e-3);
        assert!((convergence_rate(7.79e-2, 4.04e-2).unwrap() - 0.948).abs() < 1e-3);
        assert!(convergence_rate(0.0, 1.0).is_err());
        assert!(convergence_rate(1.0, -1.0).is_err());
    }

    #[test]
    fn slope_of_power_laws() {
        let pts: Vec<ErrorSample> = (1..=200usize)
            .map(|n| {
                let t = 1e-4 * 1.05f64.powi(n as i32);
                sample(n, t, t.powf(-0.5625))
            })
            .collect();
        let s = error_decay_slope(&series(pts.clone()), (1e-3, 1e-1)).unwrap();
        assert!((s + 0.5625).abs() < 1e-10);
        let flat: Vec<ErrorSample> = pts.iter().map(|p| sample(p.n, p.t, 0.2)).collect();
        assert!(error_decay_slope(&series(flat), (1e-3, 1e-1)).unwrap().abs() < 1e-12);
        assert!(error_decay_slope(&series(pts), (0.5, 0.6)).is_err());
    }

    #[test]
    fn single_level_study() {
        let cfg = StudyConfig::new(vec![0.5], vec![7], 15, 50, InitMethod::L2Projection);
        let study = run_convergence_study(&cfg).unwrap();
        assert_eq!(study.table.rows.len(), 1);
        assert!(study.table.rows[0].sigma.is_none());
        assert!(study.table.rows[0].e_star > 0.0);
        let bad = StudyConfig::new(vec![0.5], vec![6], 15, 50, InitMethod::L2Projection);
        assert!(run_convergence_study(&bad).is_err());
    }

    #[test]
    fn eigenmode_reference() {
        let mesh = SpatialMesh::uniform(0.0, PI, 7, BoundaryCondition::Dirichlet).unwrap();
        let z = DriftField::zero();
        let at0 = exact_subdiffusion_reference(0.5, 2, 0.0, &mesh, &z).unwrap();
        for (v, &x) in at0.iter().zip(mesh.free_nodes()) {
            assert_eq!(*v, (2.0 * x).sin());
        }
        let classical = exact_subdiffusion_reference(1.0, 1, 1.0, &mesh, &z).unwrap();
        for (v, &x) in classical.iter().zip(mesh.free_nodes()) {
            assert!((v - (-1f64).exp() * x.sin()).abs() < 1e-15);
        }
        let half = exact_subdiffusion_reference(0.5, 1, 1.0, &mesh, &z).unwrap();
        for (v, &x) in half.iter().zip(mesh.free_nodes()) {
            assert!((v - 0.427_583_576_155_807 * x.sin()).abs() < 1e-12);
        }
        assert!(exact_subdiffusion_reference(0.5, 1, 1.0, &mesh, &DriftField::linear_sin()).is_err());
        let zf = SpatialMesh::uniform(0.0, PI, 7, BoundaryCondition::ZeroFlux).unwrap();
        assert!(exact_subdiffusion_reference(0.5, 1, 1.0, &zf, &z).is_err());
    }

    #[test]
    fn stability_probe_edge_cases() {
        let base = ExperimentConfig {
            qh: 31,
            n_steps: 100,
            drift: "zero".into(),
            ..Default::default()
        };
        let rows = run_stability_probe(&[1.0], 5, &base).unwrap();
        assert!(rows[0].max_ratio <= 1.0);
        let zero = stability_probe_with(
            &[0.5],
            &base,
            &InitialData::callable(|_| 0.0),
            InitMethod::NodalInterpolant,
        )
        .unwrap();
        assert_eq!(zero[0].max_ratio, 0.0);
        assert!(run_stability_probe(&[], 5, &base).unwrap().is_empty());
    }

    #[test]
    fn resonance_demo_small() {
        let cfg = ExperimentConfig {
            n_steps: 256,
            final_time: 2.0,
            ..ExperimentConfig::resonance()
        };
        let r = run_resonance_demo(&cfg).unwrap();
        assert!(r.max_mass_deviation(1.0) < 1e-9);
        assert_eq!(r.mass.len(), 257);
        assert!(r.surface.iter().all(|&(_, t, _)| t == 0.0 || t >= 0.005));
        assert!(run_resonance_demo(&ExperimentConfig::default()).is_err());
    }
}
