use fracfp::analysis::{run_convergence_study, run_stability_probe, StudyConfig};
use fracfp::{ExperimentConfig, InitChoice, InitMethod};

use crate::checks::{run_checks, Faults};
use crate::error::CliError;
use crate::output::{ensure_dir, num, write_atomic, write_meta, SweepMeta};
use crate::settings::Settings;

fn preset_label(s: &Settings) -> Option<&'static str> {
    s.preset.map(|p| p.label())
}

/// solution.csv (`t,x,u`), mass.csv (`n,t,mass`) and run.meta.
pub fn solve(s: &Settings) -> Result<(), CliError> {
    let cfg = &s.config;
    cfg.validate()?;
    ensure_dir(&cfg.out_dir)?;
    let out = fracfp::stepper::run(cfg)?;
    let scheme = &out.scheme;
    let grid = &scheme.grid;
    let n_last = grid.n_steps();

    write_atomic(&cfg.out_dir, "solution.csv", |w| {
        writeln!(w, "t,x,u")?;
        for (n, u) in out.history.iter().enumerate() {
            let t = grid.t(n);
            let keep = n % cfg.stride == 0 || n == n_last;
            if !keep || (t > 0.0 && t < cfg.t_cut) {
                continue;
            }
            let full = scheme.mesh.to_full(u);
            for (x, v) in scheme.mesh.nodes().iter().zip(&full) {
                writeln!(w, "{},{},{}", num(t), num(*x), num(*v))?;
            }
        }
        Ok(())
    })?;
    write_atomic(&cfg.out_dir, "mass.csv", |w| {
        writeln!(w, "n,t,mass")?;
        for (n, u) in out.history.iter().enumerate() {
            writeln!(w, "{n},{},{}", num(grid.t(n)), num(scheme.mass(u)))?;
        }
        Ok(())
    })?;
    write_meta("solve", preset_label(s), cfg, None)?;
    Ok(())
}

/// table.csv (`alpha,qh,estar,sigma`) and one `errors_<alpha>_<qh>.csv` (`n,t,E`) per run.
///
/// Studies always use the Dirichlet example on (0, π) with γ = 1/α; `N` and
/// `qref` default to the sizes of the chosen scale.
pub fn convergence(s: &Settings) -> Result<(), CliError> {
    let base = &s.config;
    let init = match base.init {
        InitChoice::L2 => InitMethod::L2Projection,
        InitChoice::Nodal => InitMethod::NodalInterpolant,
        other => {
            return Err(CliError::Config(format!(
                "convergence studies take --init l2 or nodal, not {}",
                other.label()
            )))
        }
    };
    let n_steps = if s.n_explicit { base.n_steps } else { base.scale.study_steps() };
    let qref = s.qref.unwrap_or(base.scale.reference_dofs());
    let alphas = s.alphas.clone().unwrap_or_else(|| vec![base.alpha]);
    let levels = s.levels.clone().unwrap_or_else(|| vec![base.qh]);
    let study_cfg = StudyConfig {
        final_time: base.final_time,
        kappa: base.kappa,
        drift: base.drift.clone(),
        ..StudyConfig::new(alphas.clone(), levels.clone(), qref, n_steps, init)
    };
    ensure_dir(&base.out_dir)?;
    let study = run_convergence_study(&study_cfg)?;

    write_atomic(&base.out_dir, "table.csv", |w| {
        writeln!(w, "alpha,qh,estar,sigma")?;
        for r in &study.table.rows {
            let sigma = r.sigma.map(num).unwrap_or_default();
            writeln!(w, "{},{},{},{sigma}", r.alpha, r.qh, num(r.e_star))?;
        }
        Ok(())
    })?;
    for series in &study.series {
        let name = format!("errors_{}_{}.csv", series.alpha, series.coarse_qh);
        write_atomic(&base.out_dir, &name, |w| {
            writeln!(w, "n,t,E")?;
            for e in &series.entries {
                writeln!(w, "{},{},{}", e.n, num(e.t), num(e.error))?;
            }
            Ok(())
        })?;
    }
    let resolved = ExperimentConfig {
        n_steps,
        ..base.clone()
    };
    let sweep = SweepMeta {
        alphas,
        levels: Some(levels),
        qref: Some(qref),
    };
    write_meta("convergence", preset_label(s), &resolved, Some(&sweep))?;
    Ok(())
}

/// stability.csv (`alpha,max_ratio,argmax_n`) for random nodal data, γ = 1/α per run.
pub fn stability(s: &Settings) -> Result<(), CliError> {
    let base = &s.config;
    let alphas = s.alphas.clone().unwrap_or_else(|| vec![base.alpha]);
    let seed = base.seed.unwrap_or(0);
    let resolved = ExperimentConfig {
        seed: Some(seed),
        init: InitChoice::Random,
        ..base.clone()
    };
    resolved.validate()?;
    ensure_dir(&base.out_dir)?;
    let rows = run_stability_probe(&alphas, seed, &resolved)?;
    write_atomic(&base.out_dir, "stability.csv", |w| {
        writeln!(w, "alpha,max_ratio,argmax_n")?;
        for r in &rows {
            writeln!(w, "{},{},{}", r.alpha, num(r.max_ratio), r.argmax_n)?;
        }
        Ok(())
    })?;
    let sweep = SweepMeta {
        alphas,
        levels: None,
        qref: None,
    };
    write_meta("stability", preset_label(s), &resolved, Some(&sweep))?;
    Ok(())
}

/// Prints one line per invariant; fails if any does not hold.
pub fn check(s: &Settings, faults: Faults) -> Result<(), CliError> {
    let outcomes = run_checks(&s.config, faults)?;
    let mut all = true;
    for c in &outcomes {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        all &= c.passed;
    }
    if all {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}
