//! Layered configuration: preset, then a key=value file, then flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use fracfp::{BoundaryCondition, ExperimentConfig, InitChoice, Scale};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Convergence table with L2-projected jump data.
    Table1,
    /// Convergence table with the nodal interpolant of the jump data.
    Table2,
    /// Double-well potential, zero-flux boundaries, point-mass data.
    Resonance,
    /// Error-versus-time series for α = 0.75.
    Figure2,
}

impl Preset {
    pub fn label(self) -> &'static str {
        match self {
            Preset::Table1 => "table1",
            Preset::Table2 => "table2",
            Preset::Resonance => "resonance",
            Preset::Figure2 => "figure2",
        }
    }

    fn overrides(self) -> Overrides {
        let table = |init| Overrides {
            alphas: Some(vec![0.25, 0.5, 0.75]),
            levels: Some(vec![7, 15, 31, 63]),
            init: Some(init),
            scale: Some(Scale::Paper),
            ..Default::default()
        };
        match self {
            Preset::Table1 => table(InitChoice::L2),
            Preset::Table2 => table(InitChoice::Nodal),
            Preset::Figure2 => Overrides {
                alpha: Some(0.75),
                alphas: Some(vec![0.75]),
                ..table(InitChoice::L2)
            },
            Preset::Resonance => Overrides::from_config(&ExperimentConfig::resonance()),
        }
    }
}

/// Comma-separated list, optionally in brackets; empty input is an empty list.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<List<T>, String> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<T>().map_err(|_| format!("bad list entry `{p}`")))
        .collect::<Result<Vec<T>, String>>()
        .map(List)
}

pub fn parse_f64_list(s: &str) -> Result<List<f64>, String> {
    parse_list(s)
}

pub fn parse_usize_list(s: &str) -> Result<List<usize>, String> {
    parse_list(s)
}

/// Flags shared by every subcommand. Unset flags fall through to the file and preset.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Fractional order α in (0, 1].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Diffusivity κ > 0.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Final time.
    #[arg(long = "T", value_name = "T")]
    pub final_time: Option<f64>,
    /// Number of time steps.
    #[arg(long = "N", value_name = "N")]
    pub n_steps: Option<usize>,
    /// Time-mesh grading exponent γ ≥ 1.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Spatial degrees of freedom.
    #[arg(long)]
    pub qh: Option<usize>,
    /// Reference degrees of freedom for convergence studies.
    #[arg(long)]
    pub qref: Option<usize>,
    /// Left end of the interval.
    #[arg(long, allow_hyphen_values = true)]
    pub left: Option<f64>,
    /// Right end of the interval.
    #[arg(long, allow_hyphen_values = true)]
    pub right: Option<f64>,
    /// Boundary condition: dirichlet or zeroflux.
    #[arg(long, value_parser = parse_bc)]
    pub bc: Option<BoundaryCondition>,
    /// Drift label (zero, linear-sin, double-well, constant:<c>) or an expression in x and t.
    #[arg(long, allow_hyphen_values = true)]
    pub drift: Option<String>,
    /// Initial data: l2, nodal, delta or random.
    #[arg(long, value_parser = parse_init)]
    pub init: Option<InitChoice>,
    /// Seed for random initial data.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (must exist).
    #[arg(long = "out", value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Problem sizes: desk or paper.
    #[arg(long, value_parser = parse_scale)]
    pub scale: Option<Scale>,
    /// Experiment preset.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// key=value configuration file; flags take precedence over it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write every stride-th time level to solution.csv.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Omit solution rows with 0 < t < t_cut.
    #[arg(long = "t-cut")]
    pub t_cut: Option<f64>,
    /// Fractional orders for sweeps, comma separated.
    #[arg(long, value_parser = parse_f64_list)]
    pub alphas: Option<List<f64>>,
    /// Coarse degrees of freedom for convergence studies, comma separated.
    #[arg(long, value_parser = parse_usize_list)]
    pub levels: Option<List<usize>>,
}

fn parse_bc(s: &str) -> Result<BoundaryCondition, String> {
    s.parse()
}

fn parse_init(s: &str) -> Result<InitChoice, String> {
    s.parse()
}

fn parse_scale(s: &str) -> Result<Scale, String> {
    s.parse()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub kappa: Option<f64>,
    pub final_time: Option<f64>,
    pub n_steps: Option<usize>,
    pub gamma: Option<f64>,
    pub qh: Option<usize>,
    pub qref: Option<usize>,
    pub left: Option<f64>,
    pub right: Option<f64>,
    pub bc: Option<BoundaryCondition>,
    pub drift: Option<String>,
    pub init: Option<InitChoice>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub scale: Option<Scale>,
    pub stride: Option<usize>,
    pub t_cut: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub levels: Option<Vec<usize>>,
}

macro_rules! layer_fields {
    ($base:expr, $top:expr; $($f:ident),*) => {
        Overrides { $($f: $top.$f.or($base.$f)),* }
    };
}

impl Overrides {
    /// Fields set in `top` win.
    pub fn layer(self, top: Overrides) -> Overrides {
        layer_fields!(self, top; alpha, kappa, final_time, n_steps, gamma, qh, qref, left, right,
            bc, drift, init, seed, out_dir, scale, stride, t_cut, alphas, levels)
    }

    fn from_config(c: &ExperimentConfig) -> Overrides {
        Overrides {
            alpha: Some(c.alpha),
            kappa: Some(c.kappa),
            final_time: Some(c.final_time),
            n_steps: Some(c.n_steps),
            gamma: Some(c.gamma),
            qh: Some(c.qh),
            left: Some(c.left),
            right: Some(c.right),
            bc: Some(c.bc),
            drift: Some(c.drift.clone()),
            init: Some(c.init),
            seed: c.seed,
            out_dir: Some(c.out_dir.clone()),
            scale: Some(c.scale),
            stride: Some(c.stride),
            t_cut: Some(c.t_cut),
            ..Default::default()
        }
    }

    pub fn from_flags(f: &Flags) -> Overrides {
        Overrides {
            alpha: f.alpha,
            kappa: f.kappa,
            final_time: f.final_time,
            n_steps: f.n_steps,
            gamma: f.gamma,
            qh: f.qh,
            qref: f.qref,
            left: f.left,
            right: f.right,
            bc: f.bc,
            drift: f.drift.clone(),
            init: f.init,
            seed: f.seed,
            out_dir: f.out_dir.clone(),
            scale: f.scale,
            stride: f.stride,
            t_cut: f.t_cut,
            alphas: f.alphas.clone().map(|l| l.0),
            levels: f.levels.clone().map(|l| l.0),
        }
    }

    /// Parse `key = value` lines. `#` starts a comment, `[section]` headers are
    /// skipped and values may be quoted, so a `run.meta` file reads back as a config.
    pub fn from_file(path: &Path) -> Result<Overrides, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Overrides, String> {
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() || (line.starts_with('[') && !line.contains('=')) {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let value = value.trim().trim_matches('"');
            o.set(key.trim(), value)
                .map_err(|e| format!("line {}: {e}", i + 1))?;
        }
        Ok(o)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<Option<T>, String> {
            v.parse::<T>()
                .map(Some)
                .map_err(|_| format!("bad value `{v}` for `{key}`"))
        }
        match key {
            "alpha" => self.alpha = num(key, v)?,
            "kappa" => self.kappa = num(key, v)?,
            "T" => self.final_time = num(key, v)?,
            "N" => self.n_steps = num(key, v)?,
            "gamma" => self.gamma = num(key, v)?,
            "qh" => self.qh = num(key, v)?,
            "qref" => self.qref = num(key, v)?,
            "left" => self.left = num(key, v)?,
            "right" => self.right = num(key, v)?,
            "bc" => self.bc = Some(v.parse()?),
            "drift" => self.drift = Some(v.to_string()),
            "init" => self.init = Some(v.parse()?),
            "seed" => self.seed = num(key, v)?,
            "out" | "out_dir" => self.out_dir = Some(PathBuf::from(v)),
            "scale" => self.scale = Some(v.parse()?),
            "stride" => self.stride = num(key, v)?,
            "t_cut" | "t-cut" => self.t_cut = num(key, v)?,
            "alphas" => self.alphas = Some(parse_f64_list(v)?.0),
            "levels" => self.levels = Some(parse_usize_list(v)?.0),
            // metadata written next to outputs
            "version" | "generator" | "command" | "preset" => {}
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct Settings {
    pub config: ExperimentConfig,
    pub preset: Option<Preset>,
    /// `N` was given explicitly rather than taken from the scale.
    pub n_explicit: bool,
    pub qref: Option<usize>,
    pub alphas: Option<Vec<f64>>,
    pub levels: Option<Vec<usize>>,
}

impl Settings {
    pub fn resolve(flags: &Flags) -> Result<Settings, CliError> {
        let mut merged = flags.preset.map(Preset::overrides).unwrap_or_default();
        if let Some(path) = &flags.config {
            merged = merged.layer(Overrides::from_file(path)?);
        }
        merged = merged.layer(Overrides::from_flags(flags));
        Ok(Self::from_overrides(merged, flags.preset))
    }

    pub fn from_overrides(o: Overrides, preset: Option<Preset>) -> Settings {
        let d = ExperimentConfig::default();
        let config = ExperimentConfig {
            alpha: o.alpha.unwrap_or(d.alpha),
            kappa: o.kappa.unwrap_or(d.kappa),
            final_time: o.final_time.unwrap_or(d.final_time),
            n_steps: o.n_steps.unwrap_or(d.n_steps),
            gamma: o.gamma.unwrap_or(d.gamma),
            qh: o.qh.unwrap_or(d.qh),
            left: o.left.unwrap_or(d.left),
            right: o.right.unwrap_or(d.right),
            bc: o.bc.unwrap_or(d.bc),
            drift: o.drift.unwrap_or(d.drift),
            init: o.init.unwrap_or(d.init),
            seed: o.seed.or(d.seed),
            out_dir: o.out_dir.unwrap_or(d.out_dir),
            scale: o.scale.unwrap_or(d.scale),
            stride: o.stride.unwrap_or(d.stride),
            t_cut: o.t_cut.unwrap_or(d.t_cut),
        };
        Settings {
            config,
            preset,
            n_explicit: o.n_steps.is_some(),
            qref: o.qref,
            alphas: o.alphas,
            levels: o.levels,
        }
    }
}
