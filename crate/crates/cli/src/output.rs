//! Atomic CSV and metadata writers.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use fracfp::assembly::RANDOM_GENERATOR;
use fracfp::ExperimentConfig;
use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::CliError;

/// Round-trip decimal with 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    match fs::metadata(dir) {
        Ok(m) if m.is_dir() => Ok(()),
        Ok(_) => Err(CliError::Io(format!("{} is not a directory", dir.display()))),
        Err(e) => Err(CliError::Io(format!("output directory {}: {e}", dir.display()))),
    }
}

/// Write `dir/name` through a temporary file in the same directory, then rename.
pub fn write_atomic(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<PathBuf, CliError> {
    let target = dir.join(name);
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", target.display()));
    let tmp = NamedTempFile::new_in(dir).map_err(io)?;
    let mut w = BufWriter::new(tmp);
    body(&mut w).map_err(io)?;
    let tmp = w.into_inner().map_err(|e| io(e.into_error()))?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(&target).map_err(|e| io(e.error))?;
    Ok(target)
}

/// Sweep parameters recorded alongside convergence and stability outputs.
#[derive(Debug, Clone, Serialize)]
pub struct SweepMeta {
    pub alphas: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qref: Option<usize>,
}

#[derive(Serialize)]
struct RunMeta<'a> {
    version: &'a str,
    generator: &'a str,
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<&'a str>,
    config: &'a ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<&'a SweepMeta>,
}

/// `run.meta`: the resolved configuration plus everything else needed to
/// reproduce the outputs. It can be passed back through `--config`.
pub fn write_meta(
    command: &str,
    preset: Option<&str>,
    config: &ExperimentConfig,
    sweep: Option<&SweepMeta>,
) -> Result<PathBuf, CliError> {
    let meta = RunMeta {
        version: fracfp::VERSION,
        generator: RANDOM_GENERATOR,
        command,
        preset,
        config,
        sweep,
    };
    let text = toml::to_string(&meta).map_err(|e| CliError::Io(format!("run.meta: {e}")))?;
    write_atomic(&config.out_dir, "run.meta", |w| w.write_all(text.as_bytes()))
}
