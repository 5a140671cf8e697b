use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{CliError, RunConfig};
use crate::hybrid::MODEL_VERSION;

pub(crate) use crate::data::fmt_f64 as fmt;

/// A CSV table assembled in memory and written in one go.
pub(crate) struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush()
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

pub(crate) fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    package_version: &'static str,
    model_format_version: u32,
    config_sha256: String,
    seeds: BTreeMap<&'static str, u64>,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
    config: toml::Value,
}

/// Writes `<command>_manifest.json` next to the outputs; no timestamps, so
/// reruns are byte-identical.
pub(crate) fn write_manifest(
    cfg: &RunConfig,
    command: &str,
    inputs: &[PathBuf],
    outputs: &[PathBuf],
) -> Result<PathBuf, CliError> {
    let config_text = cfg.to_toml()?;
    let config: toml::Value =
        toml::from_str(&config_text).map_err(|e| CliError::Config(e.to_string()))?;
    let seeds = BTreeMap::from([
        ("generate", cfg.generate.seed),
        ("split", cfg.split.seed),
        ("gp", cfg.gp.seed),
        ("monte_carlo", cfg.uq.seed),
    ]);
    let hashes = |paths: &[PathBuf]| -> Result<BTreeMap<String, String>, CliError> {
        paths
            .iter()
            .map(|p| Ok((p.display().to_string(), sha256_file(p)?)))
            .collect()
    };
    let manifest = Manifest {
        command,
        package_version: env!("CARGO_PKG_VERSION"),
        model_format_version: MODEL_VERSION,
        config_sha256: hex::encode(Sha256::digest(config_text.as_bytes())),
        seeds,
        inputs: hashes(inputs)?,
        outputs: hashes(outputs)?,
        config,
    };
    let path = cfg
        .output_dir
        .join(format!("{}_manifest.json", command.replace('-', "_")));
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}
