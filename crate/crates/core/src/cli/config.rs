use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::data::{DatasetSchema, SplitSpec, SyntheticSpec};
use crate::gpr::GpOptions;
use crate::physics::PhysicsConfig;
use crate::uq::{CorrelationMatrix, CvTable};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    /// Defaults to `<output_dir>/synthetic.csv`.
    pub path: Option<PathBuf>,
    pub schema: DatasetSchema,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UqConfig {
    pub cv: CvTable,
    pub correlation: CorrelationMatrix,
    pub n_samples: usize,
    /// Test points used by `validate-uq` and `sensitivity` when no points
    /// file is given (first `n_points` of the test split).
    pub n_points: usize,
    pub seed: u64,
    /// Stored `(sigma_delta, sigma_mc)` pairs; when non-empty `validate-uq`
    /// reports on these instead of sampling.
    pub reference_pairs: Vec<[f64; 2]>,
}

impl Default for UqConfig {
    fn default() -> Self {
        Self {
            cv: CvTable::default(),
            correlation: CorrelationMatrix::identity(),
            n_samples: 1000,
            n_points: 20,
            seed: 0,
            reference_pairs: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictConfig {
    /// Points CSV (features only). Defaults to the test split.
    pub points: Option<PathBuf>,
}

/// Everything a run depends on besides input files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// When set, overrides the generate, split, GP and Monte Carlo seeds.
    pub seed: Option<u64>,
    pub output_dir: PathBuf,
    /// Defaults to `<output_dir>/model.json`.
    pub model: Option<PathBuf>,
    pub dataset: DatasetConfig,
    pub split: SplitSpec,
    pub physics: PhysicsConfig,
    pub gp: GpOptions,
    pub uq: UqConfig,
    pub generate: SyntheticSpec,
    pub predict: PredictConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: None,
            output_dir: PathBuf::from("out"),
            model: None,
            dataset: DatasetConfig::default(),
            split: SplitSpec::default(),
            physics: PhysicsConfig::default(),
            gp: GpOptions::default(),
            uq: UqConfig::default(),
            generate: SyntheticSpec::default(),
            predict: PredictConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Pushes the global seed (if any) into every seeded section.
    pub fn resolve_seeds(&mut self) {
        if let Some(s) = self.seed {
            self.generate.seed = s;
            self.split.seed = s;
            self.gp.seed = s;
            self.uq.seed = s;
        }
    }

    pub fn dataset_path(&self) -> PathBuf {
        self.dataset
            .path
            .clone()
            .unwrap_or_else(|| self.output_dir.join("synthetic.csv"))
    }

    pub fn model_path(&self) -> PathBuf {
        self.model
            .clone()
            .unwrap_or_else(|| self.output_dir.join("model.json"))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }
}
