//! Hybrid predictor: physical flux plus a GP trained on its residuals,
//! `jw_hybrid(z) = jw_phys(z) + g(standardize(z))`.

mod models;
mod persist;

pub use models::{
    flux_models, FluxPredictor, HybridTrainer, ModelPrediction, ModelTrainer, PhysicsOnly,
    PhysicsOnlyTrainer, PureGp, PureGpTrainer,
};
pub use persist::{load_model, save_model, MODEL_FORMAT, MODEL_VERSION};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::data::{fit_standardizer, DataError, Dataset, OperatingPoint, StandardizationStats};
use crate::gpr::{fit_gp_detailed, GpOptions, GprError, RestartOutcome, TrainedGP};
use crate::physics::{solve_physical_flux, PhysicsConfig, PhysicsError};

#[derive(Debug, Error)]
pub enum HybridError {
    #[error("physics solve failed on training row {row}: {source}")]
    TrainingRow { row: usize, source: PhysicsError },
    #[error("physics solve failed: {0}")]
    Physics(#[from] PhysicsError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Gpr(#[from] GprError),
    #[error("cannot access model file {path}: {message}")]
    Io { path: String, message: String },
    #[error("model file is corrupt or fails its checksum: {0}")]
    Checksum(String),
    #[error("incompatible model file: found format version {found}, this build reads version {expected}")]
    Incompatible { found: String, expected: String },
    #[error(transparent)]
    Unknown(#[from] crate::registry::UnknownStrategy),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedHybridModel {
    pub physics_cfg: PhysicsConfig,
    pub stats: StandardizationStats,
    pub gp: TrainedGP,
    /// Hex SHA-256 of the training features and fluxes.
    pub train_fingerprint: String,
    pub version: u32,
}

/// Components of one hybrid prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridPrediction {
    pub jw_physics: f64,
    pub gp_mean: f64,
    pub jw_hybrid: f64,
    /// GP posterior variance, (m/s)^2.
    pub sigma2_model: f64,
}

/// Hex SHA-256 over the little-endian bytes of every feature and flux value.
pub fn dataset_fingerprint(data: &Dataset) -> String {
    let mut h = Sha256::new();
    for (p, jw) in data.points().iter().zip(data.jw_measured()) {
        for v in p.to_array() {
            h.update(v.to_le_bytes());
        }
        h.update(jw.to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// Physical flux at every training row, failing on the first unsolvable one.
pub fn physics_on_rows(data: &Dataset, cfg: &PhysicsConfig) -> Result<Vec<f64>, HybridError> {
    let solved: Vec<_> = data
        .points()
        .par_iter()
        .map(|p| solve_physical_flux(p, cfg))
        .collect();
    solved
        .into_iter()
        .enumerate()
        .map(|(row, r)| {
            r.map(|b| b.jw)
                .map_err(|source| HybridError::TrainingRow { row, source })
        })
        .collect()
}

pub fn fit_hybrid(
    train: &Dataset,
    physics_cfg: &PhysicsConfig,
    gp_options: &GpOptions,
) -> Result<TrainedHybridModel, HybridError> {
    fit_hybrid_detailed(train, physics_cfg, gp_options).map(|(m, _)| m)
}

/// As [`fit_hybrid`], also returning the outcome of every optimizer start.
pub fn fit_hybrid_detailed(
    train: &Dataset,
    physics_cfg: &PhysicsConfig,
    gp_options: &GpOptions,
) -> Result<(TrainedHybridModel, Vec<RestartOutcome>), HybridError> {
    if train.is_empty() {
        return Err(DataError::Config("training set is empty".into()).into());
    }
    physics_cfg.validate()?;
    let jw_phys = physics_on_rows(train, physics_cfg)?;
    let residuals: Vec<f64> = train
        .jw_measured()
        .iter()
        .zip(&jw_phys)
        .map(|(m, p)| m - p)
        .collect();
    let stats = fit_standardizer(train)?;
    let z: Vec<Vec<f64>> = train
        .points()
        .iter()
        .map(|p| stats.standardize(p).to_vec())
        .collect();
    let (gp, restarts) = fit_gp_detailed(&z, &residuals, gp_options)?;
    let model = TrainedHybridModel {
        physics_cfg: physics_cfg.clone(),
        stats,
        gp,
        train_fingerprint: dataset_fingerprint(train),
        version: MODEL_VERSION,
    };
    Ok((model, restarts))
}

impl TrainedHybridModel {
    pub fn predict(&self, point: &OperatingPoint) -> Result<HybridPrediction, HybridError> {
        point.validate(0)?;
        let jw_physics = solve_physical_flux(point, &self.physics_cfg)?.jw;
        let (gp_mean, sigma2_model) = self.gp.predict(&self.stats.standardize(point))?;
        Ok(HybridPrediction {
            jw_physics,
            gp_mean,
            jw_hybrid: jw_physics + gp_mean,
            sigma2_model,
        })
    }

    /// Hybrid point estimate only, without the posterior variance.
    pub fn predict_mean(&self, point: &OperatingPoint) -> Result<f64, HybridError> {
        let jw_physics = solve_physical_flux(point, &self.physics_cfg)?.jw;
        Ok(jw_physics + self.gp.predict_mean(&self.stats.standardize(point))?)
    }

    pub fn predict_batch(
        &self,
        points: &[OperatingPoint],
    ) -> Vec<Result<HybridPrediction, HybridError>> {
        points.par_iter().map(|p| self.predict(p)).collect()
    }
}

/// `(jw_hybrid, sigma2_model)` for one point.
pub fn predict_hybrid(
    model: &TrainedHybridModel,
    point: &OperatingPoint,
) -> Result<(f64, f64), HybridError> {
    model.predict(point).map(|p| (p.jw_hybrid, p.sigma2_model))
}
