//! Interchangeable flux predictors, resolved by name.

use std::sync::{Arc, LazyLock};

use rayon::prelude::*;

use super::{fit_hybrid, HybridError, TrainedHybridModel};
use crate::data::{fit_standardizer, Dataset, OperatingPoint, StandardizationStats};
use crate::gpr::{fit_gp, GpOptions, PriorMean, TrainedGP};
use crate::physics::{solve_physical_flux, PhysicsConfig};
use crate::registry::Registry;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPrediction {
    pub jw: f64,
    /// Model (epistemic) variance; zero for the deterministic physics model.
    pub variance: f64,
}

pub trait FluxPredictor: Send + Sync {
    fn name(&self) -> &'static str;
    fn predict(&self, point: &OperatingPoint) -> Result<ModelPrediction, HybridError>;

    fn predict_batch(
        &self,
        points: &[OperatingPoint],
    ) -> Vec<Result<ModelPrediction, HybridError>> {
        points.par_iter().map(|p| self.predict(p)).collect()
    }
}

pub trait ModelTrainer: Send + Sync {
    fn fit(
        &self,
        train: &Dataset,
        physics_cfg: &PhysicsConfig,
        gp_options: &GpOptions,
    ) -> Result<Box<dyn FluxPredictor>, HybridError>;
}

/// The mechanistic model alone.
#[derive(Debug, Clone)]
pub struct PhysicsOnly {
    pub cfg: PhysicsConfig,
}

impl FluxPredictor for PhysicsOnly {
    fn name(&self) -> &'static str {
        "physics"
    }

    fn predict(&self, point: &OperatingPoint) -> Result<ModelPrediction, HybridError> {
        Ok(ModelPrediction {
            jw: solve_physical_flux(point, &self.cfg)?.jw,
            variance: 0.0,
        })
    }
}

/// A GP on standardized features regressing the flux directly.
#[derive(Debug, Clone)]
pub struct PureGp {
    pub stats: StandardizationStats,
    pub gp: TrainedGP,
}

impl FluxPredictor for PureGp {
    fn name(&self) -> &'static str {
        "pure-gp"
    }

    fn predict(&self, point: &OperatingPoint) -> Result<ModelPrediction, HybridError> {
        let (jw, variance) = self.gp.predict(&self.stats.standardize(point))?;
        Ok(ModelPrediction { jw, variance })
    }
}

impl FluxPredictor for TrainedHybridModel {
    fn name(&self) -> &'static str {
        "hybrid"
    }

    fn predict(&self, point: &OperatingPoint) -> Result<ModelPrediction, HybridError> {
        let p = TrainedHybridModel::predict(self, point)?;
        Ok(ModelPrediction {
            jw: p.jw_hybrid,
            variance: p.sigma2_model,
        })
    }
}

pub struct PhysicsOnlyTrainer;

impl ModelTrainer for PhysicsOnlyTrainer {
    fn fit(
        &self,
        _: &Dataset,
        cfg: &PhysicsConfig,
        _: &GpOptions,
    ) -> Result<Box<dyn FluxPredictor>, HybridError> {
        cfg.validate()?;
        Ok(Box::new(PhysicsOnly { cfg: cfg.clone() }))
    }
}

pub struct PureGpTrainer;

impl ModelTrainer for PureGpTrainer {
    fn fit(
        &self,
        train: &Dataset,
        _: &PhysicsConfig,
        gp_options: &GpOptions,
    ) -> Result<Box<dyn FluxPredictor>, HybridError> {
        let stats = fit_standardizer(train)?;
        let z: Vec<Vec<f64>> = train
            .points()
            .iter()
            .map(|p| stats.standardize(p).to_vec())
            .collect();
        let opts = GpOptions {
            prior_mean: PriorMean::TargetMean,
            ..gp_options.clone()
        };
        let gp = fit_gp(&z, train.jw_measured(), &opts)?;
        Ok(Box::new(PureGp { stats, gp }))
    }
}

pub struct HybridTrainer;

impl ModelTrainer for HybridTrainer {
    fn fit(
        &self,
        train: &Dataset,
        cfg: &PhysicsConfig,
        gp_options: &GpOptions,
    ) -> Result<Box<dyn FluxPredictor>, HybridError> {
        Ok(Box::new(fit_hybrid(train, cfg, gp_options)?))
    }
}

static MODELS: LazyLock<Registry<dyn ModelTrainer>> = LazyLock::new(|| {
    let mut reg: Registry<dyn ModelTrainer> = Registry::new("flux model");
    reg.register("physics", Arc::new(PhysicsOnlyTrainer))
        .register("pure-gp", Arc::new(PureGpTrainer))
        .register("hybrid", Arc::new(HybridTrainer));
    reg
});

/// Registered trainers: `physics`, `pure-gp`, `hybrid`.
pub fn flux_models() -> &'static Registry<dyn ModelTrainer> {
    &MODELS
}
