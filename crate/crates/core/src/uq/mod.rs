//! Input-uncertainty propagation: `sigma2_total = sigma2_model + sigma2_input`
//! with `sigma2_input = J^T Sigma_z J` from a finite-difference Jacobian.

mod covariance;
mod jacobian;
mod montecarlo;

pub use covariance::{
    build_covariance, CorrelationMatrix, CorrelationPair, CorrelationSpec, CvTable, InputCovariance,
};
pub use jacobian::{jacobian, jacobian_with_steps, plan_step, Stencil, StepPolicy};
pub use montecarlo::{
    draw_samples, mc_sigma, mc_validate, relative_error_pct, McRow, McValidationReport,
    MAX_OVERSAMPLING,
};

use thiserror::Error;

use crate::data::{Feature, OperatingPoint, N_FEATURES};
use crate::hybrid::{HybridError, TrainedHybridModel};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.96;

#[derive(Debug, Error)]
pub enum UqError {
    #[error("uncertainty config error: {0}")]
    Config(String),
    #[error("invalid correlation matrix: {0}")]
    Correlation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(
        "Jacobian evaluation failed perturbing {feature} in direction '{direction}': {source}"
    )]
    Jacobian {
        feature: Feature,
        direction: &'static str,
        source: Box<HybridError>,
    },
    #[error("Monte Carlo evaluation failed at point {point_id}: {source}")]
    MonteCarlo {
        point_id: usize,
        source: Box<HybridError>,
    },
    #[error("point {point_id}: more than {attempts} draws needed to get valid samples; {feature} leaves its domain most often (CV too large)")]
    Sampling {
        point_id: usize,
        feature: Feature,
        attempts: usize,
    },
    #[error(transparent)]
    Model(#[from] HybridError),
}

/// `J^T Sigma J`, clamped at zero against round-off.
pub fn delta_variance(jacobian: &[f64; N_FEATURES], cov: &[[f64; N_FEATURES]; N_FEATURES]) -> f64 {
    let mut s = 0.0;
    for i in 0..N_FEATURES {
        for j in 0..N_FEATURES {
            s += jacobian[i] * cov[i][j] * jacobian[j];
        }
    }
    s.max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionWithUQ {
    pub jw_hybrid: f64,
    pub jw_physics: f64,
    pub sigma2_model: f64,
    pub sigma2_input: f64,
    pub sigma2_total: f64,
    pub jacobian: [f64; N_FEATURES],
    pub interval95: (f64, f64),
}

impl PredictionWithUQ {
    pub fn assemble(
        jw_hybrid: f64,
        jw_physics: f64,
        sigma2_model: f64,
        sigma2_input: f64,
        jacobian: [f64; N_FEATURES],
    ) -> Self {
        let sigma2_total = sigma2_model + sigma2_input;
        let half = Z95 * sigma2_total.sqrt();
        Self {
            jw_hybrid,
            jw_physics,
            sigma2_model,
            sigma2_input,
            sigma2_total,
            jacobian,
            interval95: (jw_hybrid - half, jw_hybrid + half),
        }
    }

    /// `(epistemic, aleatoric)` fractions of the total variance; `None` when
    /// the total is zero.
    pub fn shares(&self) -> Option<(f64, f64)> {
        (self.sigma2_total > 0.0).then(|| {
            (
                self.sigma2_model / self.sigma2_total,
                self.sigma2_input / self.sigma2_total,
            )
        })
    }
}

pub fn predict_with_uq(
    model: &TrainedHybridModel,
    point: &OperatingPoint,
    cv: &CvTable,
    corr: &CorrelationMatrix,
    policy: &StepPolicy,
) -> Result<PredictionWithUQ, UqError> {
    let pred = model.predict(point)?;
    let cov = build_covariance(point, cv, corr);
    let jac = jacobian(&|p: &OperatingPoint| model.predict_mean(p), point, policy)?;
    Ok(PredictionWithUQ::assemble(
        pred.jw_hybrid,
        pred.jw_physics,
        pred.sigma2_model,
        delta_variance(&jac, &cov.cov),
        jac,
    ))
}
