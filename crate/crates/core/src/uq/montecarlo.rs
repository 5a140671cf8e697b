use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    build_covariance, predict_with_uq, CorrelationMatrix, CvTable, InputCovariance, StepPolicy,
    UqError,
};
use crate::data::{Feature, OperatingPoint, N_FEATURES};
use crate::hybrid::{HybridError, TrainedHybridModel};
use crate::metrics::pearson;
use crate::seeding::derive_seed;

/// Draws per requested sample before giving up on rejection sampling.
pub const MAX_OVERSAMPLING: usize = 10;

/// One row of the Delta-vs-Monte-Carlo comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub point_id: usize,
    pub sigma_delta: f64,
    pub sigma_mc: f64,
    /// `100 |sigma_delta - sigma_mc| / sigma_delta`.
    pub relative_error_pct: f64,
    /// Draws rejected for leaving the physical domain.
    pub rejected: usize,
}

impl McRow {
    pub fn from_pairs(point_id: usize, sigma_delta: f64, sigma_mc: f64) -> Self {
        Self {
            point_id,
            sigma_delta,
            sigma_mc,
            relative_error_pct: relative_error_pct(sigma_delta, sigma_mc),
            rejected: 0,
        }
    }
}

pub fn relative_error_pct(sigma_delta: f64, sigma_mc: f64) -> f64 {
    100.0 * (sigma_delta - sigma_mc).abs() / sigma_delta
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McValidationReport {
    pub rows: Vec<McRow>,
    pub n_samples: usize,
    pub seed: u64,
}

impl McValidationReport {
    pub fn median_relative_error_pct(&self) -> f64 {
        let mut v: Vec<f64> = self.rows.iter().map(|r| r.relative_error_pct).collect();
        median(&mut v)
    }

    /// Pearson correlation between Delta and Monte Carlo variances.
    pub fn variance_correlation(&self) -> f64 {
        let d: Vec<f64> = self
            .rows
            .iter()
            .map(|r| r.sigma_delta * r.sigma_delta)
            .collect();
        let m: Vec<f64> = self.rows.iter().map(|r| r.sigma_mc * r.sigma_mc).collect();
        pearson(&d, &m)
    }

    pub fn total_rejected(&self) -> usize {
        self.rows.iter().map(|r| r.rejected).sum()
    }
}

pub(crate) fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Draws `n` valid samples from `N(point, cov)` by rejection, using a
/// generator seeded from `(seed, point_id)`.
pub fn draw_samples(
    point: &OperatingPoint,
    cov: &InputCovariance,
    n: usize,
    seed: u64,
    point_id: usize,
) -> Result<(Vec<OperatingPoint>, usize), UqError> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, point_id as u64));
    let x = point.to_array();
    let l = &cov.sampling_factor;
    let cap = MAX_OVERSAMPLING * n;
    let mut out = Vec::with_capacity(n);
    let mut rejected = 0;
    let mut violations = [0usize; N_FEATURES];
    while out.len() < n {
        if out.len() + rejected >= cap {
            let worst = (0..N_FEATURES)
                .max_by_key(|&i| (violations[i], std::cmp::Reverse(i)))
                .unwrap_or(0);
            return Err(UqError::Sampling {
                point_id,
                feature: Feature::ALL[worst],
                attempts: cap,
            });
        }
        let xi: [f64; N_FEATURES] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
        let z: [f64; N_FEATURES] = std::array::from_fn(|i| {
            x[i] + (0..=i).map(|k| l[i * N_FEATURES + k] * xi[k]).sum::<f64>()
        });
        let p = OperatingPoint::from_array(&z);
        match p.first_violation() {
            None => out.push(p),
            Some(f) => {
                violations[f.index()] += 1;
                rejected += 1;
            }
        }
    }
    Ok((out, rejected))
}

/// Sample standard deviation (denominator n - 1) of `f` under input noise.
pub fn mc_sigma<F>(
    f: &F,
    point: &OperatingPoint,
    cov: &InputCovariance,
    n: usize,
    seed: u64,
    point_id: usize,
) -> Result<(f64, usize), UqError>
where
    F: Fn(&OperatingPoint) -> Result<f64, HybridError> + Sync + ?Sized,
{
    if n < 2 {
        return Err(UqError::Config(format!(
            "need at least 2 Monte Carlo samples, got {n}"
        )));
    }
    let (samples, rejected) = draw_samples(point, cov, n, seed, point_id)?;
    let values: Vec<f64> = samples
        .par_iter()
        .map(f)
        .collect::<Result<_, _>>()
        .map_err(|e| UqError::MonteCarlo {
            point_id,
            source: Box::new(e),
        })?;
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok(((ss / (n - 1) as f64).sqrt(), rejected))
}

/// Compares the Delta-method input sigma with a Monte Carlo estimate through
/// the hybrid mean at each point.
pub fn mc_validate(
    model: &TrainedHybridModel,
    points: &[OperatingPoint],
    cv: &CvTable,
    corr: &CorrelationMatrix,
    n_samples: usize,
    seed: u64,
) -> Result<McValidationReport, UqError> {
    let policy = StepPolicy::from_stats(&model.stats);
    let f = |p: &OperatingPoint| model.predict_mean(p);
    let rows = points
        .iter()
        .enumerate()
        .map(|(point_id, p)| {
            let uq = predict_with_uq(model, p, cv, corr, &policy)?;
            let cov = build_covariance(p, cv, corr);
            let (sigma_mc, rejected) = mc_sigma(&f, p, &cov, n_samples, seed, point_id)?;
            let sigma_delta = uq.sigma2_input.sqrt();
            Ok(McRow {
                rejected,
                ..McRow::from_pairs(point_id, sigma_delta, sigma_mc)
            })
        })
        .collect::<Result<Vec<_>, UqError>>()?;
    Ok(McValidationReport {
        rows,
        n_samples,
        seed,
    })
}
