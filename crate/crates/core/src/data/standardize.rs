use serde::{Deserialize, Serialize};

use super::{DataError, Dataset, Feature, OperatingPoint, N_FEATURES};

/// Per-feature affine scaling fitted on the training rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub mean: [f64; N_FEATURES],
    /// Population standard deviation (denominator N).
    pub std: [f64; N_FEATURES],
}

impl StandardizationStats {
    pub fn standardize(&self, point: &OperatingPoint) -> [f64; N_FEATURES] {
        let z = point.to_array();
        std::array::from_fn(|i| (z[i] - self.mean[i]) / self.std[i])
    }

    pub fn destandardize(&self, z_hat: &[f64; N_FEATURES]) -> OperatingPoint {
        let z: [f64; N_FEATURES] = std::array::from_fn(|i| z_hat[i] * self.std[i] + self.mean[i]);
        OperatingPoint::from_array(&z)
    }
}

pub fn fit_standardizer(train: &Dataset) -> Result<StandardizationStats, DataError> {
    let n = train.len();
    if n < 2 {
        return Err(DataError::Config(format!(
            "standardization needs at least 2 rows, got {n}"
        )));
    }
    let mut mean = [0.0; N_FEATURES];
    let mut std = [0.0; N_FEATURES];
    for f in Feature::ALL {
        let col = train.column(f);
        let m = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64;
        let s = var.sqrt();
        // Relative threshold: a column whose spread is pure round-off is constant.
        if !(s > 1e-14 * m.abs()) || s == 0.0 {
            return Err(DataError::DegenerateFeature(f));
        }
        mean[f.index()] = m;
        std[f.index()] = s;
    }
    Ok(StandardizationStats { mean, std })
}
