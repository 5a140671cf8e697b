//! Regression metrics, Jacobian sensitivity aggregation and variance
//! decomposition.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Feature, OperatingPoint, N_FEATURES};
use crate::hybrid::{HybridError, TrainedHybridModel};
use crate::uq::{jacobian, PredictionWithUQ, StepPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub r2: f64,
    /// m/s
    pub rmse: f64,
    /// m/s
    pub mae: f64,
    /// percent
    pub mape: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("metrics need equal, nonzero lengths (got {y_true} and {y_pred})")]
    Length { y_true: usize, y_pred: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    /// Some metrics are undefined; the others are in `partial` and the
    /// undefined ones are NaN there.
    #[error("undefined metrics: {}", undefined.join(", "))]
    Undefined {
        undefined: Vec<&'static str>,
        partial: MetricsReport,
    },
}

/// R², RMSE, MAE and MAPE of `y_pred` against `y_true`.
pub fn compute_metrics(y_true: &[f64], y_pred: &[f64]) -> Result<MetricsReport, MetricsError> {
    let n = y_true.len();
    if n == 0 || n != y_pred.len() {
        return Err(MetricsError::Length {
            y_true: n,
            y_pred: y_pred.len(),
        });
    }
    if let Some(i) = (0..n).find(|&i| !y_true[i].is_finite() || !y_pred[i].is_finite()) {
        return Err(MetricsError::NonFinite(i));
    }
    let nf = n as f64;
    let mean = y_true.iter().sum::<f64>() / nf;
    let sse: f64 = y_true
        .iter()
        .zip(y_pred)
        .map(|(y, p)| (y - p) * (y - p))
        .sum();
    let sst: f64 = y_true.iter().map(|y| (y - mean) * (y - mean)).sum();
    let mae = y_true
        .iter()
        .zip(y_pred)
        .map(|(y, p)| (y - p).abs())
        .sum::<f64>()
        / nf;
    let mut undefined = Vec::new();
    let r2 = if sst > 0.0 {
        1.0 - sse / sst
    } else {
        undefined.push("R2 (constant y_true)");
        f64::NAN
    };
    let mape = if y_true.iter().all(|&y| y != 0.0) {
        100.0 / nf
            * y_true
                .iter()
                .zip(y_pred)
                .map(|(y, p)| ((y - p) / y).abs())
                .sum::<f64>()
    } else {
        undefined.push("MAPE (y_true contains 0)");
        f64::NAN
    };
    let report = MetricsReport {
        r2,
        rmse: (sse / nf).sqrt(),
        mae,
        mape,
        n,
    };
    if undefined.is_empty() {
        Ok(report)
    } else {
        Err(MetricsError::Undefined {
            undefined,
            partial: report,
        })
    }
}

/// Pearson correlation coefficient; NaN if either input is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Mean absolute Jacobian per feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityProfile {
    /// Mean |dJ/dz_i| in raw units.
    pub raw: [f64; N_FEATURES],
    /// `raw` times the training standard deviation of each feature (m/s).
    pub scaled: [f64; N_FEATURES],
    /// Features by descending `scaled`.
    pub ranking: Vec<Feature>,
    pub n_used: usize,
    pub skipped: usize,
}

impl SensitivityProfile {
    /// 1-based rank of `feature` on the scaled axis.
    pub fn rank_of(&self, feature: Feature) -> usize {
        self.ranking
            .iter()
            .position(|&f| f == feature)
            .map_or(usize::MAX, |i| i + 1)
    }
}

/// Sensitivities of an arbitrary scalar model. Points whose Jacobian fails
/// are skipped and counted.
pub fn sensitivity_profile_with<F>(
    f: &F,
    points: &[OperatingPoint],
    policy: &StepPolicy,
    feature_std: &[f64; N_FEATURES],
) -> SensitivityProfile
where
    F: Fn(&OperatingPoint) -> Result<f64, HybridError> + Sync + ?Sized,
{
    let jacs: Vec<_> = points.par_iter().map(|p| jacobian(f, p, policy)).collect();
    let mut raw = [0.0; N_FEATURES];
    let mut n_used = 0;
    for j in jacs.iter().flatten() {
        n_used += 1;
        for i in 0..N_FEATURES {
            raw[i] += j[i].abs();
        }
    }
    if n_used > 0 {
        raw.iter_mut().for_each(|v| *v /= n_used as f64);
    }
    let scaled: [f64; N_FEATURES] = std::array::from_fn(|i| raw[i] * feature_std[i]);
    let mut ranking = Feature::ALL.to_vec();
    ranking.sort_by(|a, b| {
        scaled[b.index()]
            .total_cmp(&scaled[a.index()])
            .then(a.index().cmp(&b.index()))
    });
    SensitivityProfile {
        raw,
        scaled,
        ranking,
        n_used,
        skipped: points.len() - n_used,
    }
}

/// Sensitivities of the hybrid mean, scaled by the training feature spread.
pub fn sensitivity_profile(
    model: &TrainedHybridModel,
    points: &[OperatingPoint],
) -> SensitivityProfile {
    sensitivity_profile_with(
        &|p: &OperatingPoint| model.predict_mean(p),
        points,
        &StepPolicy::from_stats(&model.stats),
        &model.stats.std,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRow {
    pub epistemic_share: f64,
    pub aleatoric_share: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("point {index} has zero total variance; shares are undefined")]
pub struct UndefinedShare {
    pub index: usize,
}

/// Epistemic and aleatoric variance fractions per prediction.
pub fn decomposition_profile(
    predictions: &[PredictionWithUQ],
) -> Result<Vec<DecompositionRow>, UndefinedShare> {
    predictions
        .iter()
        .enumerate()
        .map(|(index, p)| {
            p.shares()
                .map(|(epistemic_share, aleatoric_share)| DecompositionRow {
                    epistemic_share,
                    aleatoric_share,
                })
                .ok_or(UndefinedShare { index })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::nominal_point;
    use proptest::prelude::*;

    #[test]
    fn perfect_prediction() {
        let y = [1.0, 2.0, 3.0];
        let m = compute_metrics(&y, &y).unwrap();
        assert_eq!((m.r2, m.rmse, m.mae, m.mape, m.n), (1.0, 0.0, 0.0, 0.0, 3));
    }

    #[test]
    fn mean_prediction_has_zero_r2() {
        let y = [1.0, 2.0, 6.0];
        let m = compute_metrics(&y, &[3.0; 3]).unwrap();
        assert_eq!(m.r2, 0.0);
    }

    #[test]
    fn hand_worked_example() {
        // |e| = 0.1, 0.1, 0.4; relative 0.1, 0.05, 0.1.
        let m = compute_metrics(&[1.0, 2.0, 4.0], &[1.1, 1.9, 4.4]).unwrap();
        assert!((m.mape - 25.0 / 3.0).abs() < 1e-12, "{}", m.mape);
        assert!((m.mae - 0.2).abs() < 1e-15);
        assert!((m.rmse - (0.18f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn undefined_metrics_keep_the_rest() {
        match compute_metrics(&[0.0, 1.0], &[0.1, 1.0]) {
            Err(MetricsError::Undefined { undefined, partial }) => {
                assert_eq!(undefined.len(), 1);
                assert!(partial.mape.is_nan());
                assert!((partial.mae - 0.05).abs() < 1e-15);
                assert!(partial.r2.is_finite());
            }
            other => panic!("{other:?}"),
        }
        match compute_metrics(&[2.0, 2.0], &[2.0, 2.1]) {
            Err(MetricsError::Undefined { partial, .. }) => {
                assert!(partial.r2.is_nan());
                assert!(partial.mape.is_finite());
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            compute_metrics(&[], &[]),
            Err(MetricsError::Length { .. })
        ));
        assert!(matches!(
            compute_metrics(&[1.0], &[1.0, 2.0]),
            Err(MetricsError::Length { .. })
        ));
    }

    #[test]
    fn constant_model_has_zero_sensitivity() {
        let pts = vec![nominal_point(), nominal_point().with(Feature::A, 2e-12)];
        let policy = StepPolicy {
            relative: 1e-4,
            floor: [1e-12; N_FEATURES],
        };
        let s = sensitivity_profile_with(
            &|_: &OperatingPoint| Ok(3.0),
            &pts,
            &policy,
            &[1.0; N_FEATURES],
        );
        assert_eq!(s.raw, [0.0; N_FEATURES]);
        assert_eq!(s.n_used, 2);
        assert_eq!(s.skipped, 0);
    }

    #[test]
    fn linear_model_ranks_by_scaled_slope() {
        let slopes = [1.0, 5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0];
        let f = |p: &OperatingPoint| {
            Ok(p.to_array()
                .iter()
                .zip(&slopes)
                .map(|(z, a)| z * a)
                .sum::<f64>())
        };
        let policy = StepPolicy {
            relative: 1e-4,
            floor: [1e-12; N_FEATURES],
        };
        let mut std = [1.0; N_FEATURES];
        std[9] = 10.0;
        let s = sensitivity_profile_with(&f, &[nominal_point()], &policy, &std);
        assert_eq!(
            &s.ranking[..3],
            &[Feature::TC, Feature::CdIn, Feature::CfIn]
        );
        assert!((s.raw[1] - 5.0).abs() < 1e-6);
        assert_eq!(s.rank_of(Feature::CfIn), 3);
    }

    #[test]
    fn failing_points_are_skipped() {
        let f = |p: &OperatingPoint| {
            if p.cf_in > 0.05 {
                Err(HybridError::Checksum("stub".into()))
            } else {
                Ok(p.cf_in)
            }
        };
        let policy = StepPolicy {
            relative: 1e-4,
            floor: [1e-12; N_FEATURES],
        };
        let pts = [nominal_point(), nominal_point().with(Feature::CfIn, 0.2)];
        let s = sensitivity_profile_with(&f, &pts, &policy, &[1.0; N_FEATURES]);
        assert_eq!((s.n_used, s.skipped), (1, 1));
    }

    #[test]
    fn shares_sum_to_one() {
        let p = PredictionWithUQ::assemble(1e-6, 1e-6, 3e-17, 7e-17, [0.0; N_FEATURES]);
        let rows = decomposition_profile(std::slice::from_ref(&p)).unwrap();
        assert!((rows[0].epistemic_share + rows[0].aleatoric_share - 1.0).abs() <= 1e-12);
        let zero_cv = PredictionWithUQ::assemble(1e-6, 1e-6, 3e-17, 0.0, [0.0; N_FEATURES]);
        assert_eq!(
            decomposition_profile(&[zero_cv]).unwrap()[0].aleatoric_share,
            0.0
        );
        let none = PredictionWithUQ::assemble(1e-6, 1e-6, 0.0, 0.0, [0.0; N_FEATURES]);
        assert_eq!(
            decomposition_profile(&[p, none]),
            Err(UndefinedShare { index: 1 })
        );
    }

    #[test]
    fn pearson_basics() {
        // numpy.corrcoef reference value
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.5]) - 0.9979487157886733).abs() < 1e-12);
        assert!(pearson(&[1.0, 1.0], &[1.0, 2.0]).is_nan());
    }

    proptest! {
        #[test]
        fn scale_equivariance(
            pairs in proptest::collection::vec((0.1f64..10.0, 0.1f64..10.0), 3..40),
            c in 1e-9f64..1e3,
        ) {
            let (y, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let Ok(a) = compute_metrics(&y, &p) else { return Ok(()) };
            let ys: Vec<f64> = y.iter().map(|v| v * c).collect();
            let ps: Vec<f64> = p.iter().map(|v| v * c).collect();
            let b = compute_metrics(&ys, &ps).unwrap();
            prop_assert!((b.rmse - c * a.rmse).abs() <= 1e-12 * c * a.rmse.max(1e-300));
            prop_assert!((b.mae - c * a.mae).abs() <= 1e-12 * c * a.mae.max(1e-300));
            prop_assert!((b.r2 - a.r2).abs() <= 1e-12 * a.r2.abs().max(1.0));
            prop_assert!((b.mape - a.mape).abs() <= 1e-12 * a.mape.max(1.0));
        }

        #[test]
        fn permutation_invariance(
            pairs in proptest::collection::vec((0.1f64..10.0, 0.1f64..10.0), 3..40),
            seed in 0u64..1000,
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let (y, p): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
            let mut shuffled = pairs.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let (ys, ps): (Vec<f64>, Vec<f64>) = shuffled.into_iter().unzip();
            match (compute_metrics(&y, &p), compute_metrics(&ys, &ps)) {
                (Ok(a), Ok(b)) => {
                    prop_assert!((a.rmse - b.rmse).abs() <= 1e-12 * a.rmse.max(1e-300));
                    prop_assert!((a.mae - b.mae).abs() <= 1e-12 * a.mae.max(1e-300));
                    prop_assert!((a.mape - b.mape).abs() <= 1e-12 * a.mape.max(1.0));
                    prop_assert!((a.r2 - b.r2).abs() <= 1e-12 * a.r2.abs().max(1.0));
                    prop_assert_eq!(a.n, b.n);
                }
                (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
            }
        }

        #[test]
        fn rmse_identity(pairs in proptest::collection::vec((0.1f64..10.0, 0.1f64..10.0), 3..40)) {
            let (y, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            if let Ok(m) = compute_metrics(&y, &p) {
                let sse: f64 = y.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum();
                prop_assert!((m.rmse * m.rmse * m.n as f64 - sse).abs() <= 1e-12 * sse.max(1e-300));
                prop_assert!(m.r2 <= 1.0 && m.rmse >= 0.0 && m.mae >= 0.0 && m.mape >= 0.0);
            }
        }
    }
}
