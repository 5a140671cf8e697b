//! Exact Gaussian process regression with a Matérn 5/2 ARD kernel.
//!
//! Hyperparameters are fit by maximizing the log marginal likelihood over
//! `[ln l_1 .. ln l_D, ln(sigma_f^2 / v), ln(sigma_n^2 / v)]`, where `v` is the
//! empirical variance of the centred targets.

mod kernel;
mod nelder_mead;

pub use kernel::{matern52, matern52_of_r, scaled_distance, KernelParams};
pub use nelder_mead::{minimize, Minimum, NelderMeadOptions};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{backward_solve_transposed, cholesky_with_jitter, forward_solve};
use crate::seeding::derive_seed;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Relative jitter steps, multiplied by the mean diagonal of the kernel matrix.
pub const JITTER_LADDER: [f64; 8] = [0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GprError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("kernel matrix is not positive definite even with jitter {max_jitter:e}")]
    Conditioning { max_jitter: f64 },
    #[error("hyperparameter optimization failed: {0}")]
    Optimization(String),
}

/// How the constant prior mean is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorMean {
    #[default]
    Zero,
    TargetMean,
}

/// Box on the log-hyperparameters. Variance bounds are relative to the
/// target variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperBounds {
    pub log_length_scale: [f64; 2],
    pub log_signal_variance: [f64; 2],
    pub log_noise_variance: [f64; 2],
}

impl Default for HyperBounds {
    fn default() -> Self {
        Self {
            log_length_scale: [-3.0, 4.0],
            log_signal_variance: [-12.0, 4.0],
            log_noise_variance: [-16.0, 0.0],
        }
    }
}

impl HyperBounds {
    fn as_box(&self, dim: usize) -> Vec<(f64, f64)> {
        let pair = |b: [f64; 2]| (b[0], b[1]);
        let mut v = vec![pair(self.log_length_scale); dim];
        v.push(pair(self.log_signal_variance));
        v.push(pair(self.log_noise_variance));
        v
    }

    fn validate(&self) -> Result<(), GprError> {
        for (name, b) in [
            ("log_length_scale", self.log_length_scale),
            ("log_signal_variance", self.log_signal_variance),
            ("log_noise_variance", self.log_noise_variance),
        ] {
            if !(b[0].is_finite() && b[1].is_finite() && b[0] < b[1]) {
                return Err(GprError::Domain(format!(
                    "invalid bounds for {name}: {b:?}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpOptions {
    /// Random starts in addition to the heuristic start.
    pub restarts: usize,
    pub seed: u64,
    pub max_evals: usize,
    pub bounds: HyperBounds,
    pub prior_mean: PriorMean,
}

impl Default for GpOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            seed: 0,
            max_evals: 3000,
            bounds: HyperBounds::default(),
            prior_mean: PriorMean::Zero,
        }
    }
}

/// Outcome of one optimizer start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartOutcome {
    pub start: Vec<f64>,
    pub start_mll: f64,
    pub final_mll: f64,
    pub evals: usize,
}

/// A GP conditioned on training data. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedGP {
    pub z_train: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    pub params: KernelParams,
    /// Row-major lower-triangular factor of `K + (sigma_n^2 + jitter) I`.
    pub chol_factor: Vec<f64>,
    pub alpha: Vec<f64>,
    pub prior_mean: f64,
    pub jitter_used: f64,
    pub log_marginal_likelihood: f64,
}

/// Squared per-dimension differences for every pair `i > j`, so the
/// objective can rebuild `K` for new length scales without touching inputs.
struct PairDiffs {
    n: usize,
    dim: usize,
    sq: Vec<f64>,
}

impl PairDiffs {
    fn new(z: &[Vec<f64>]) -> Self {
        let n = z.len();
        let dim = z.first().map_or(0, Vec::len);
        let mut sq = Vec::with_capacity(n * (n - 1) / 2 * dim);
        for i in 1..n {
            for j in 0..i {
                sq.extend(z[i].iter().zip(&z[j]).map(|(a, b)| (a - b) * (a - b)));
            }
        }
        Self { n, dim, sq }
    }

    fn kernel_matrix(&self, params: &KernelParams) -> Vec<f64> {
        let n = self.n;
        let inv_l2: Vec<f64> = params.length_scales.iter().map(|l| 1.0 / (l * l)).collect();
        let mut k = vec![0.0; n * n];
        let mut chunks = self.sq.chunks_exact(self.dim);
        for i in 0..n {
            k[i * n + i] = params.signal_variance + params.noise_variance;
            for j in 0..i {
                let d = chunks.next().expect("pair count");
                let r2: f64 = d.iter().zip(&inv_l2).map(|(a, b)| a * b).sum();
                let v = params.signal_variance * matern52_of_r(r2.sqrt());
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        k
    }
}

fn check_inputs(z: &[Vec<f64>], e: &[f64]) -> Result<usize, GprError> {
    if z.len() != e.len() {
        return Err(GprError::Dimension(format!(
            "{} input rows but {} targets",
            z.len(),
            e.len()
        )));
    }
    if z.len() < 2 {
        return Err(GprError::Domain(format!(
            "need at least 2 training points, got {}",
            z.len()
        )));
    }
    let dim = z[0].len();
    if dim == 0 {
        return Err(GprError::Dimension("inputs have zero columns".into()));
    }
    for (i, row) in z.iter().enumerate() {
        if row.len() != dim {
            return Err(GprError::Dimension(format!(
                "row {i} has {} columns, expected {dim}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(GprError::Domain(format!("row {i} has a non-finite input")));
        }
    }
    if let Some(i) = e.iter().position(|v| !v.is_finite()) {
        return Err(GprError::Domain(format!("target {i} is not finite")));
    }
    Ok(dim)
}

struct Factorization {
    chol: Vec<f64>,
    alpha: Vec<f64>,
    jitter: f64,
    mll: f64,
}

fn factorize(k: &[f64], n: usize, centred: &[f64]) -> Result<Factorization, GprError> {
    let mean_diag = (0..n).map(|i| k[i * n + i]).sum::<f64>() / n as f64;
    let ladder: Vec<f64> = JITTER_LADDER.iter().map(|s| s * mean_diag).collect();
    let (chol, jitter) = cholesky_with_jitter(k, n, &ladder).ok_or(GprError::Conditioning {
        max_jitter: ladder[ladder.len() - 1],
    })?;
    let w = forward_solve(&chol, n, centred);
    let alpha = backward_solve_transposed(&chol, n, &w);
    let quad: f64 = w.iter().map(|v| v * v).sum();
    let log_det: f64 = 2.0 * (0..n).map(|i| chol[i * n + i].ln()).sum::<f64>();
    let mll = -0.5 * quad - 0.5 * log_det - 0.5 * n as f64 * LN_2PI;
    Ok(Factorization {
        chol,
        alpha,
        jitter,
        mll,
    })
}

fn centred(e: &[f64], mu: f64) -> Vec<f64> {
    e.iter().map(|v| v - mu).collect()
}

/// `log p(e | Z, params)` for a constant prior mean.
pub fn log_marginal_likelihood(
    z: &[Vec<f64>],
    e: &[f64],
    params: &KernelParams,
    prior_mean: f64,
) -> Result<f64, GprError> {
    let dim = check_inputs(z, e)?;
    if params.dim() != dim || !params.is_valid() {
        return Err(GprError::Domain(format!(
            "invalid kernel parameters {params:?}"
        )));
    }
    let k = PairDiffs::new(z).kernel_matrix(params);
    Ok(factorize(&k, z.len(), &centred(e, prior_mean))?.mll)
}

impl TrainedGP {
    /// Conditions a GP with fixed hyperparameters on `(z, e)`.
    pub fn condition(
        z: Vec<Vec<f64>>,
        e: Vec<f64>,
        params: KernelParams,
        prior_mean: f64,
    ) -> Result<Self, GprError> {
        let dim = check_inputs(&z, &e)?;
        if params.dim() != dim {
            return Err(GprError::Dimension(format!(
                "{} length scales for {dim}-dimensional inputs",
                params.dim()
            )));
        }
        if !params.is_valid() || !prior_mean.is_finite() {
            return Err(GprError::Domain(format!(
                "invalid kernel parameters {params:?}"
            )));
        }
        let k = PairDiffs::new(&z).kernel_matrix(&params);
        let f = factorize(&k, z.len(), &centred(&e, prior_mean))?;
        Ok(Self {
            z_train: z,
            targets: e,
            params,
            chol_factor: f.chol,
            alpha: f.alpha,
            prior_mean,
            jitter_used: f.jitter,
            log_marginal_likelihood: f.mll,
        })
    }

    pub fn n_train(&self) -> usize {
        self.targets.len()
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    fn check_query(&self, z_star: &[f64]) -> Result<(), GprError> {
        if z_star.len() != self.dim() {
            return Err(GprError::Dimension(format!(
                "query has {} columns, model expects {}",
                z_star.len(),
                self.dim()
            )));
        }
        if z_star.iter().any(|v| !v.is_finite()) {
            return Err(GprError::Domain("query point is not finite".into()));
        }
        Ok(())
    }

    fn cross_covariance(&self, z_star: &[f64]) -> Vec<f64> {
        self.z_train
            .iter()
            .map(|zi| matern52(zi, z_star, &self.params))
            .collect()
    }

    /// Posterior mean only; skips the triangular solve needed for variance.
    pub fn predict_mean(&self, z_star: &[f64]) -> Result<f64, GprError> {
        self.check_query(z_star)?;
        let k_star = self.cross_covariance(z_star);
        Ok(self.prior_mean
            + k_star
                .iter()
                .zip(&self.alpha)
                .map(|(a, b)| a * b)
                .sum::<f64>())
    }

    /// Posterior mean and variance without clamping the variance.
    pub fn predict_raw(&self, z_star: &[f64]) -> Result<(f64, f64), GprError> {
        self.check_query(z_star)?;
        let k_star = self.cross_covariance(z_star);
        let mean = self.prior_mean
            + k_star
                .iter()
                .zip(&self.alpha)
                .map(|(a, b)| a * b)
                .sum::<f64>();
        let v = forward_solve(&self.chol_factor, self.n_train(), &k_star);
        let var = self.params.signal_variance - v.iter().map(|x| x * x).sum::<f64>();
        Ok((mean, var))
    }

    /// Posterior mean and variance, with round-off negatives clamped to zero.
    pub fn predict(&self, z_star: &[f64]) -> Result<(f64, f64), GprError> {
        let (mean, var) = self.predict_raw(z_star)?;
        Ok((mean, var.max(0.0)))
    }
}

/// Free-function form of [`TrainedGP::predict`].
pub fn predict_gp(model: &TrainedGP, z_star: &[f64]) -> Result<(f64, f64), GprError> {
    model.predict(z_star)
}

fn target_scale(e: &[f64], mu: f64) -> f64 {
    let n = e.len() as f64;
    let v = e.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / n;
    if v > 0.0 {
        return v;
    }
    let ms = e.iter().map(|x| x * x).sum::<f64>() / n;
    if ms > 0.0 {
        ms
    } else {
        f64::MIN_POSITIVE.sqrt()
    }
}

fn params_from_theta(theta: &[f64], dim: usize, scale: f64) -> KernelParams {
    KernelParams {
        length_scales: theta[..dim].iter().map(|t| t.exp()).collect(),
        signal_variance: scale * theta[dim].exp(),
        noise_variance: scale * theta[dim + 1].exp(),
    }
}

/// Fits hyperparameters and conditions on the training data.
pub fn fit_gp(z: &[Vec<f64>], e: &[f64], options: &GpOptions) -> Result<TrainedGP, GprError> {
    fit_gp_detailed(z, e, options).map(|(gp, _)| gp)
}

/// As [`fit_gp`], also returning the outcome of every start (heuristic first).
pub fn fit_gp_detailed(
    z: &[Vec<f64>],
    e: &[f64],
    options: &GpOptions,
) -> Result<(TrainedGP, Vec<RestartOutcome>), GprError> {
    let dim = check_inputs(z, e)?;
    options.bounds.validate()?;
    let n = z.len();
    let mu = match options.prior_mean {
        PriorMean::Zero => 0.0,
        PriorMean::TargetMean => e.iter().sum::<f64>() / n as f64,
    };
    let r = centred(e, mu);
    let scale = target_scale(e, mu);
    let diffs = PairDiffs::new(z);
    let bounds = options.bounds.as_box(dim);

    let objective = |theta: &[f64]| -> f64 {
        let k = diffs.kernel_matrix(&params_from_theta(theta, dim, scale));
        match factorize(&k, n, &r) {
            Ok(f) if f.mll.is_finite() => -f.mll,
            _ => f64::INFINITY,
        }
    };

    let mut starts = Vec::with_capacity(options.restarts + 1);
    let mut heuristic = vec![(dim as f64).sqrt().ln(); dim];
    heuristic.push(0.0);
    heuristic.push(1e-2f64.ln());
    for (t, &(lo, hi)) in heuristic.iter_mut().zip(&bounds) {
        *t = t.clamp(lo, hi);
    }
    starts.push(heuristic);
    for i in 0..options.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(options.seed, i as u64));
        starts.push(
            bounds
                .iter()
                .map(|&(lo, hi)| {
                    let q = 0.25 * (hi - lo);
                    rng.random_range((lo + q)..(hi - q))
                })
                .collect(),
        );
    }

    let nm = NelderMeadOptions {
        max_evals: options.max_evals,
        ..Default::default()
    };
    let runs: Vec<(RestartOutcome, Vec<f64>)> = starts
        .into_par_iter()
        .map(|start| {
            let start_mll = -objective(&start);
            let m = minimize(objective, &start, &bounds, &nm);
            (
                RestartOutcome {
                    start,
                    start_mll,
                    final_mll: -m.fx,
                    evals: m.evals,
                },
                m.x,
            )
        })
        .collect();

    let best = runs
        .iter()
        .enumerate()
        .filter(|(_, (o, _))| o.final_mll.is_finite())
        .max_by(|(ia, (a, _)), (ib, (b, _))| a.final_mll.total_cmp(&b.final_mll).then(ib.cmp(ia)))
        .map(|(i, _)| i);
    let Some(best) = best else {
        // Distinguish an ill-conditioned problem from a plain optimizer failure.
        let probe = params_from_theta(&runs[0].0.start, dim, scale);
        factorize(&diffs.kernel_matrix(&probe), n, &r)?;
        return Err(GprError::Optimization(format!(
            "all {} starts produced a non-finite marginal likelihood",
            runs.len()
        )));
    };
    let params = params_from_theta(&runs[best].1, dim, scale);
    let gp = TrainedGP::condition(z.to_vec(), e.to_vec(), params, mu)?;
    Ok((gp, runs.into_iter().map(|(o, _)| o).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand_distr::{Distribution, StandardNormal};

    fn random_inputs(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect())
            .collect()
    }

    #[test]
    fn dense_inverse_oracle() {
        let z = vec![vec![0.1, -0.4], vec![0.9, 0.3], vec![-0.7, 1.2]];
        let e = vec![0.5, -1.0, 2.0];
        let params = KernelParams {
            signal_variance: 1.7,
            length_scales: vec![0.8, 1.3],
            noise_variance: 0.05,
        };
        let mu = 0.2;
        let gp = TrainedGP::condition(z.clone(), e.clone(), params.clone(), mu).unwrap();
        assert_eq!(gp.jitter_used, 0.0);

        let k = DMatrix::from_fn(3, 3, |i, j| {
            matern52(&z[i], &z[j], &params) + if i == j { params.noise_variance } else { 0.0 }
        });
        let kinv = k.clone().try_inverse().unwrap();
        let y = DVector::from_iterator(3, e.iter().map(|v| v - mu));
        for q in [vec![0.0, 0.0], vec![0.5, 0.5], vec![-2.0, 1.0]] {
            let ks = DVector::from_iterator(3, z.iter().map(|zi| matern52(zi, &q, &params)));
            let mean = mu + (ks.transpose() * &kinv * &y)[0];
            let var = params.signal_variance - (ks.transpose() * &kinv * &ks)[0];
            let (m, v) = gp.predict(&q).unwrap();
            assert!(
                (m - mean).abs() < 1e-8 * mean.abs().max(1.0),
                "{m} vs {mean}"
            );
            assert!((v - var).abs() < 1e-8, "{v} vs {var}");
        }

        let dense_mll = -0.5 * (y.transpose() * &kinv * &y)[0]
            - 0.5 * k.determinant().ln()
            - 1.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((gp.log_marginal_likelihood - dense_mll).abs() < 1e-10);
        let free = log_marginal_likelihood(&z, &e, &params, mu).unwrap();
        assert_eq!(free, gp.log_marginal_likelihood);
    }

    #[test]
    fn factor_reconstructs_kernel_matrix() {
        let z = random_inputs(30, 10, 5);
        let e: Vec<f64> = (0..30).map(|i| (i as f64).sin()).collect();
        let params = KernelParams::isotropic(10, 1.5, 0.8, 1e-4);
        let gp = TrainedGP::condition(z.clone(), e, params.clone(), 0.0).unwrap();
        let n = 30;
        let rebuilt = crate::linalg::reconstruct(&gp.chol_factor, n);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut kij = matern52(&z[i], &z[j], &params);
                if i == j {
                    kij += params.noise_variance + gp.jitter_used;
                }
                num += (rebuilt[i * n + j] - kij).powi(2);
                den += kij * kij;
            }
        }
        assert!((num / den).sqrt() < 1e-10);
    }

    #[test]
    fn interpolates_with_tiny_noise() {
        let z = random_inputs(15, 10, 11);
        let e: Vec<f64> = z.iter().map(|r| r[0].sin() + 0.3 * r[4]).collect();
        let params = KernelParams::isotropic(10, 2.0, 1.0, 1e-12);
        let gp = TrainedGP::condition(z.clone(), e.clone(), params, 0.0).unwrap();
        for (zi, ei) in z.iter().zip(&e) {
            let (m, v) = gp.predict(zi).unwrap();
            assert!((m - ei).abs() <= 1e-6 * ei.abs().max(1e-3), "{m} vs {ei}");
            assert!(v <= 1e-10);
        }
    }

    #[test]
    fn reverts_to_prior_far_away() {
        let z = random_inputs(10, 10, 3);
        let e: Vec<f64> = (0..10).map(|i| i as f64 * 0.1).collect();
        let params = KernelParams::isotropic(10, 0.5, 2.0, 1e-3);
        let gp = TrainedGP::condition(z, e, params, 0.7).unwrap();
        let (m, v) = gp.predict(&[60.0; 10]).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
        assert!((m - 0.7).abs() < 1e-12);
    }

    #[test]
    fn adding_points_never_increases_variance() {
        let z = random_inputs(25, 10, 21);
        let e: Vec<f64> = z.iter().map(|r| r.iter().sum::<f64>().cos()).collect();
        let params = KernelParams::isotropic(10, 1.2, 1.0, 1e-6);
        let small =
            TrainedGP::condition(z[..24].to_vec(), e[..24].to_vec(), params.clone(), 0.0).unwrap();
        let large = TrainedGP::condition(z.clone(), e.clone(), params, 0.0).unwrap();
        for q in random_inputs(20, 10, 99) {
            let (_, v_small) = small.predict_raw(&q).unwrap();
            let (_, v_large) = large.predict_raw(&q).unwrap();
            assert!(v_large <= v_small + 1e-12, "{v_large} > {v_small}");
            assert!(v_large >= -1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let z = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let p = KernelParams::isotropic(2, 1.0, 1.0, 1e-3);
        let gp = TrainedGP::condition(z.clone(), vec![1.0, 2.0], p.clone(), 0.0).unwrap();
        assert!(matches!(
            gp.predict(&[f64::NAN, 0.0]),
            Err(GprError::Domain(_))
        ));
        assert!(matches!(gp.predict(&[0.0]), Err(GprError::Dimension(_))));
        assert!(matches!(
            TrainedGP::condition(z.clone(), vec![1.0], p.clone(), 0.0),
            Err(GprError::Dimension(_))
        ));
        assert!(matches!(
            fit_gp(&z[..1], &[1.0], &GpOptions::default()),
            Err(GprError::Domain(_))
        ));
    }

    #[test]
    fn mll_beats_generating_hyperparameters() {
        let n = 40;
        let dim = 3;
        let z = random_inputs(n, dim, 8);
        let truth = KernelParams {
            signal_variance: 0.5,
            length_scales: vec![0.7, 1.5, 3.0],
            noise_variance: 1e-3,
        };
        let k = PairDiffs::new(&z).kernel_matrix(&truth);
        let l = crate::linalg::cholesky(&k, n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let w: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let e: Vec<f64> = (0..n)
            .map(|i| (0..=i).map(|j| l[i * n + j] * w[j]).sum())
            .collect();

        let opts = GpOptions {
            restarts: 4,
            seed: 1,
            ..Default::default()
        };
        let (gp, outcomes) = fit_gp_detailed(&z, &e, &opts).unwrap();
        let at_truth = log_marginal_likelihood(&z, &e, &truth, 0.0).unwrap();
        assert!(
            gp.log_marginal_likelihood >= at_truth,
            "{} < {at_truth}",
            gp.log_marginal_likelihood
        );
        assert_eq!(outcomes.len(), 5);
        for o in &outcomes {
            assert!(gp.log_marginal_likelihood >= o.start_mll);
            assert!(o.final_mll >= o.start_mll);
        }
        let again = fit_gp(&z, &e, &opts).unwrap();
        assert_eq!(again, gp);
    }

    #[test]
    fn zero_targets_collapse_signal() {
        let z = random_inputs(20, 4, 2);
        let e = vec![0.0; 20];
        let gp = fit_gp(
            &z,
            &e,
            &GpOptions {
                restarts: 2,
                ..Default::default()
            },
        )
        .unwrap();
        for q in random_inputs(5, 4, 7) {
            let (m, _) = gp.predict(&q).unwrap();
            assert!(m.abs() < 1e-12, "{m}");
        }
    }

    #[test]
    fn serde_round_trip_is_exact() {
        let z = random_inputs(8, 10, 4);
        let e: Vec<f64> = (0..8).map(|i| 1e-7 * (i as f64 + 0.123456789)).collect();
        let gp = TrainedGP::condition(z, e, KernelParams::isotropic(10, 1.1, 3e-14, 1e-17), 0.0)
            .unwrap();
        let s = serde_json::to_string(&gp).unwrap();
        let back: TrainedGP = serde_json::from_str(&s).unwrap();
        assert_eq!(back, gp);
    }
}
