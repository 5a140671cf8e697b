//! Seeded synthetic datasets: physics flux times a smooth multiplicative
//! discrepancy, plus optional Gaussian measurement noise.

use std::collections::BTreeMap;
use std::sync::{Arc, LazyLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{DataError, Dataset, Feature, OperatingPoint, Provenance, N_FEATURES};
use crate::physics::{solve_physical_flux, PhysicsConfig};
use crate::registry::Registry;

/// Largest admissible |delta| of any residual shape.
pub const MAX_RESIDUAL_AMPLITUDE: f64 = 0.15;

/// Closed sampling interval per feature, in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "BTreeMap<String, [f64; 2]>",
    into = "BTreeMap<String, [f64; 2]>"
)]
pub struct FeatureRanges {
    bounds: [[f64; 2]; N_FEATURES],
}

impl Default for FeatureRanges {
    fn default() -> Self {
        Self {
            bounds: [
                [0.01, 0.1],      // cf_in, mol/L
                [0.5, 2.0],       // cd_in, mol/L
                [0.05, 0.3],      // uf_in, m/s
                [0.05, 0.3],      // ud_in, m/s
                [0.5e-12, 2e-12], // A, m/(Pa s)
                [0.5, 0.7],       // eps_psl
                [1.4, 2.0],       // tau
                [8e-5, 1.5e-4],   // t_psl, m
                [0.05, 0.2],      // L_x, m
                [1e-3, 3e-3],     // t_c, m
            ],
        }
    }
}

impl FeatureRanges {
    pub fn new(bounds: [[f64; 2]; N_FEATURES]) -> Result<Self, DataError> {
        for f in Feature::ALL {
            let [lo, hi] = bounds[f.index()];
            if !(lo <= hi) || !f.admits(lo) || !f.admits(hi) {
                return Err(DataError::Config(format!(
                    "invalid sampling range [{lo}, {hi}] for feature {f}"
                )));
            }
        }
        Ok(Self { bounds })
    }

    pub fn get(&self, f: Feature) -> [f64; 2] {
        self.bounds[f.index()]
    }

    /// Standardizes `z` with the mean and standard deviation of the uniform
    /// distribution on each range (constant ranges map to 0).
    pub fn standardize(&self, z: &[f64; N_FEATURES]) -> [f64; N_FEATURES] {
        std::array::from_fn(|i| {
            let [lo, hi] = self.bounds[i];
            let sd = (hi - lo) / 12f64.sqrt();
            if sd > 0.0 {
                (z[i] - 0.5 * (lo + hi)) / sd
            } else {
                0.0
            }
        })
    }

    fn sample(&self, rng: &mut impl Rng) -> OperatingPoint {
        let z: [f64; N_FEATURES] = std::array::from_fn(|i| {
            let [lo, hi] = self.bounds[i];
            lo + (hi - lo) * rng.random::<f64>()
        });
        OperatingPoint::from_array(&z)
    }
}

impl TryFrom<BTreeMap<String, [f64; 2]>> for FeatureRanges {
    type Error = DataError;

    fn try_from(map: BTreeMap<String, [f64; 2]>) -> Result<Self, DataError> {
        let mut bounds = FeatureRanges::default().bounds;
        for (name, range) in map {
            let f = Feature::from_name(&name)
                .ok_or_else(|| DataError::Config(format!("unknown feature '{name}' in ranges")))?;
            bounds[f.index()] = range;
        }
        FeatureRanges::new(bounds)
    }
}

impl From<FeatureRanges> for BTreeMap<String, [f64; 2]> {
    fn from(r: FeatureRanges) -> Self {
        Feature::ALL
            .into_iter()
            .map(|f| (f.name().to_string(), r.get(f)))
            .collect()
    }
}

/// A relative discrepancy `delta(z_hat)` applied to the physics flux.
pub trait ResidualShape: Send + Sync {
    fn name(&self) -> &'static str;
    fn delta(&self, z_hat: &[f64; N_FEATURES]) -> f64;
}

/// `amplitude * sin(freq_a * z_hat[a]) * cos(freq_b * z_hat[b])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidResidual {
    pub amplitude: f64,
    pub feature_a: Feature,
    pub freq_a: f64,
    pub feature_b: Feature,
    pub freq_b: f64,
}

impl ResidualShape for SinusoidResidual {
    fn name(&self) -> &'static str {
        "sinusoid"
    }
    fn delta(&self, z_hat: &[f64; N_FEATURES]) -> f64 {
        self.amplitude
            * (self.freq_a * z_hat[self.feature_a.index()]).sin()
            * (self.freq_b * z_hat[self.feature_b.index()]).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoResidual;

impl ResidualShape for NoResidual {
    fn name(&self) -> &'static str {
        "none"
    }
    fn delta(&self, _z_hat: &[f64; N_FEATURES]) -> f64 {
        0.0
    }
}

/// Config-level description of the residual shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResidualSpec {
    pub kind: String,
    pub amplitude: f64,
    pub feature_a: Feature,
    pub freq_a: f64,
    pub feature_b: Feature,
    pub freq_b: f64,
}

impl Default for ResidualSpec {
    fn default() -> Self {
        Self {
            kind: "sinusoid".into(),
            amplitude: 0.1,
            feature_a: Feature::A,
            freq_a: 3.0,
            feature_b: Feature::CdIn,
            freq_b: 2.0,
        }
    }
}

impl ResidualSpec {
    pub fn none() -> Self {
        Self {
            kind: "none".into(),
            ..Default::default()
        }
    }

    pub fn build(&self) -> Result<Arc<dyn ResidualShape>, DataError> {
        let factory = residual_shapes()
            .get(&self.kind)
            .map_err(|e| DataError::Config(e.to_string()))?;
        factory(self)
    }
}

pub type ResidualFactory =
    dyn Fn(&ResidualSpec) -> Result<Arc<dyn ResidualShape>, DataError> + Send + Sync;

static SHAPES: LazyLock<Registry<ResidualFactory>> = LazyLock::new(|| {
    let mut reg: Registry<ResidualFactory> = Registry::new("residual shape");
    reg.register(
        "sinusoid",
        Arc::new(|spec: &ResidualSpec| {
            if !(spec.amplitude.abs() <= MAX_RESIDUAL_AMPLITUDE) {
                return Err(DataError::Config(format!(
                    "residual amplitude {} exceeds {MAX_RESIDUAL_AMPLITUDE}",
                    spec.amplitude
                )));
            }
            Ok(Arc::new(SinusoidResidual {
                amplitude: spec.amplitude,
                feature_a: spec.feature_a,
                freq_a: spec.freq_a,
                feature_b: spec.feature_b,
                freq_b: spec.freq_b,
            }) as Arc<dyn ResidualShape>)
        }),
    );
    reg.register(
        "none",
        Arc::new(|_: &ResidualSpec| Ok(Arc::new(NoResidual) as Arc<dyn ResidualShape>)),
    );
    reg
});

pub fn residual_shapes() -> &'static Registry<ResidualFactory> {
    &SHAPES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n: usize,
    pub ranges: FeatureRanges,
    pub residual: ResidualSpec,
    /// Relative standard deviation of multiplicative Gaussian noise.
    pub noise_cv: f64,
    pub seed: u64,
    /// Resampling attempts per row when the physics solve fails.
    pub max_retries: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n: 2974,
            ranges: FeatureRanges::default(),
            residual: ResidualSpec::default(),
            noise_cv: 0.002,
            seed: 2024,
            max_retries: 100,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), DataError> {
        if self.n == 0 {
            return Err(DataError::Config("synthetic n must be > 0".into()));
        }
        if !(self.noise_cv >= 0.0) || !self.noise_cv.is_finite() {
            return Err(DataError::Config(format!(
                "noise_cv must be >= 0, got {}",
                self.noise_cv
            )));
        }
        FeatureRanges::new(self.ranges.bounds)?;
        self.residual.build()?;
        Ok(())
    }
}

pub fn generate_synthetic(
    spec: &SyntheticSpec,
    physics: &PhysicsConfig,
) -> Result<Dataset, DataError> {
    spec.validate()?;
    physics
        .validate()
        .map_err(|e| DataError::Config(e.to_string()))?;
    let shape = spec.residual.build()?;
    let noise = Normal::new(0.0, spec.noise_cv).map_err(|e| DataError::Config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut points = Vec::with_capacity(spec.n);
    let mut jw = Vec::with_capacity(spec.n);
    for row in 0..spec.n {
        let mut attempt = 0;
        let (p, j_phys) = loop {
            let p = spec.ranges.sample(&mut rng);
            match solve_physical_flux(&p, physics) {
                Ok(r) if r.jw > 0.0 => break (p, r.jw),
                outcome => {
                    attempt += 1;
                    if attempt > spec.max_retries {
                        let why = match outcome {
                            Err(e) => e.to_string(),
                            Ok(_) => "zero flux".into(),
                        };
                        return Err(DataError::Generation(format!(
                            "row {row}: no solvable point after {} attempts ({why})",
                            spec.max_retries
                        )));
                    }
                }
            }
        };
        let delta = shape.delta(&spec.ranges.standardize(&p.to_array()));
        let eps = loop {
            let e: f64 = noise.sample(&mut rng);
            if 1.0 + e > 0.0 {
                break e;
            }
        };
        points.push(p);
        jw.push(j_phys * (1.0 + delta) * (1.0 + eps));
    }
    Dataset::new(points, jw, Provenance::Synthetic { seed: spec.seed })
}
