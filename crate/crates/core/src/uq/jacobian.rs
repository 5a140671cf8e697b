use serde::{Deserialize, Serialize};

use super::UqError;
use crate::data::{Feature, OperatingPoint, StandardizationStats, N_FEATURES};
use crate::hybrid::HybridError;

/// Finite-difference step rule `h_i = max(relative * |z_i|, floor_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepPolicy {
    pub relative: f64,
    /// Absolute floor per feature, in that feature's SI units.
    pub floor: [f64; N_FEATURES],
}

impl StepPolicy {
    pub const DEFAULT_RELATIVE: f64 = 1e-4;

    /// Default rule: 1e-4 relative, floored at 1e-4 training standard deviations.
    pub fn from_stats(stats: &StandardizationStats) -> Self {
        Self {
            relative: Self::DEFAULT_RELATIVE,
            floor: std::array::from_fn(|i| Self::DEFAULT_RELATIVE * stats.std[i]),
        }
    }

    /// The same rule with every step multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            relative: self.relative * factor,
            floor: self.floor.map(|f| f * factor),
        }
    }

    pub fn nominal_step(&self, feature: Feature, value: f64) -> f64 {
        (self.relative * value.abs()).max(self.floor[feature.index()])
    }
}

/// Which stencil was used for one partial derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stencil {
    Central,
    Forward,
    Backward,
}

/// Step and stencil for one feature: central with `h` shrunk to half the
/// distance to a domain bound when needed, one-sided when sitting on it.
pub fn plan_step(feature: Feature, value: f64, h: f64) -> (f64, Stencil) {
    let d = feature.distance_to_bound(value);
    if h < d {
        (h, Stencil::Central)
    } else if d > 0.0 {
        (0.5 * d, Stencil::Central)
    } else if feature.admits(value + h) {
        (h, Stencil::Forward)
    } else {
        (h, Stencil::Backward)
    }
}

/// Finite-difference gradient of `f` with explicit per-feature steps.
pub fn jacobian_with_steps<F>(
    f: &F,
    point: &OperatingPoint,
    steps: &[f64; N_FEATURES],
) -> Result<[f64; N_FEATURES], UqError>
where
    F: Fn(&OperatingPoint) -> Result<f64, HybridError> + ?Sized,
{
    let eval = |p: OperatingPoint, feature: Feature, direction: &'static str| {
        if let Some(bad) = p.first_violation() {
            return Err(UqError::Domain(format!(
                "perturbing {feature} ({direction}) leaves the domain in {bad}"
            )));
        }
        f(&p).map_err(|source| UqError::Jacobian {
            feature,
            direction,
            source: Box::new(source),
        })
    };
    let mut jac = [0.0; N_FEATURES];
    for feature in Feature::ALL {
        let z = point.get(feature);
        let (h, stencil) = plan_step(feature, z, steps[feature.index()]);
        if !(h > 0.0) {
            return Err(UqError::Domain(format!(
                "non-positive step {h} for {feature}"
            )));
        }
        // Divide by the representable spacing, not by the nominal 2h.
        let (lo, hi) = match stencil {
            Stencil::Central => (z - h, z + h),
            Stencil::Forward => (z, z + h),
            Stencil::Backward => (z - h, z),
        };
        let f_hi = eval(point.with(feature, hi), feature, "+")?;
        let f_lo = eval(point.with(feature, lo), feature, "-")?;
        jac[feature.index()] = (f_hi - f_lo) / (hi - lo);
    }
    Ok(jac)
}

/// Finite-difference gradient of `f` under `policy`.
pub fn jacobian<F>(
    f: &F,
    point: &OperatingPoint,
    policy: &StepPolicy,
) -> Result<[f64; N_FEATURES], UqError>
where
    F: Fn(&OperatingPoint) -> Result<f64, HybridError> + ?Sized,
{
    let steps =
        std::array::from_fn(|i| policy.nominal_step(Feature::ALL[i], point.get(Feature::ALL[i])));
    jacobian_with_steps(f, point, &steps)
}
