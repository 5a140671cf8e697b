//! Operating points, datasets and everything that touches raw feature data:
//! CSV ingestion with unit conversion, train/test splitting, feature
//! standardization and synthetic dataset generation.

mod io;
mod split;
mod standardize;
mod synthetic;

use serde::{Deserialize, Serialize};
use std::fmt;

pub(crate) use io::fmt_f64;
pub use io::{
    load_dataset, load_points, write_dataset, write_points, ColumnSpec, DatasetSchema, Unit,
};
pub use split::{split, split_indices, SplitMode, SplitSpec};
pub use standardize::{fit_standardizer, StandardizationStats};
pub use synthetic::{
    generate_synthetic, residual_shapes, FeatureRanges, NoResidual, ResidualShape, ResidualSpec,
    SinusoidResidual, SyntheticSpec,
};

/// Number of input features in an [`OperatingPoint`].
pub const N_FEATURES: usize = 10;

/// Input features, in the canonical column order used for every feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    CfIn,
    CdIn,
    UfIn,
    UdIn,
    A,
    EpsPsl,
    Tau,
    TPsl,
    LX,
    TC,
}

impl Feature {
    pub const ALL: [Feature; N_FEATURES] = [
        Feature::CfIn,
        Feature::CdIn,
        Feature::UfIn,
        Feature::UdIn,
        Feature::A,
        Feature::EpsPsl,
        Feature::Tau,
        Feature::TPsl,
        Feature::LX,
        Feature::TC,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Feature::CfIn => "cf_in",
            Feature::CdIn => "cd_in",
            Feature::UfIn => "uf_in",
            Feature::UdIn => "ud_in",
            Feature::A => "A",
            Feature::EpsPsl => "eps_psl",
            Feature::Tau => "tau",
            Feature::TPsl => "t_psl",
            Feature::LX => "L_x",
            Feature::TC => "t_c",
        }
    }

    pub fn from_name(name: &str) -> Option<Feature> {
        Feature::ALL.into_iter().find(|f| f.name() == name)
    }

    /// SI unit label of the feature as stored in an [`OperatingPoint`].
    pub fn si_unit(self) -> &'static str {
        match self {
            Feature::CfIn | Feature::CdIn => "mol/L",
            Feature::UfIn | Feature::UdIn => "m/s",
            Feature::A => "m/(Pa*s)",
            Feature::EpsPsl | Feature::Tau => "-",
            Feature::TPsl | Feature::LX | Feature::TC => "m",
        }
    }

    /// Smallest admissible value and whether that value itself is admissible.
    fn lower_bound(self) -> (f64, bool) {
        match self {
            Feature::CfIn => (0.0, true),
            Feature::Tau => (1.0, true),
            _ => (0.0, false),
        }
    }

    /// Largest admissible value (inclusive), if any.
    fn upper_bound(self) -> Option<f64> {
        match self {
            Feature::EpsPsl => Some(1.0),
            _ => None,
        }
    }

    /// Whether `value` satisfies this feature's domain constraint.
    pub fn admits(self, value: f64) -> bool {
        if !value.is_finite() {
            return false;
        }
        let (lo, inclusive) = self.lower_bound();
        let above = if inclusive { value >= lo } else { value > lo };
        above && self.upper_bound().is_none_or(|hi| value <= hi)
    }

    /// Distance from `value` to the nearest domain boundary (infinite if unbounded above).
    pub fn distance_to_bound(self, value: f64) -> f64 {
        let lo = value - self.lower_bound().0;
        match self.upper_bound() {
            Some(hi) => lo.min(hi - value),
            None => lo,
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DataError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("parse error at data row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },
    #[error("validation error at row {row}: feature {feature} = {value} is outside its domain")]
    Validation {
        row: usize,
        feature: Feature,
        value: f64,
    },
    #[error("invalid measured flux at row {row}: {value}")]
    InvalidFlux { row: usize, value: f64 },
    #[error("degenerate feature {0}: column is constant over the training rows")]
    DegenerateFeature(Feature),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("synthetic generation failed: {0}")]
    Generation(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

/// A single forward-osmosis operating condition in SI units
/// (concentrations in mol/L).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// Feed concentration (mol/L).
    pub cf_in: f64,
    /// Draw concentration (mol/L).
    pub cd_in: f64,
    /// Feed cross-flow velocity (m/s).
    pub uf_in: f64,
    /// Draw cross-flow velocity (m/s).
    pub ud_in: f64,
    /// Water permeability coefficient (m/(Pa·s)).
    pub a: f64,
    pub eps_psl: f64,
    pub tau: f64,
    /// Support-layer thickness (m).
    pub t_psl: f64,
    /// Channel length (m).
    pub l_x: f64,
    /// Channel height (m).
    pub t_c: f64,
}

impl OperatingPoint {
    pub fn to_array(&self) -> [f64; N_FEATURES] {
        [
            self.cf_in,
            self.cd_in,
            self.uf_in,
            self.ud_in,
            self.a,
            self.eps_psl,
            self.tau,
            self.t_psl,
            self.l_x,
            self.t_c,
        ]
    }

    pub fn from_array(z: &[f64; N_FEATURES]) -> Self {
        Self {
            cf_in: z[0],
            cd_in: z[1],
            uf_in: z[2],
            ud_in: z[3],
            a: z[4],
            eps_psl: z[5],
            tau: z[6],
            t_psl: z[7],
            l_x: z[8],
            t_c: z[9],
        }
    }

    pub fn get(&self, feature: Feature) -> f64 {
        self.to_array()[feature.index()]
    }

    /// Returns a copy with `feature` replaced by `value`.
    pub fn with(&self, feature: Feature, value: f64) -> Self {
        let mut z = self.to_array();
        z[feature.index()] = value;
        Self::from_array(&z)
    }

    /// First feature violating its domain constraint, if any.
    pub fn first_violation(&self) -> Option<Feature> {
        let z = self.to_array();
        Feature::ALL.into_iter().find(|f| !f.admits(z[f.index()]))
    }

    pub fn is_valid(&self) -> bool {
        self.first_violation().is_none()
    }

    pub fn validate(&self, row: usize) -> Result<(), DataError> {
        match self.first_violation() {
            None => Ok(()),
            Some(feature) => Err(DataError::Validation {
                row,
                feature,
                value: self.get(feature),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Experimental,
    Synthetic { seed: u64 },
}

/// Operating points paired with measured water flux (m/s).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<OperatingPoint>,
    jw_measured: Vec<f64>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn new(
        points: Vec<OperatingPoint>,
        jw_measured: Vec<f64>,
        provenance: Provenance,
    ) -> Result<Self, DataError> {
        if points.len() != jw_measured.len() {
            return Err(DataError::Config(format!(
                "{} points but {} flux values",
                points.len(),
                jw_measured.len()
            )));
        }
        for (row, (p, &jw)) in points.iter().zip(&jw_measured).enumerate() {
            p.validate(row)?;
            if !jw.is_finite() || jw < 0.0 {
                return Err(DataError::InvalidFlux { row, value: jw });
            }
        }
        Ok(Self {
            points,
            jw_measured,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[OperatingPoint] {
        &self.points
    }

    pub fn jw_measured(&self) -> &[f64] {
        &self.jw_measured
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            points: indices.iter().map(|&i| self.points[i]).collect(),
            jw_measured: indices.iter().map(|&i| self.jw_measured[i]).collect(),
            provenance: self.provenance,
        }
    }

    /// Column of raw values for one feature.
    pub fn column(&self, feature: Feature) -> Vec<f64> {
        self.points.iter().map(|p| p.get(feature)).collect()
    }
}

/// Mid-range reference operating point.
pub fn nominal_point() -> OperatingPoint {
    OperatingPoint {
        cf_in: 0.01,
        cd_in: 1.0,
        uf_in: 0.1,
        ud_in: 0.1,
        a: 1e-12,
        eps_psl: 0.5,
        tau: 1.5,
        t_psl: 1e-4,
        l_x: 0.1,
        t_c: 2e-3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn porosity_above_one_rejected() {
        let p = nominal_point().with(Feature::EpsPsl, 1.2);
        let err = p.validate(3).unwrap_err();
        assert_eq!(
            err,
            DataError::Validation {
                row: 3,
                feature: Feature::EpsPsl,
                value: 1.2
            }
        );
    }

    #[test]
    fn feed_may_be_pure_water_but_draw_may_not() {
        assert!(nominal_point().with(Feature::CfIn, 0.0).is_valid());
        assert!(!nominal_point().with(Feature::CdIn, 0.0).is_valid());
        assert!(!nominal_point().with(Feature::Tau, 0.99).is_valid());
        assert!(nominal_point().with(Feature::EpsPsl, 1.0).is_valid());
    }

    #[test]
    fn array_round_trip_and_names() {
        let p = nominal_point();
        assert_eq!(OperatingPoint::from_array(&p.to_array()), p);
        for f in Feature::ALL {
            assert_eq!(Feature::from_name(f.name()), Some(f));
            assert_eq!(p.get(f), p.to_array()[f.index()]);
        }
    }

    #[test]
    fn dataset_rejects_negative_flux() {
        let err =
            Dataset::new(vec![nominal_point()], vec![-1.0], Provenance::Experimental).unwrap_err();
        assert!(matches!(err, DataError::InvalidFlux { row: 0, .. }));
    }
}
