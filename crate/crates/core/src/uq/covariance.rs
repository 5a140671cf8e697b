use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::UqError;
use crate::data::{Feature, OperatingPoint, N_FEATURES};
use crate::linalg::cholesky_with_jitter;

/// Per-feature coefficients of variation (standard deviation / value).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, f64>", into = "BTreeMap<String, f64>")]
pub struct CvTable {
    cv: [f64; N_FEATURES],
}

impl Default for CvTable {
    /// Measurement CVs for concentrations, velocities, A and the support
    /// layer geometry; channel length and height are treated as exact.
    fn default() -> Self {
        let mut cv = [0.0; N_FEATURES];
        cv[Feature::CfIn.index()] = 0.02;
        cv[Feature::CdIn.index()] = 0.02;
        cv[Feature::UfIn.index()] = 0.05;
        cv[Feature::UdIn.index()] = 0.05;
        cv[Feature::A.index()] = 0.05;
        cv[Feature::EpsPsl.index()] = 0.10;
        cv[Feature::Tau.index()] = 0.10;
        cv[Feature::TPsl.index()] = 0.10;
        Self { cv }
    }
}

impl CvTable {
    pub fn new(cv: [f64; N_FEATURES]) -> Result<Self, UqError> {
        for f in Feature::ALL {
            let v = cv[f.index()];
            if !(v >= 0.0) || !v.is_finite() {
                return Err(UqError::Config(format!(
                    "CV for {f} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(Self { cv })
    }

    pub fn zeros() -> Self {
        Self {
            cv: [0.0; N_FEATURES],
        }
    }

    pub fn get(&self, f: Feature) -> f64 {
        self.cv[f.index()]
    }

    pub fn as_array(&self) -> [f64; N_FEATURES] {
        self.cv
    }
}

impl TryFrom<BTreeMap<String, f64>> for CvTable {
    type Error = UqError;

    fn try_from(map: BTreeMap<String, f64>) -> Result<Self, UqError> {
        let mut cv = CvTable::default().cv;
        for (name, v) in map {
            let f = Feature::from_name(&name)
                .ok_or_else(|| UqError::Config(format!("unknown feature '{name}' in CV table")))?;
            cv[f.index()] = v;
        }
        CvTable::new(cv)
    }
}

impl From<CvTable> for BTreeMap<String, f64> {
    fn from(t: CvTable) -> Self {
        Feature::ALL
            .into_iter()
            .map(|f| (f.name().to_string(), t.get(f)))
            .collect()
    }
}

/// One off-diagonal entry of the correlation matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationPair {
    pub a: String,
    pub b: String,
    pub rho: f64,
}

/// Config form: either a full 10x10 `matrix` in feature order or a sparse
/// list of `pairs` on top of the identity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrelationSpec {
    pub matrix: Option<Vec<Vec<f64>>>,
    pub pairs: Vec<CorrelationPair>,
}

/// A validated correlation matrix with its Cholesky factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CorrelationSpec", into = "CorrelationSpec")]
pub struct CorrelationMatrix {
    m: [[f64; N_FEATURES]; N_FEATURES],
    chol: Vec<f64>,
}

impl Default for CorrelationMatrix {
    fn default() -> Self {
        Self::identity()
    }
}

impl CorrelationMatrix {
    pub fn identity() -> Self {
        let m: [[f64; N_FEATURES]; N_FEATURES] =
            std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }));
        Self::new(m).expect("identity is a correlation matrix")
    }

    /// Validates symmetry, unit diagonal, |rho| <= 1 and positive
    /// semi-definiteness (Cholesky with jitter up to 1e-12 * trace).
    pub fn new(m: [[f64; N_FEATURES]; N_FEATURES]) -> Result<Self, UqError> {
        for i in 0..N_FEATURES {
            if m[i][i] != 1.0 {
                return Err(UqError::Correlation(format!(
                    "diagonal entry {i} is {}, expected 1",
                    m[i][i]
                )));
            }
            for j in 0..N_FEATURES {
                if !m[i][j].is_finite() || m[i][j].abs() > 1.0 {
                    return Err(UqError::Correlation(format!(
                        "entry ({i},{j}) = {} outside [-1, 1]",
                        m[i][j]
                    )));
                }
                if m[i][j] != m[j][i] {
                    return Err(UqError::Correlation(format!(
                        "matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let flat: Vec<f64> = m.iter().flatten().copied().collect();
        let trace = N_FEATURES as f64;
        let (chol, _) =
            cholesky_with_jitter(&flat, N_FEATURES, &[0.0, 1e-15 * trace, 1e-12 * trace])
                .ok_or_else(|| {
                    UqError::Correlation("matrix is not positive semi-definite".into())
                })?;
        Ok(Self { m, chol })
    }

    pub fn from_pairs(pairs: &[CorrelationPair]) -> Result<Self, UqError> {
        let mut m = Self::identity().m;
        for p in pairs {
            let idx = |name: &str| {
                Feature::from_name(name)
                    .map(Feature::index)
                    .ok_or_else(|| UqError::Correlation(format!("unknown feature '{name}'")))
            };
            let (a, b) = (idx(&p.a)?, idx(&p.b)?);
            if a == b {
                return Err(UqError::Correlation(format!(
                    "pair ({}, {}) is on the diagonal",
                    p.a, p.b
                )));
            }
            m[a][b] = p.rho;
            m[b][a] = p.rho;
        }
        Self::new(m)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn as_array(&self) -> &[[f64; N_FEATURES]; N_FEATURES] {
        &self.m
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

impl TryFrom<CorrelationSpec> for CorrelationMatrix {
    type Error = UqError;

    fn try_from(spec: CorrelationSpec) -> Result<Self, UqError> {
        let mut base = match spec.matrix {
            None => Self::identity(),
            Some(rows) => {
                if rows.len() != N_FEATURES || rows.iter().any(|r| r.len() != N_FEATURES) {
                    return Err(UqError::Correlation(format!(
                        "matrix must be {N_FEATURES}x{N_FEATURES}"
                    )));
                }
                Self::new(std::array::from_fn(|i| std::array::from_fn(|j| rows[i][j])))?
            }
        };
        if !spec.pairs.is_empty() {
            let mut m = base.m;
            let overlay = Self::from_pairs(&spec.pairs)?;
            for i in 0..N_FEATURES {
                for j in 0..N_FEATURES {
                    if i != j && overlay.m[i][j] != 0.0 {
                        m[i][j] = overlay.m[i][j];
                    }
                }
            }
            base = Self::new(m)?;
        }
        Ok(base)
    }
}

impl From<CorrelationMatrix> for CorrelationSpec {
    fn from(c: CorrelationMatrix) -> Self {
        if c.is_identity() {
            return CorrelationSpec::default();
        }
        CorrelationSpec {
            matrix: Some(c.m.iter().map(|r| r.to_vec()).collect()),
            pairs: Vec::new(),
        }
    }
}

/// Sigma_z at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct InputCovariance {
    pub sigma: [f64; N_FEATURES],
    pub corr: CorrelationMatrix,
    pub cov: [[f64; N_FEATURES]; N_FEATURES],
    /// Row-major lower factor `diag(sigma) L_corr`, used to draw samples.
    pub sampling_factor: Vec<f64>,
}

impl InputCovariance {
    pub fn as_rows(&self) -> &[[f64; N_FEATURES]; N_FEATURES] {
        &self.cov
    }
}

/// `sigma_i = CV_i |z_i|`, `cov_ij = corr_ij sigma_i sigma_j`.
pub fn build_covariance(
    point: &OperatingPoint,
    cv: &CvTable,
    corr: &CorrelationMatrix,
) -> InputCovariance {
    let z = point.to_array();
    let sigma: [f64; N_FEATURES] = std::array::from_fn(|i| cv.cv[i] * z[i].abs());
    let cov = std::array::from_fn(|i| std::array::from_fn(|j| corr.m[i][j] * sigma[i] * sigma[j]));
    let n = N_FEATURES;
    let mut sampling_factor = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            sampling_factor[i * n + j] = sigma[i] * corr.chol[i * n + j];
        }
    }
    InputCovariance {
        sigma,
        corr: corr.clone(),
        cov,
        sampling_factor,
    }
}
