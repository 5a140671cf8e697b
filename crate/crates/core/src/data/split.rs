use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DataError, Dataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    DeterministicFirstK,
    #[default]
    SeededShuffle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub n_train: usize,
    pub seed: u64,
    pub mode: SplitMode,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            n_train: 120,
            seed: 0,
            mode: SplitMode::SeededShuffle,
        }
    }
}

/// Train and test row indices for a dataset of `len` rows.
pub fn split_indices(len: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>), DataError> {
    if spec.n_train == 0 || spec.n_train >= len {
        return Err(DataError::Config(format!(
            "n_train must satisfy 0 < n_train < {len}, got {}",
            spec.n_train
        )));
    }
    let mut order: Vec<usize> = (0..len).collect();
    if spec.mode == SplitMode::SeededShuffle {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    }
    let test = order.split_off(spec.n_train);
    Ok((order, test))
}

pub fn split(dataset: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset), DataError> {
    let (train, test) = split_indices(dataset.len(), spec)?;
    Ok((dataset.subset(&train), dataset.subset(&test)))
}
