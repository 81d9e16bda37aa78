use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TREES: usize = 200;
pub const DEFAULT_SEED: u64 = 1;

/// Random forest hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub n_trees: usize,
    /// `None` grows trees until their leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    /// Features drawn at each node. `None` means `floor(log2(F)) + 1`.
    pub mtry: Option<usize>,
    pub seed: u64,
    /// Nodes lighter than this become leaves. `None` means the smallest
    /// single instance weight, which never stops a split on its own.
    pub min_node_weight: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            n_trees: DEFAULT_TREES,
            max_depth: None,
            mtry: None,
            seed: DEFAULT_SEED,
            min_node_weight: None,
        }
    }
}

pub fn default_mtry(n_features: usize) -> usize {
    if n_features == 0 {
        0
    } else {
        n_features.ilog2() as usize + 1
    }
}

impl TrainConfig {
    pub fn resolved_mtry(&self, n_features: usize) -> usize {
        self.mtry.unwrap_or_else(|| default_mtry(n_features))
    }

    pub fn validate(&self, n_features: usize) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::InvalidArgument("n_trees must be at least 1".into()));
        }
        let mtry = self.resolved_mtry(n_features);
        if mtry == 0 || mtry > n_features {
            return Err(Error::InvalidArgument(format!(
                "mtry {mtry} must lie in 1..={n_features}"
            )));
        }
        if let Some(w) = self.min_node_weight {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "min_node_weight must be positive, got {w}"
                )));
            }
        }
        Ok(())
    }
}
