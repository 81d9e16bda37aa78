//! Cross-validated grid over tree depth and features per split.

use serde::{Deserialize, Serialize};

use super::cv::{cross_validate, EvaluationReport};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::forest::TrainConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub depth: usize,
    pub mtry: usize,
    pub roc_auc: f64,
    pub balanced_accuracy: f64,
    pub threshold: f64,
}

impl SweepCell {
    fn from_report(depth: usize, mtry: usize, r: &EvaluationReport) -> SweepCell {
        SweepCell {
            depth,
            mtry,
            roc_auc: r.roc_auc,
            balanced_accuracy: r.balanced_accuracy,
            threshold: r.chosen_threshold,
        }
    }
}

/// One `cross_validate` run per `(depth, mtry)` pair, depth-major.
///
/// Every cell reuses the same fold partition and forest seed, so cells
/// differ only in the swept parameters.
pub fn sweep(
    dataset: &Dataset,
    base: &TrainConfig,
    depths: &[usize],
    mtrys: &[usize],
    k: usize,
    seed: u64,
) -> Result<Vec<SweepCell>> {
    if depths.is_empty() || mtrys.is_empty() {
        return Err(Error::InvalidArgument(
            "sweep grids must be non-empty".into(),
        ));
    }
    if let Some(&d) = depths.iter().find(|&&d| d == 0) {
        return Err(Error::InvalidArgument(format!(
            "depth {d} must be at least 1"
        )));
    }
    let mut cells = Vec::with_capacity(depths.len() * mtrys.len());
    for &depth in depths {
        for &mtry in mtrys {
            let config = TrainConfig {
                max_depth: Some(depth),
                mtry: Some(mtry),
                ..base.clone()
            };
            let report = cross_validate(dataset, &config, k, seed)?;
            cells.push(SweepCell::from_report(depth, mtry, &report));
        }
    }
    Ok(cells)
}
